//! Physical parameters and the integral kernels `⟨q|T_γ|q'⟩`.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Mass, action scale, half-length of the box and boundary phase.
///
/// `gamma` fixes the boundary condition `φ(−l) = e^{−2iγ} φ(l)`; `0` is the
/// periodic case and `π/2` the antiperiodic one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub mu: f64,
    pub hbar: f64,
    pub l: f64,
    pub gamma: f64,
}

impl Default for PhysicalParams {
    /// Atomic units with periodic boundary conditions.
    fn default() -> Self {
        Self {
            mu: 1.0,
            hbar: 1.0,
            l: 1.0,
            gamma: 0.0,
        }
    }
}

impl PhysicalParams {
    /// Validated constructor; `gamma` must lie in `(−π/2, π/2]`.
    pub fn new(mu: f64, hbar: f64, l: f64, gamma: f64) -> Result<Self> {
        let p = Self { mu, hbar, l, gamma };
        p.validate()?;
        Ok(p)
    }

    /// Atomic units `μ = ħ = l = 1` with the given boundary phase.
    pub fn atomic(gamma: f64) -> Result<Self> {
        Self::new(1.0, 1.0, 1.0, gamma)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("mu", self.mu), ("hbar", self.hbar), ("l", self.l)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("must be positive and finite, got {v}")));
            }
        }
        if !(self.gamma > -FRAC_PI_2 && self.gamma <= FRAC_PI_2) {
            return Err(invalid(
                "gamma",
                format!("must lie in (-pi/2, pi/2], got {}", self.gamma),
            ));
        }
        Ok(())
    }

    /// Same physics, different boundary phase. The phase is not range-checked so
    /// that symmetry relations involving `−γ` or `γ ± π` can be evaluated.
    pub fn with_gamma(self, gamma: f64) -> Self {
        Self { gamma, ..self }
    }

    pub fn is_periodic(&self) -> bool {
        self.gamma == 0.0
    }

    /// `μ l² / (4ħ)`: eigenvalues are this divided by the characteristic root.
    pub fn tau_scale(&self) -> f64 {
        self.mu * self.l * self.l / (4.0 * self.hbar)
    }
}

/// Pre-computed constants for fast kernel evaluation over a grid.
#[derive(Debug, Clone, Copy)]
pub struct KernelEvaluator {
    kind: Kind,
}

#[derive(Debug, Clone, Copy)]
enum Kind {
    Periodic { a: f64, b: f64 },
    NonPeriodic { upper: Complex64, lower: Complex64, diag: Complex64 },
}

impl KernelEvaluator {
    pub fn new(p: &PhysicalParams) -> Self {
        if p.is_periodic() {
            let a = p.mu / (4.0 * p.hbar);
            Self {
                kind: Kind::Periodic { a, b: a / p.l },
            }
        } else {
            let c = -p.mu / (4.0 * p.hbar * p.gamma.sin());
            let phase = Complex64::from_polar(1.0, p.gamma);
            Self {
                kind: Kind::NonPeriodic {
                    upper: phase * c,
                    lower: phase.conj() * c,
                    diag: Complex64::new(c * p.gamma.cos(), 0.0),
                },
            }
        }
    }

    #[inline]
    pub fn eval(&self, q: f64, q2: f64) -> Complex64 {
        match self.kind {
            Kind::Periodic { a, b } => {
                // (μ/4iħ)(q+q')sgn(q−q') − (μ/4iħl)(q² − q'²), and 1/i = −i
                let s = if q > q2 {
                    1.0
                } else if q < q2 {
                    -1.0
                } else {
                    0.0
                };
                Complex64::new(0.0, -(a * (q + q2) * s - b * (q * q - q2 * q2)))
            }
            Kind::NonPeriodic { upper, lower, diag } => {
                let f = if q > q2 {
                    upper
                } else if q < q2 {
                    lower
                } else {
                    diag
                };
                f * (q + q2)
            }
        }
    }
}

/// Non-periodic kernel `−μ(q+q')/(4ħ sinγ)·(e^{iγ}H(q−q') + e^{−iγ}H(q'−q))` with
/// `H(0) = 1/2`. Any `γ` with `sin γ ≠ 0` is accepted.
pub fn kernel_nonperiodic(p: &PhysicalParams, q: f64, q2: f64) -> Result<Complex64> {
    if p.gamma.sin() == 0.0 {
        return Err(Error::InvalidParameter {
            name: "gamma",
            reason: "sin(gamma) = 0; use the periodic kernel".into(),
        });
    }
    Ok(KernelEvaluator::new(p).eval(q, q2))
}

/// Periodic kernel `(μ/4iħ)(q+q')sgn(q−q') − (μ/4iħl)(q² − q'²)` with `sgn(0) = 0`.
pub fn kernel_periodic(p: &PhysicalParams, q: f64, q2: f64) -> Complex64 {
    KernelEvaluator::new(&p.with_gamma(0.0)).eval(q, q2)
}

/// Dispatches on `γ = 0`.
pub fn kernel(p: &PhysicalParams, q: f64, q2: f64) -> Complex64 {
    KernelEvaluator::new(p).eval(q, q2)
}
