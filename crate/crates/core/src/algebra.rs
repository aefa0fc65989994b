//! Numerical checks of the canonical relation `(H T − T H)φ = iħφ`.
//!
//! Test vectors are polynomials `φ = d/dq[(l² − q²)³ h(q)]`, so `Hφ` is known
//! exactly. Both `T(Hφ)` and the image `Tφ` are computed with the composite
//! trapezoid rule on a uniform grid. The kernel jump sits on a grid node,
//! which leaves a smooth `O(h²)` error that shrinks under refinement. `H(Tφ)`
//! then comes from an eighth-order centered difference, and the comparison is
//! restricted to the interior `|q| ≤ 0.95 l`.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::kernel::{KernelEvaluator, PhysicalParams};
use crate::quadrature::{gauss_legendre, GridFunction, QuadratureRule};

/// Fraction of the interval excluded at each end.
pub const BOUNDARY_MARGIN: f64 = 0.05;

/// Polynomial with complex coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self { coeffs }
    }

    pub fn real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::new(Vec::new());
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &[Complex64], i: usize| v.get(i).copied().unwrap_or_default();
        Self::new((0..n).map(|i| get(&self.coeffs, i) + get(&other.coeffs, i)).collect())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// `∫_a^b p(x) dx`, exactly.
    pub fn integral(&self, a: f64, b: f64) -> Complex64 {
        let anti = Self::new(
            std::iter::once(Complex64::new(0.0, 0.0))
                .chain(self.coeffs.iter().enumerate().map(|(k, &c)| c / (k + 1) as f64))
                .collect(),
        );
        anti.eval(b) - anti.eval(a)
    }

    /// `(l² − q²)^k`.
    pub fn bump(l: f64, k: usize) -> Self {
        let base = Self::real(&[l * l, 0.0, -1.0]);
        (0..k).fold(Self::real(&[1.0]), |acc, _| acc.mul(&base))
    }
}

/// A polynomial test vector with its first two derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalTestVector {
    pub phi: Polynomial,
    pub d1: Polynomial,
    pub d2: Polynomial,
}

impl CanonicalTestVector {
    /// Wraps an arbitrary polynomial without checking any domain condition.
    /// Used for probes that deliberately leave the canonical domain.
    pub fn probe(phi: Polynomial) -> Self {
        let d1 = phi.derivative();
        let d2 = d1.derivative();
        Self { phi, d1, d2 }
    }

    /// `φ = g'` for the given antiderivative `g`.
    pub fn from_antiderivative(g: &Polynomial) -> Self {
        Self::probe(g.derivative())
    }

    pub fn eval(&self, q: f64) -> Complex64 {
        self.phi.eval(q)
    }
}

/// Builds `φ = d/dq[(l² − q²)³ h(q)]` and verifies its domain conditions:
/// vanishing values and first derivatives at `±l`, `∫φ = 0`, and for the
/// periodic case also `∫qφ = 0` (which needs `h` odd).
pub fn make_canonical_vector(
    p: &PhysicalParams,
    h: &[f64],
    periodic: bool,
) -> Result<CanonicalTestVector> {
    p.validate()?;
    if h.iter().all(|&c| c == 0.0) {
        return Err(invalid("h", "must be a nonzero polynomial"));
    }
    if periodic && h.iter().step_by(2).any(|&c| c != 0.0) {
        return Err(invalid("h", "must be odd for the periodic canonical domain"));
    }
    let l = p.l;
    let v = CanonicalTestVector::from_antiderivative(&Polynomial::bump(l, 3).mul(&Polynomial::real(h)));
    let scale = v.phi.coeffs().iter().map(|c| c.norm()).fold(1.0, f64::max) * l.powi(7).max(1.0);
    let endpoint = [v.phi.eval(l), v.phi.eval(-l), v.d1.eval(l), v.d1.eval(-l)]
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    if endpoint > 1e-13 * scale {
        return Err(invalid("h", format!("endpoint conditions violated ({endpoint:e})")));
    }
    let rule = gauss_legendre(16)?;
    let integrate = |f: &dyn Fn(f64) -> Complex64| -> Complex64 {
        rule.nodes()
            .iter()
            .zip(rule.weights())
            .map(|(&x, &w)| f(l * x) * (w * l))
            .sum()
    };
    let m0 = integrate(&|q| v.eval(q)).norm();
    if m0 > 1e-12 * scale {
        return Err(invalid("h", format!("integral of phi is {m0:e}, not zero")));
    }
    if periodic {
        let m1 = integrate(&|q| v.eval(q) * q).norm();
        if m1 > 1e-12 * scale {
            return Err(invalid("h", format!("first moment of phi is {m1:e}, not zero")));
        }
    }
    Ok(v)
}

/// `(Tf)(q_i) = Σ_j K(q_i,q_j) w_j f_j` on the nodes of `f`'s rule.
pub fn apply_t(p: &PhysicalParams, f: &GridFunction) -> GridFunction {
    let k = KernelEvaluator::new(p);
    let rule = f.rule();
    let q = rule.nodes();
    let w = rule.weights();
    let v = f.values();
    let out = (0..q.len())
        .into_par_iter()
        .map(|i| (0..q.len()).map(|j| k.eval(q[i], q[j]) * (w[j] * v[j])).sum())
        .collect();
    f.with_values(out)
}

/// `(Tf)(q)` at each node of `rule` for a function known everywhere.
///
/// Each integral is split at `q`, where the kernel jumps, and each side is
/// integrated with `panels` Gauss-Legendre panels of `order` points. The
/// kernel is a low-degree polynomial in `q'` on either side, so the result is
/// as accurate as the integration of `f` itself.
pub fn apply_t_split<F>(
    p: &PhysicalParams,
    f: F,
    rule: Arc<QuadratureRule>,
    panels: usize,
    order: usize,
) -> Result<GridFunction>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    if panels == 0 {
        return Err(invalid("panels", "need at least one panel"));
    }
    let k = KernelEvaluator::new(p);
    let base = gauss_legendre(order)?;
    let l = p.l;
    let side = |a: f64, b: f64, q: f64| -> Complex64 {
        if b <= a {
            return Complex64::new(0.0, 0.0);
        }
        let h = (b - a) / panels as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 0..panels {
            let mid = a + (m as f64 + 0.5) * h;
            for (&x, &w) in base.nodes().iter().zip(base.weights()) {
                let s = mid + 0.5 * h * x;
                acc += k.eval(q, s) * f(s) * (0.5 * h * w);
            }
        }
        acc
    };
    let values = rule
        .nodes()
        .par_iter()
        .map(|&q| side(-l, q, q) + side(q, l, q))
        .collect();
    GridFunction::new(rule, values)
}

/// `Hφ = −(ħ²/2μ) φ''` from the closed-form second derivative.
pub fn apply_h(p: &PhysicalParams, v: &CanonicalTestVector, rule: Arc<QuadratureRule>) -> Result<GridFunction> {
    let c = -p.hbar * p.hbar / (2.0 * p.mu);
    GridFunction::from_fn(rule, |q| v.d2.eval(q) * c)
}

/// Commutator defect `(HT − TH)φ − iħφ` on the interior of a uniform grid.
#[derive(Debug, Clone, Serialize)]
pub struct CommutatorDefect {
    pub q: Vec<f64>,
    pub defect_re: Vec<f64>,
    pub defect_im: Vec<f64>,
    /// `‖defect‖ / ‖iħφ‖` over the interior points.
    pub residual: f64,
}

impl CommutatorDefect {
    pub fn defect(&self) -> Vec<Complex64> {
        self.defect_re
            .iter()
            .zip(&self.defect_im)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect()
    }

    pub fn mean(&self) -> Complex64 {
        let d = self.defect();
        d.iter().sum::<Complex64>() / d.len() as f64
    }

    /// `max |d − mean| / |mean|`: zero for a constant defect.
    pub fn deviation_from_constant(&self) -> f64 {
        let m = self.mean();
        self.defect()
            .iter()
            .map(|d| (d - m).norm())
            .fold(0.0, f64::max)
            / m.norm()
    }
}

// Eighth-order centered second difference.
const D2_STENCIL: [f64; 5] = [-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0];

/// Measures `(HT − TH)φ − iħφ` with `n_fine` trapezoid intervals.
pub fn commutator_defect(
    p: &PhysicalParams,
    v: &CanonicalTestVector,
    n_fine: usize,
) -> Result<CommutatorDefect> {
    p.validate()?;
    if n_fine < 100 {
        return Err(invalid("N_fine", format!("need at least 100 intervals, got {n_fine}")));
    }
    let l = p.l;
    let h = 2.0 * l / n_fine as f64;
    let grid: Vec<f64> = (0..=n_fine).map(|j| -l + j as f64 * h).collect();
    let weights: Vec<f64> = (0..=n_fine)
        .map(|j| if j == 0 || j == n_fine { 0.5 * h } else { h })
        .collect();
    let kin = -p.hbar * p.hbar / (2.0 * p.mu);
    let phi: Vec<Complex64> = grid.iter().map(|&q| v.eval(q)).collect();
    let h_phi: Vec<Complex64> = grid.iter().map(|&q| v.d2.eval(q) * kin).collect();

    let k = KernelEvaluator::new(p);
    let apply = |f: &[Complex64], i: usize| -> Complex64 {
        let qi = grid[i];
        grid.iter()
            .zip(&weights)
            .zip(f)
            .map(|((&qj, &w), &fj)| k.eval(qi, qj) * (w * fj))
            .sum()
    };

    let lo = ((BOUNDARY_MARGIN * 2.0 * l) / h).ceil() as usize;
    let hi = n_fine - lo;
    let half = D2_STENCIL.len() - 1;
    if lo < half {
        return Err(invalid("N_fine", "grid too coarse for the boundary margin"));
    }
    // the image Tφ is needed on the interior plus the stencil half-width
    let image: Vec<Complex64> = ((lo - half)..=(hi + half))
        .into_par_iter()
        .map(|i| apply(&phi, i))
        .collect();
    let rows: Vec<(f64, Complex64, Complex64)> = (lo..=hi)
        .into_par_iter()
        .map(|i| {
            let c = i - (lo - half);
            let mut d2 = image[c] * D2_STENCIL[0];
            for (m, &a) in D2_STENCIL.iter().enumerate().skip(1) {
                d2 += (image[c + m] + image[c - m]) * a;
            }
            let h_t = d2 * (kin / (h * h));
            let t_h = apply(&h_phi, i);
            let target = phi[i] * Complex64::new(0.0, p.hbar);
            (grid[i], h_t - t_h - target, target)
        })
        .collect();
    let num: f64 = rows.iter().map(|r| r.1.norm_sqr()).sum();
    let den: f64 = rows.iter().map(|r| r.2.norm_sqr()).sum();
    if !(den > 0.0) {
        return Err(Error::ZeroNorm);
    }
    let residual = (num / den).sqrt();
    if !residual.is_finite() {
        return Err(Error::NonFinite {
            x: f64::NAN,
            value: residual,
        });
    }
    Ok(CommutatorDefect {
        q: rows.iter().map(|r| r.0).collect(),
        defect_re: rows.iter().map(|r| r.1.re).collect(),
        defect_im: rows.iter().map(|r| r.1.im).collect(),
        residual,
    })
}

/// `‖(HT − TH)φ − iħφ‖ / ‖iħφ‖` over `|q| ≤ 0.95 l`.
pub fn commutator_residual(p: &PhysicalParams, v: &CanonicalTestVector, n_fine: usize) -> Result<f64> {
    Ok(commutator_defect(p, v, n_fine)?.residual)
}

/// Vector with `φ(±l) = 0` but `φ'(±l) ≠ 0`, obeying the boundary condition
/// `φ'(−l) = e^{−2iγ} φ'(l)`: `φ = d/dq[(l² − q²)²(1 + bq)]`.
pub fn boundary_probe(p: &PhysicalParams) -> CanonicalTestVector {
    let e = Complex64::from_polar(1.0, -2.0 * p.gamma);
    let b = (Complex64::new(1.0, 0.0) - e) / (Complex64::new(1.0, 0.0) + e) / p.l;
    let g = Polynomial::bump(p.l, 2).mul(&Polynomial::new(vec![Complex64::new(1.0, 0.0), b]));
    CanonicalTestVector::from_antiderivative(&g)
}

/// Constant defect predicted for [`boundary_probe`] when `γ ≠ 0`:
/// `−ħ l e^{iγ} φ'(−l) / (4 sin γ)`.
pub fn predicted_boundary_defect(p: &PhysicalParams, v: &CanonicalTestVector) -> Complex64 {
    -Complex64::from_polar(p.hbar * p.l, p.gamma) * v.d1.eval(-p.l) / (4.0 * p.gamma.sin())
}

/// Vector outside the canonical domain: `∫φ ≠ 0`.
///
/// For `γ = 0` this is `(l² − q²)³`. For `γ ≠ 0` a moment condition alone is
/// invisible to a pointwise test, so a constant offset is added to a canonical
/// vector, which also breaks the endpoint conditions.
pub fn violation_probe(p: &PhysicalParams) -> Result<CanonicalTestVector> {
    if p.is_periodic() {
        Ok(CanonicalTestVector::probe(Polynomial::bump(p.l, 3)))
    } else {
        let base = make_canonical_vector(p, &[1.0], false)?;
        let offset = Polynomial::real(&[p.l.powi(6)]);
        Ok(CanonicalTestVector::probe(base.phi.add(&offset)))
    }
}
