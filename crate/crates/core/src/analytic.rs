//! Closed-form eigenvalues and eigenfunctions of `T_γ`.
//!
//! With `x = r q²/l²` the positive-eigenvalue eigenfunctions are built from two
//! Bessel blocks,
//!
//! ```text
//! even(q) = e^{−ix} (4x)^{3/4} [J_{−3/4}(x) − i J_{1/4}(x)]
//! odd(q)  = q e^{−ix} (4x)^{1/4} [J_{−1/4}(x) − i J_{3/4}(x)]
//! ```
//!
//! and the root `r` of a characteristic function fixes `τ = μl²/(4ħr)`.
//! Negative eigenvalues come from the symmetry maps: `φ⁻(q) = φ⁺(−q)*` in
//! general and `φ⁻(q) = φ⁺(q)*` for `γ ∈ {0, π/2}`.
//!
//! The blocks are evaluated through the scaled functions `(x/2)^{−ν} J_ν(x)`,
//! which removes the apparent singularity at `q = 0`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::evolution::{project, PlaneWaveBasis};
use crate::kernel::PhysicalParams;
use crate::nystrom::{Provenance, Sign, SpectralEntry, SpectralSet};
use crate::quadrature::{gauss_legendre_on, GridFunction, QuadratureRule};
use crate::specfun::{bessel_j, bessel_j_scaled, find_roots, BesselOrder, DEFAULT_SCAN_STEP};

use BesselOrder::{FiveQuarters, MinusQuarter, MinusThreeQuarters, Quarter, ThreeQuarters};

/// Which characteristic equation governs a family of eigenfunctions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum CharacteristicCase {
    /// `γ ∉ {0, π/2}`: one family mixing both parities.
    General(f64),
    AntiperiodicEven,
    AntiperiodicOdd,
    PeriodicOdd,
    PeriodicEven,
}

/// Parity of a family in the special cases `γ ∈ {0, π/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Parity {
    Even,
    Odd,
}

impl CharacteristicCase {
    /// Families for the given boundary phase, in no particular order.
    pub fn families(p: &PhysicalParams) -> Vec<CharacteristicCase> {
        if p.gamma == 0.0 {
            vec![Self::PeriodicOdd, Self::PeriodicEven]
        } else if is_antiperiodic(p.gamma) {
            vec![Self::AntiperiodicEven, Self::AntiperiodicOdd]
        } else {
            vec![Self::General(p.gamma)]
        }
    }

    /// Family of a given parity; `None` in the general case where parity is mixed.
    pub fn with_parity(p: &PhysicalParams, parity: Parity) -> Option<CharacteristicCase> {
        match (p.gamma == 0.0, is_antiperiodic(p.gamma), parity) {
            (true, _, Parity::Even) => Some(Self::PeriodicEven),
            (true, _, Parity::Odd) => Some(Self::PeriodicOdd),
            (_, true, Parity::Even) => Some(Self::AntiperiodicEven),
            (_, true, Parity::Odd) => Some(Self::AntiperiodicOdd),
            _ => None,
        }
    }

    pub fn parity(&self) -> Option<Parity> {
        match self {
            Self::General(_) => None,
            Self::AntiperiodicEven | Self::PeriodicEven => Some(Parity::Even),
            Self::AntiperiodicOdd | Self::PeriodicOdd => Some(Parity::Odd),
        }
    }

    /// Negative eigenfunctions need only conjugation (no reflection).
    fn conjugation_only(&self) -> bool {
        !matches!(self, Self::General(_))
    }

    fn validate(&self) -> Result<()> {
        if let Self::General(g) = *self {
            if !g.is_finite() || g.sin() == 0.0 || is_antiperiodic(g) {
                return Err(invalid(
                    "case",
                    format!("general case needs sin and cos of gamma nonzero, got {g}"),
                ));
            }
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        match self {
            Self::General(g) => format!("general({g})"),
            Self::AntiperiodicEven => "antiperiodic_even".into(),
            Self::AntiperiodicOdd => "antiperiodic_odd".into(),
            Self::PeriodicOdd => "periodic_odd".into(),
            Self::PeriodicEven => "periodic_even".into(),
        }
    }
}

fn is_antiperiodic(gamma: f64) -> bool {
    (gamma.abs() - FRAC_PI_2).abs() < 1e-12
}

fn j(order: BesselOrder, x: f64) -> f64 {
    bessel_j(order, x).unwrap_or(f64::NAN)
}

/// Characteristic function whose positive roots are the `r_n`.
///
/// The general case is divided by `1 + cot²γ`, which keeps it bounded for
/// small `γ` without changing its sign.
pub fn characteristic_fn(case: CharacteristicCase, x: f64) -> Result<f64> {
    case.validate()?;
    if !(x > 0.0) {
        return Err(invalid("x", format!("must be positive, got {x}")));
    }
    let v = match case {
        CharacteristicCase::General(g) => {
            let (s, c) = g.sin_cos();
            s * s * j(MinusThreeQuarters, x) * j(MinusQuarter, x)
                - c * c * j(ThreeQuarters, x) * j(Quarter, x)
        }
        CharacteristicCase::AntiperiodicEven => j(MinusThreeQuarters, x),
        CharacteristicCase::AntiperiodicOdd | CharacteristicCase::PeriodicOdd => {
            j(MinusQuarter, x)
        }
        CharacteristicCase::PeriodicEven => {
            j(MinusThreeQuarters, x) + 2.0 / 3.0 * j(FiveQuarters, x) + j(Quarter, x) / x
        }
    };
    Ok(v)
}

/// One analytic eigenvalue pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenvalueRow {
    pub n: usize,
    pub root: f64,
    pub tau_plus: f64,
    pub tau_minus: f64,
}

/// First `count` roots of the characteristic function.
pub fn characteristic_roots(case: CharacteristicCase, count: usize) -> Result<Vec<f64>> {
    case.validate()?;
    if count == 0 {
        return Err(invalid("count", "must be at least 1"));
    }
    let mut x_max = (count as f64 + 2.0) * PI;
    loop {
        let found = find_roots(
            |x| characteristic_fn(case, x).unwrap_or(f64::NAN),
            x_max,
            DEFAULT_SCAN_STEP,
        )?;
        if found.len() >= count {
            return Ok(found.roots[..count].to_vec());
        }
        if x_max > 1e5 {
            return Err(Error::MissingRoots {
                requested: count,
                found: found.len(),
                x_max,
            });
        }
        x_max *= 2.0;
    }
}

/// First `count` eigenvalue pairs `τ± = ±μl²/(4ħr_n)` of one family.
pub fn eigenvalues(
    p: &PhysicalParams,
    case: CharacteristicCase,
    count: usize,
) -> Result<Vec<EigenvalueRow>> {
    let scale = p.tau_scale();
    Ok(characteristic_roots(case, count)?
        .into_iter()
        .enumerate()
        .map(|(i, r)| EigenvalueRow {
            n: i + 1,
            root: r,
            tau_plus: scale / r,
            tau_minus: -scale / r,
        })
        .collect())
}

/// Eigenvalue pairs of every family merged and renumbered by `|τ|` descending.
pub fn merged_eigenvalues(p: &PhysicalParams, count: usize) -> Result<Vec<(CharacteristicCase, EigenvalueRow)>> {
    let mut all = Vec::new();
    for case in CharacteristicCase::families(p) {
        for row in eigenvalues(p, case, count)? {
            all.push((case, row));
        }
    }
    all.sort_by(|a, b| a.1.root.total_cmp(&b.1.root));
    all.truncate(count);
    for (i, (_, row)) in all.iter_mut().enumerate() {
        row.n = i + 1;
    }
    Ok(all)
}

/// A closed-form eigenfunction `φ^s_n` with its eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticEigenfunction {
    pub params: PhysicalParams,
    pub case: CharacteristicCase,
    pub n: usize,
    pub sign: Sign,
    pub root: f64,
    pub tau: f64,
    even_coeff: Complex64,
    odd_coeff: Complex64,
    constant: Complex64,
}

impl AnalyticEigenfunction {
    /// Builds the eigenfunction attached to an already known root.
    pub fn from_root(
        p: &PhysicalParams,
        case: CharacteristicCase,
        n: usize,
        root: f64,
        sign: Sign,
    ) -> Result<Self> {
        case.validate()?;
        if !(root > 0.0) {
            return Err(invalid("root", format!("must be positive, got {root}")));
        }
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let (even_coeff, odd_coeff, constant) = match case {
            CharacteristicCase::General(g) => {
                let (even, odd) = general_coefficients(g, root, p.l);
                (Complex64::new(even, 0.0), Complex64::new(odd, 0.0), zero)
            }
            CharacteristicCase::AntiperiodicEven => (one, zero, zero),
            CharacteristicCase::AntiperiodicOdd | CharacteristicCase::PeriodicOdd => {
                (zero, one, zero)
            }
            CharacteristicCase::PeriodicEven => {
                let c = 4.0 * (4.0 * root).powf(-0.25) * j(Quarter, root);
                (one, zero, Complex64::from_polar(c, -root))
            }
        };
        Ok(Self {
            params: *p,
            case,
            n,
            sign,
            root,
            tau: sign.factor() * p.tau_scale() / root,
            even_coeff,
            odd_coeff,
            constant,
        })
    }

    /// Value of the (unnormalized) eigenfunction at `q`.
    pub fn eval(&self, q: f64) -> Complex64 {
        match self.sign {
            Sign::Plus => self.eval_plus(q),
            Sign::Minus if self.case.conjugation_only() => self.eval_plus(q).conj(),
            Sign::Minus => self.eval_plus(-q).conj(),
        }
    }

    fn eval_plus(&self, q: f64) -> Complex64 {
        let l = self.params.l;
        let x = self.root * q * q / (l * l);
        let phase = Complex64::from_polar(1.0, -x);
        let s = |o| bessel_j_scaled(o, x).unwrap_or(f64::NAN);
        let mut v = self.constant;
        if self.even_coeff != Complex64::new(0.0, 0.0) {
            // (4x)^{3/4} J_{−3/4} = 8^{3/4} S_{−3/4},  (4x)^{3/4} J_{1/4} = 2^{5/4} x S_{1/4}
            let block = Complex64::new(
                8f64.powf(0.75) * s(MinusThreeQuarters),
                -(2f64.powf(1.25) * x * s(Quarter)),
            );
            v += self.even_coeff * phase * block;
        }
        if self.odd_coeff != Complex64::new(0.0, 0.0) {
            // (4x)^{1/4} J_{−1/4} = 8^{1/4} S_{−1/4},  (4x)^{1/4} J_{3/4} = 2^{−1/4} x S_{3/4}
            let block = Complex64::new(
                8f64.powf(0.25) * s(MinusQuarter),
                -(2f64.powf(-0.25) * x * s(ThreeQuarters)),
            );
            v += self.odd_coeff * phase * block * q;
        }
        v
    }

    /// Samples on `rule`, without normalization.
    pub fn sample(&self, rule: Arc<QuadratureRule>) -> Result<GridFunction> {
        GridFunction::from_fn(rule, |q| self.eval(q))
    }

    /// Samples on `rule` and scales to unit norm with the largest sample real
    /// and positive.
    pub fn normalize(&self, rule: Arc<QuadratureRule>) -> Result<GridFunction> {
        self.sample(rule)?.normalized()
    }
}

/// Even and odd block weights for general `γ`, from the two boundary
/// conditions. Each row of the 2×2 boundary system gives a null vector; the
/// better conditioned one is kept and everything is multiplied by `sin γ` so
/// that small `γ` does not overflow.
fn general_coefficients(gamma: f64, r: f64, l: f64) -> (f64, f64) {
    let (s, c) = gamma.sin_cos();
    let (jm34, jm14, j14, j34) = (
        j(MinusThreeQuarters, r),
        j(MinusQuarter, r),
        j(Quarter, r),
        j(ThreeQuarters, r),
    );
    let two_sqrt_r = 2.0 * r.sqrt();
    let first = (l * (s * jm14 + c * j34), -two_sqrt_r * (s * jm34 + c * j14));
    let second = (l * (s * jm14 - c * j34), two_sqrt_r * (s * jm34 - c * j14));
    let size = |p: (f64, f64)| p.0.hypot(p.1);
    if size(first) >= size(second) {
        first
    } else {
        second
    }
}

/// `φ^s_n` of one family; `n` counts from 1.
pub fn eigenfunction(
    p: &PhysicalParams,
    case: CharacteristicCase,
    n: usize,
    sign: Sign,
) -> Result<AnalyticEigenfunction> {
    if n == 0 {
        return Err(invalid("n", "indices start at 1"));
    }
    let roots = characteristic_roots(case, n)?;
    AnalyticEigenfunction::from_root(p, case, n, roots[n - 1], sign)
}

/// `(Πφ)(q) = φ(−q)` on a symmetric grid: reverses the samples.
pub fn parity(f: &GridFunction) -> GridFunction {
    let mut v = f.values().to_vec();
    v.reverse();
    f.with_values(v)
}

/// `(Θφ)(q) = φ(q)*` at `t = 0`.
pub fn time_reverse(f: &GridFunction) -> GridFunction {
    f.map_values(|v| v.conj())
}

/// Analytic spectrum of `T_γ` with `count` entries per sign, merged across
/// families and normalized on `rule`.
pub fn analytic_spectrum(
    p: &PhysicalParams,
    count: usize,
    rule: Arc<QuadratureRule>,
) -> Result<SpectralSet> {
    p.validate()?;
    let rows = merged_eigenvalues(p, count)?;
    let mut entries = Vec::with_capacity(2 * count);
    for sign in [Sign::Plus, Sign::Minus] {
        for (case, row) in &rows {
            let ef = AnalyticEigenfunction::from_root(p, *case, row.n, row.root, sign)?;
            entries.push(SpectralEntry {
                n: row.n,
                sign,
                tau: ef.tau,
                root: Some(row.root),
                eigenfunction: ef.normalize(rule.clone())?,
            });
        }
    }
    Ok(SpectralSet {
        params: *p,
        provenance: Provenance::Analytic,
        entries,
    })
}

/// Which density identity a residual refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    /// `|φ⁺(q)|² = |φ⁻(−q)|²`, `|φ⁺(k)|² = |φ⁻(k)|²`.
    Mirror,
    /// `|φ⁺_{−γ}(q)|² = |φ⁻_γ(q)|²`, `|φ⁺_{−γ}(k)|² = |φ⁻_γ(−k)|²`.
    Reversal,
    /// `|φ^±_{−γ}(q)|² = |φ^±_γ(−q)|²`, `|φ^±_{−γ}(k)|² = |φ^±_γ(−k)|²`.
    Reflection,
    /// `|φ⁺(q)|² = |φ⁻(q)|²` and likewise in momentum, for `γ ∈ {0, π/2}`.
    Overlap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Representation {
    Position,
    Momentum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymmetryResidual {
    pub n: usize,
    pub relation: Relation,
    pub representation: Representation,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetryReport {
    pub gamma: f64,
    pub rows: Vec<SymmetryResidual>,
}

impl SymmetryReport {
    pub fn max(&self, relation: Relation) -> Option<f64> {
        self.rows
            .iter()
            .filter(|r| r.relation == relation)
            .map(|r| r.residual)
            .reduce(f64::max)
    }

    pub fn max_overall(&self) -> f64 {
        self.rows.iter().map(|r| r.residual).fold(0.0, f64::max)
    }
}

/// Bound on the parity and time-reversal residuals.
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

/// Grid used by [`symmetry_report`] and the mode cutoff for its momentum checks.
const REPORT_ORDER: usize = 400;
const REPORT_MODES: usize = 60;

/// Density identities for the first `count` eigenfunctions of `T_γ`.
///
/// The `−γ` eigenfunctions are built directly from the closed form at `−γ`
/// (or the equivalent phase `π/2` when `γ = π/2`), not from the symmetry maps,
/// so the reversal and reflection rows compare independent constructions.
pub fn symmetry_report(p: &PhysicalParams, count: usize) -> Result<SymmetryReport> {
    p.validate()?;
    let rule = Arc::new(gauss_legendre_on(REPORT_ORDER, p.l)?);
    let mirror_gamma = if is_antiperiodic(p.gamma) { FRAC_PI_2 } else { -p.gamma };
    let pm = p.with_gamma(mirror_gamma);
    let here = merged_eigenvalues(p, count)?;
    let there = merged_eigenvalues(&pm, count)?;
    let basis = PlaneWaveBasis::new(*p, REPORT_MODES)?;
    let basis_m = PlaneWaveBasis::new(pm, REPORT_MODES)?;
    let special = CharacteristicCase::families(p)[0].conjugation_only();

    let mut rows = Vec::new();
    for ((case, row), (case_m, row_m)) in here.iter().zip(&there) {
        let build = |pp: &PhysicalParams, c: CharacteristicCase, r: &EigenvalueRow, s: Sign| {
            AnalyticEigenfunction::from_root(pp, c, r.n, r.root, s)?.normalize(rule.clone())
        };
        let plus = build(p, *case, row, Sign::Plus)?;
        let minus = build(p, *case, row, Sign::Minus)?;
        let plus_m = build(&pm, *case_m, row_m, Sign::Plus)?;
        let minus_m = build(&pm, *case_m, row_m, Sign::Minus)?;

        let k_plus = momentum_density(&plus, &basis)?;
        let k_minus = momentum_density(&minus, &basis)?;
        let k_plus_m = momentum_density(&plus_m, &basis_m)?;
        let k_minus_m = momentum_density(&minus_m, &basis_m)?;
        // k ↦ −k in the γ basis lands on the mode −k − 2γ/π of the −γ basis for
        // γ = π/2, and on −k otherwise.
        let shift = if is_antiperiodic(p.gamma) { 1 } else { 0 };

        let mut push = |relation, representation, residual| {
            rows.push(SymmetryResidual {
                n: row.n,
                relation,
                representation,
                residual,
            })
        };
        use Relation::*;
        use Representation::*;
        push(Mirror, Position, max_diff(&plus.density(), &parity(&minus).density()));
        push(Mirror, Momentum, max_diff(&k_plus, &k_minus));
        push(Reversal, Position, max_diff(&plus_m.density(), &minus.density()));
        push(Reversal, Momentum, max_diff(&k_plus_m, &reflect(&k_minus, shift)));
        let refl_q = max_diff(&plus_m.density(), &parity(&plus).density())
            .max(max_diff(&minus_m.density(), &parity(&minus).density()));
        let refl_k = max_diff(&k_plus_m, &reflect(&k_plus, shift))
            .max(max_diff(&k_minus_m, &reflect(&k_minus, shift)));
        push(Reflection, Position, refl_q);
        push(Reflection, Momentum, refl_k);
        if special {
            push(Overlap, Position, max_diff(&plus.density(), &minus.density()));
            push(Overlap, Momentum, max_diff(&k_plus, &k_minus));
        }
    }
    Ok(SymmetryReport {
        gamma: p.gamma,
        rows,
    })
}

fn momentum_density(f: &GridFunction, basis: &PlaneWaveBasis) -> Result<Vec<f64>> {
    Ok(project(f, basis)?.coeffs().iter().map(|b| b.norm_sqr()).collect())
}

/// Maps the density over `k = −K..K` to the density at `−k − shift`. Modes
/// that leave the window become NaN and are skipped by [`max_diff`].
fn reflect(d: &[f64], shift: usize) -> Vec<f64> {
    let m = d.len();
    let mut out = vec![f64::NAN; m];
    for (i, slot) in out.iter_mut().enumerate() {
        // index i ↔ k = i − K; target index of −k − shift is (m−1−i) − shift
        if let Some(src) = (m - 1 - i).checked_sub(shift) {
            *slot = d[src];
        }
    }
    out
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
