//! Nystrom discretization of `T_γ` and its numeric spectrum.
//!
//! With Gauss-Legendre nodes `q_i` and weights `w_i` the integral equation
//! becomes `Σ_j K(q_i,q_j) w_j φ_j = τ φ_i`. Conjugating by `diag(√w)` gives
//! the Hermitian matrix `B_ij = √w_i K(q_i,q_j) √w_j` with the same spectrum.
//!
//! The kernel jumps across the diagonal, so eigenvalues converge like `N⁻²`.
//! [`extrapolated_eigenvalues`] removes the leading error term by combining
//! orders `N` and `N/2`.

use std::sync::Arc;

use faer::{Mat, Side};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::kernel::{KernelEvaluator, PhysicalParams};
use crate::quadrature::{gauss_legendre_on, GridFunction, QuadratureRule};

/// Largest Hermiticity defect accepted by [`hermitian_eigen`].
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

/// Sign of an eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// Where a spectrum came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Provenance {
    Numeric,
    Analytic,
}

/// One eigenpair.
#[derive(Debug, Clone)]
pub struct SpectralEntry {
    pub n: usize,
    pub sign: Sign,
    pub tau: f64,
    /// Characteristic root, for analytic entries.
    pub root: Option<f64>,
    pub eigenfunction: GridFunction,
}

/// Eigenpairs of one operator, grouped by sign and ordered by `|τ|` descending.
#[derive(Debug, Clone)]
pub struct SpectralSet {
    pub params: PhysicalParams,
    pub provenance: Provenance,
    pub entries: Vec<SpectralEntry>,
}

impl SpectralSet {
    pub fn with_sign(&self, sign: Sign) -> impl Iterator<Item = &SpectralEntry> {
        self.entries.iter().filter(move |e| e.sign == sign)
    }

    pub fn taus(&self, sign: Sign) -> Vec<f64> {
        self.with_sign(sign).map(|e| e.tau).collect()
    }

    pub fn get(&self, n: usize, sign: Sign) -> Option<&SpectralEntry> {
        self.entries.iter().find(|e| e.n == n && e.sign == sign)
    }
}

/// `B_ij = √w_i K(q_i,q_j) √w_j` on an `N`-point rule.
#[derive(Debug, Clone)]
pub struct DiscretizedOperator {
    pub params: PhysicalParams,
    pub rule: Arc<QuadratureRule>,
    pub matrix: Mat<Complex64>,
}

impl DiscretizedOperator {
    pub fn order(&self) -> usize {
        self.rule.order()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.matrix)
    }

    /// Applies the symmetrized matrix to a vector.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.order();
        (0..n)
            .into_par_iter()
            .map(|i| (0..n).map(|j| self.matrix[(i, j)] * v[j]).sum())
            .collect()
    }
}

/// Assembles the symmetrized Nystrom matrix.
pub fn discretize(p: &PhysicalParams, n: usize) -> Result<DiscretizedOperator> {
    p.validate()?;
    if n < 2 {
        return Err(invalid("N", format!("need at least 2 nodes, got {n}")));
    }
    let rule = Arc::new(gauss_legendre_on(n, p.l)?);
    Ok(discretize_on(p, rule))
}

/// Assembles the symmetrized matrix on an existing rule.
pub fn discretize_on(p: &PhysicalParams, rule: Arc<QuadratureRule>) -> DiscretizedOperator {
    let n = rule.order();
    let k = KernelEvaluator::new(p);
    let q = rule.nodes();
    let sw: Vec<f64> = rule.weights().iter().map(|w| w.sqrt()).collect();
    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|i| (0..n).map(|j| k.eval(q[i], q[j]) * (sw[i] * sw[j])).collect())
        .collect();
    let matrix = Mat::from_fn(n, n, |i, j| rows[i][j]);
    DiscretizedOperator {
        params: *p,
        rule,
        matrix,
    }
}

/// `max |A_ij − conj(A_ji)|`.
pub fn hermiticity_defect(a: &Mat<Complex64>) -> f64 {
    let n = a.nrows();
    let mut d = 0.0f64;
    for i in 0..n {
        for j in 0..=i {
            d = d.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    d
}

fn check_square_hermitian(a: &Mat<Complex64>) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(invalid(
            "matrix",
            format!("not square: {}x{}", a.nrows(), a.ncols()),
        ));
    }
    let defect = hermiticity_defect(a);
    let scale = a.norm_max().max(1.0);
    if !(defect <= HERMITIAN_TOLERANCE * scale) {
        return Err(Error::NotHermitian { defect });
    }
    Ok(())
}

/// Eigenvalues in ascending order and the matching orthonormal eigenvectors
/// (columns).
pub fn hermitian_eigen(a: &Mat<Complex64>) -> Result<(Vec<f64>, Mat<Complex64>)> {
    check_square_hermitian(a)?;
    let eig = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::EigenNoConvergence {
            detail: format!("{e:?}"),
        })?;
    let s = eig.S().column_vector();
    let values: Vec<f64> = (0..a.nrows()).map(|i| s[i].re).collect();
    Ok((values, eig.U().to_owned()))
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues(a: &Mat<Complex64>) -> Result<Vec<f64>> {
    check_square_hermitian(a)?;
    let mut v: Vec<f64> = a
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::EigenNoConvergence {
            detail: format!("{e:?}"),
        })?;
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// The `m` largest positive and `m` most negative eigenvalues, each ordered by
/// decreasing magnitude.
fn split_top(values: &[f64], m: usize) -> (Vec<f64>, Vec<f64>) {
    let plus = values.iter().rev().take(m).copied().collect();
    let minus = values.iter().take(m).copied().collect();
    (plus, minus)
}

/// Top `m` eigenpairs of each sign, as sampled wavefunctions.
pub fn numeric_spectrum(p: &PhysicalParams, n: usize, m: usize) -> Result<SpectralSet> {
    if m == 0 || 2 * m > n {
        return Err(invalid("count", format!("need 1 <= 2m <= N, got m={m}, N={n}")));
    }
    let op = discretize(p, n)?;
    let (values, vectors) = hermitian_eigen(&op.matrix)?;
    let sw: Vec<f64> = op.rule.weights().iter().map(|w| w.sqrt()).collect();
    let mut entries = Vec::with_capacity(2 * m);
    let columns = (0..m)
        .map(|k| (k + 1, Sign::Plus, n - 1 - k))
        .chain((0..m).map(|k| (k + 1, Sign::Minus, k)));
    for (idx, sign, col) in columns {
        let samples: Vec<Complex64> = (0..n).map(|i| vectors[(i, col)] / sw[i]).collect();
        let f = GridFunction::new(op.rule.clone(), samples)?.normalized()?;
        entries.push(SpectralEntry {
            n: idx,
            sign,
            tau: values[col],
            root: None,
            eigenfunction: f,
        });
    }
    Ok(SpectralSet {
        params: *p,
        provenance: Provenance::Numeric,
        entries,
    })
}

/// Top-`m` eigenvalues of each sign at order `n`, ordered by magnitude.
pub fn numeric_eigenvalues(p: &PhysicalParams, n: usize, m: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let op = discretize(p, n)?;
    let values = hermitian_eigenvalues(&op.matrix)?;
    Ok(split_top(&values, m.min(n / 2)))
}

/// Richardson-extrapolated eigenvalues `(4τ_N − τ_{N/2})/3`, cancelling the
/// leading `N⁻²` discretization error.
pub fn extrapolated_eigenvalues(
    p: &PhysicalParams,
    n: usize,
    m: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if n < 4 || n % 2 != 0 {
        return Err(invalid("N", format!("need an even order >= 4, got {n}")));
    }
    let (fine_p, fine_m) = numeric_eigenvalues(p, n, m)?;
    let (coarse_p, coarse_m) = numeric_eigenvalues(p, n / 2, m)?;
    let combine = |f: &[f64], c: &[f64]| -> Vec<f64> {
        f.iter().zip(c).map(|(a, b)| (4.0 * a - b) / 3.0).collect()
    };
    Ok((combine(&fine_p, &coarse_p), combine(&fine_m, &coarse_m)))
}
