//! Unitary evolution in the plane-wave eigenbasis of `H_γ` and the position
//! moments that locate the arrival of an eigenfunction.
//!
//! The basis is `φ_k(q) = e^{i(γ+kπ)q/l}/√(2l)` with energies
//! `E_k = ħ²(γ+kπ)²/(2μl²)`, truncated to `k = −K..K`. Moments are evaluated
//! in coefficient space with the exact matrices of `q` and `q²`, which are
//! Toeplitz, so each time step costs one autocorrelation of the coefficients.

use std::f64::consts::PI;
use std::sync::Arc;

use faer::Mat;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::kernel::PhysicalParams;
use crate::quadrature::{GridFunction, QuadratureRule};

/// Modes `k = −K..K` of `H_γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWaveBasis {
    params: PhysicalParams,
    k_max: usize,
}

impl PlaneWaveBasis {
    pub fn new(params: PhysicalParams, k_max: usize) -> Result<Self> {
        params.validate()?;
        Ok(Self { params, k_max })
    }

    /// Basis with `modes` functions; `modes` must be odd.
    pub fn with_modes(params: PhysicalParams, modes: usize) -> Result<Self> {
        if modes % 2 == 0 {
            return Err(invalid("modes", format!("must be odd, got {modes}")));
        }
        Self::new(params, modes / 2)
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn mode_count(&self) -> usize {
        2 * self.k_max + 1
    }

    /// Mode number of the `i`-th coefficient.
    pub fn mode(&self, i: usize) -> i64 {
        i as i64 - self.k_max as i64
    }

    pub fn wavenumber(&self, k: i64) -> f64 {
        (self.params.gamma + k as f64 * PI) / self.params.l
    }

    pub fn energy(&self, k: i64) -> f64 {
        let p = &self.params;
        let hk = p.hbar * self.wavenumber(k);
        hk * hk / (2.0 * p.mu)
    }

    pub fn eval(&self, k: i64, q: f64) -> Complex64 {
        Complex64::from_polar((2.0 * self.params.l).sqrt().recip(), self.wavenumber(k) * q)
    }
}

/// Coefficients `b_k(t)` over a plane-wave basis.
#[derive(Debug, Clone)]
pub struct FourierState {
    basis: PlaneWaveBasis,
    coeffs: Vec<Complex64>,
    time: f64,
    captured: f64,
}

impl FourierState {
    /// State with explicitly given coefficients at `t = 0`.
    pub fn new(basis: PlaneWaveBasis, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != basis.mode_count() {
            return Err(invalid(
                "coeffs",
                format!("{} coefficients for {} modes", coeffs.len(), basis.mode_count()),
            ));
        }
        Ok(Self {
            basis,
            coeffs,
            time: 0.0,
            captured: 1.0,
        })
    }

    pub fn basis(&self) -> &PlaneWaveBasis {
        &self.basis
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: i64) -> Option<Complex64> {
        let i = k + self.basis.k_max as i64;
        (0..self.coeffs.len() as i64)
            .contains(&i)
            .then(|| self.coeffs[i as usize])
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// `Σ|b_k|² / ‖f‖²` at projection time.
    pub fn captured_fraction(&self) -> f64 {
        self.captured
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|b| b.norm_sqr()).sum()
    }

    pub fn energies(&self) -> Vec<f64> {
        (0..self.coeffs.len())
            .map(|i| self.basis.energy(self.basis.mode(i)))
            .collect()
    }
}

/// `b_k = ∫ φ_k* f dq` by quadrature.
///
/// The rule must have at least `4K` nodes so that the fastest mode is resolved.
pub fn project(f: &GridFunction, basis: &PlaneWaveBasis) -> Result<FourierState> {
    let rule = f.rule();
    let needed = 4 * basis.k_max;
    if rule.order() < needed {
        return Err(Error::UnderResolved {
            order: rule.order(),
            modes: basis.mode_count(),
            needed,
        });
    }
    let nodes = rule.nodes();
    let weights = rule.weights();
    let values = f.values();
    let coeffs: Vec<Complex64> = (0..basis.mode_count())
        .into_par_iter()
        .map(|i| {
            let k = basis.mode(i);
            nodes
                .iter()
                .zip(weights)
                .zip(values)
                .map(|((&q, &w), &v)| basis.eval(k, q).conj() * v * w)
                .sum()
        })
        .collect();
    let norm = f.norm_sqr();
    if !(norm > 0.0) {
        return Err(Error::ZeroNorm);
    }
    let captured = coeffs.iter().map(|b| b.norm_sqr()).sum::<f64>() / norm;
    Ok(FourierState {
        basis: *basis,
        coeffs,
        time: 0.0,
        captured,
    })
}

/// `b_k(t) = e^{−iE_k t/ħ} b_k`, measured from the state's current time.
pub fn evolve(state: &FourierState, t: f64) -> FourierState {
    let hbar = state.basis.params.hbar;
    let coeffs = state
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, b)| b * Complex64::from_polar(1.0, -state.basis.energy(state.basis.mode(i)) * t / hbar))
        .collect();
    FourierState {
        coeffs,
        time: state.time + t,
        ..state.clone()
    }
}

/// `φ(q) = Σ_k b_k φ_k(q)` at an arbitrary point.
pub fn evaluate(state: &FourierState, q: f64) -> Complex64 {
    let b = &state.basis;
    let l = b.params.l;
    let carrier = Complex64::from_polar((2.0 * l).sqrt().recip(), b.params.gamma * q / l);
    let step = Complex64::from_polar(1.0, PI * q / l);
    let mut wave = Complex64::from_polar(1.0, -(b.k_max as f64) * PI * q / l);
    let mut sum = Complex64::new(0.0, 0.0);
    for c in &state.coeffs {
        sum += c * wave;
        wave *= step;
    }
    carrier * sum
}

/// Samples the truncated series on the nodes of `rule`.
pub fn reconstruct(state: &FourierState, rule: Arc<QuadratureRule>) -> Result<GridFunction> {
    let values = rule.nodes().par_iter().map(|&q| evaluate(state, q)).collect();
    GridFunction::new(rule, values)
}

/// `⟨φ_k|q|φ_{k'}⟩` and `⟨φ_k|q²|φ_{k'}⟩` as functions of `Δ = k' − k`.
fn moment_diagonals(l: f64, k_max: usize) -> (Vec<Complex64>, Vec<f64>) {
    let m = 2 * k_max + 1;
    let mut q1 = vec![Complex64::new(0.0, 0.0); m];
    let mut q2 = vec![0.0; m];
    q2[0] = l * l / 3.0;
    for d in 1..m {
        let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
        let df = d as f64;
        q1[d] = Complex64::new(0.0, -l * sign / (PI * df));
        q2[d] = 2.0 * l * l * sign / (PI * PI * df * df);
    }
    (q1, q2)
}

/// Dense matrices of `q` and `q²` in the basis; both Hermitian and independent
/// of `γ`.
pub fn moment_matrices(basis: &PlaneWaveBasis) -> (Mat<Complex64>, Mat<Complex64>) {
    let m = basis.mode_count();
    let (d1, d2) = moment_diagonals(basis.params.l, basis.k_max);
    let q = Mat::from_fn(m, m, |r, c| {
        if c >= r {
            d1[c - r]
        } else {
            d1[r - c].conj()
        }
    });
    let q2 = Mat::from_fn(m, m, |r, c| Complex64::new(d2[r.abs_diff(c)], 0.0));
    (q, q2)
}

/// Precomputed Toeplitz data for repeated moment evaluation.
struct MomentKernel {
    q1: Vec<Complex64>,
    q2: Vec<f64>,
}

impl MomentKernel {
    fn new(basis: &PlaneWaveBasis) -> Self {
        let (q1, q2) = moment_diagonals(basis.params.l, basis.k_max);
        Self { q1, q2 }
    }

    /// Normalized `(⟨q⟩, ⟨q²⟩ − ⟨q⟩²)`.
    fn moments(&self, b: &[Complex64]) -> (f64, f64) {
        let m = b.len();
        let mut norm = 0.0;
        let mut first = 0.0;
        let mut second = 0.0;
        for d in 0..m {
            let c: Complex64 = (0..m - d).map(|k| b[k].conj() * b[k + d]).sum();
            if d == 0 {
                norm = c.re;
                second += self.q2[0] * c.re;
            } else {
                first += 2.0 * (self.q1[d] * c).re;
                second += 2.0 * self.q2[d] * c.re;
            }
        }
        let mean = first / norm;
        (mean, second / norm - mean * mean)
    }
}

/// `(⟨q⟩, σ²)` of the state, normalized by `Σ|b_k|²`.
pub fn moments(state: &FourierState) -> (f64, f64) {
    MomentKernel::new(&state.basis).moments(&state.coeffs)
}

/// Moments along a uniform time grid.
#[derive(Debug, Clone, Serialize)]
pub struct EvolutionTrace {
    pub times: Vec<f64>,
    pub mean_q: Vec<f64>,
    pub var_q: Vec<f64>,
    pub t_min: f64,
    pub var_min: f64,
    /// Fraction of the initial norm captured by the truncated basis.
    pub captured: f64,
}

/// Moments at one instant, obtained by linear interpolation on a trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Arrival {
    pub tau: f64,
    pub mean_at_tau: f64,
    pub var_at_tau: f64,
    pub t_min: f64,
    pub var_min: f64,
}

impl EvolutionTrace {
    /// Linear interpolation between the two samples bracketing `t`. Traces
    /// may run backwards in time.
    pub fn interpolate(&self, t: f64) -> Option<(f64, f64)> {
        let first = *self.times.first()?;
        let last = *self.times.last()?;
        if !(t >= first.min(last) && t <= first.max(last)) {
            return None;
        }
        let dt = if self.times.len() > 1 {
            self.times[1] - self.times[0]
        } else {
            return Some((self.mean_q[0], self.var_q[0]));
        };
        let i = (((t - first) / dt).floor().max(0.0) as usize).min(self.times.len() - 2);
        let w = (t - self.times[i]) / dt;
        let lerp = |v: &[f64]| v[i] + w * (v[i + 1] - v[i]);
        Some((lerp(&self.mean_q), lerp(&self.var_q)))
    }

    /// Summary at a given eigenvalue.
    pub fn arrival(&self, tau: f64) -> Option<Arrival> {
        let (mean_at_tau, var_at_tau) = self.interpolate(tau)?;
        Some(Arrival {
            tau,
            mean_at_tau,
            var_at_tau,
            t_min: self.t_min,
            var_min: self.var_min,
        })
    }

    /// True when `σ²` falls monotonically to its minimum and rises after it,
    /// up to time `until`.
    pub fn has_single_dip(&self, until: f64) -> bool {
        let end = self.times.iter().take_while(|&&t| t <= until).count();
        let v = &self.var_q[..end.max(1)];
        let i = v
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map_or(0, |(i, _)| i);
        v[..=i].windows(2).all(|w| w[1] <= w[0]) && v[i..].windows(2).all(|w| w[1] >= w[0])
    }
}

/// Moments of an evolving state at `t = 0, dt, 2dt, … ≤ t_end`.
///
/// `t_end` and `dt` may be negative to evolve backwards.
pub fn trace_state(state: &FourierState, t_end: f64, dt: f64) -> Result<EvolutionTrace> {
    if !(dt != 0.0 && dt.is_finite() && t_end.is_finite()) || (t_end / dt) < 0.0 {
        return Err(invalid(
            "dt",
            format!("need a finite step with the sign of t_end, got dt={dt}, t_end={t_end}"),
        ));
    }
    let steps = (t_end / dt + 1e-9).floor() as usize;
    let kernel = MomentKernel::new(&state.basis);
    let energies = state.energies();
    let hbar = state.basis.params.hbar;
    let rows: Vec<(f64, f64, f64)> = (0..=steps)
        .into_par_iter()
        .map(|s| {
            let t = s as f64 * dt;
            let b: Vec<Complex64> = state
                .coeffs
                .iter()
                .zip(&energies)
                .map(|(c, e)| c * Complex64::from_polar(1.0, -e * t / hbar))
                .collect();
            let (m, v) = kernel.moments(&b);
            (t, m, v)
        })
        .collect();
    let times: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let mean_q: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let var_q: Vec<f64> = rows.iter().map(|r| r.2).collect();
    let (imin, &var_min) = var_q
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("at least one sample");
    Ok(EvolutionTrace {
        t_min: times[imin],
        var_min,
        times,
        mean_q,
        var_q,
        captured: state.captured,
    })
}

/// Projects `f` onto `2K+1` modes and traces its moments up to `t_end`.
pub fn trace(
    p: &PhysicalParams,
    f: &GridFunction,
    k_max: usize,
    t_end: f64,
    dt: f64,
) -> Result<EvolutionTrace> {
    if !(dt > 0.0) || !(t_end > 0.0) {
        return Err(invalid("dt", format!("dt ({dt}) and t_end ({t_end}) must be positive")));
    }
    let basis = PlaneWaveBasis::new(*p, k_max)?;
    trace_state(&project(f, &basis)?, t_end, dt)
}

/// Nodal structure of an evolved density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NodalClass {
    /// The density peaks near the origin.
    NonNodal,
    /// The density has an interior zero.
    Nodal,
}

/// Counts near-zeros of `|φ(q,t)|²` between the origin and the highest peak:
/// local minima below 1% of the peak on a uniform grid of `samples` points.
///
/// A non-nodal density peaks at the origin, so the band is empty; a nodal one
/// has its zero between two peaks on either side of the origin.
pub fn central_zeros(state: &FourierState, samples: usize) -> usize {
    let l = state.basis.params.l;
    let samples = samples.max(3);
    let h = 2.0 * l / (samples - 1) as f64;
    let q: Vec<f64> = (0..samples).map(|i| -l + i as f64 * h).collect();
    let dens: Vec<f64> = q.iter().map(|&x| evaluate(state, x).norm_sqr()).collect();
    let (ipk, &peak) = dens
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty grid");
    let band = q[ipk].abs();
    (1..samples - 1)
        .filter(|&i| {
            q[i].abs() < band
                && dens[i] <= dens[i - 1]
                && dens[i] < dens[i + 1]
                && dens[i] < 1e-2 * peak
        })
        .count()
}

/// Classifies an evolved state as nodal or non-nodal.
pub fn nodal_class(state: &FourierState) -> NodalClass {
    if central_zeros(state, 4001) > 0 {
        NodalClass::Nodal
    } else {
        NodalClass::NonNodal
    }
}
