//! Gauss-Legendre quadrature and functions sampled on its nodes.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Newton steps allowed per node before giving up.
const MAX_NEWTON_ITERATIONS: usize = 100;

/// Nodes are accepted once the Newton correction `|P_N / P_N'|` is below this.
const NODE_TOLERANCE: f64 = 1e-14;

/// A Gauss-Legendre rule on `[-half_length, half_length]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    half_length: f64,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes, strictly increasing.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Half-width `l` of the integration interval `[-l, l]`.
    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    /// `Σ w_i f(q_i)`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&q, &w)| w * f(q))
            .sum()
    }

    pub fn integrate_complex<F: Fn(f64) -> Complex64>(&self, f: F) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&q, &w)| f(q) * w)
            .sum()
    }

    /// Largest `|q_i + q_{N-1-i}|`; zero for every rule this module builds.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.nodes.len();
        (0..n)
            .map(|i| (self.nodes[i] + self.nodes[n - 1 - i]).abs())
            .fold(0.0, f64::max)
    }
}

/// Legendre polynomial `P_n(x)` and its derivative by the three-term recurrence.
pub fn legendre_eval(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut prev = 1.0;
    let mut cur = x;
    for k in 2..=n {
        let k = k as f64;
        let next = ((2.0 * k - 1.0) * x * cur - (k - 1.0) * prev) / k;
        prev = cur;
        cur = next;
    }
    let nf = n as f64;
    let deriv = if (1.0 - x.abs()) < f64::EPSILON {
        // P_n'(±1) = (±1)^{n+1} n(n+1)/2
        let sign = if x > 0.0 || n % 2 == 1 { 1.0 } else { -1.0 };
        sign * nf * (nf + 1.0) / 2.0
    } else {
        nf * (x * cur - prev) / (x * x - 1.0)
    };
    (cur, deriv)
}

/// The `n`-point Gauss-Legendre rule on `[-1, 1]`.
///
/// Each positive node is found by Newton iteration from the asymptotic guess
/// `cos(π(i - 1/4)/(n + 1/2))`, safeguarded by bisection inside the interlacing
/// bracket `θ_i ∈ [(i - 1/2)π/(n + 1/2), iπ/(n + 1/2)]`; negative nodes are
/// mirrored so the rule is exactly symmetric.
pub fn gauss_legendre(n: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(invalid("order", "Gauss-Legendre order must be at least 1"));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    let half = n / 2;
    for i in 1..=half {
        let theta_lo = (i as f64 - 0.5) * PI / (nf + 0.5);
        let theta_hi = i as f64 * PI / (nf + 0.5);
        let (mut lo, mut hi) = (theta_hi.cos(), theta_lo.cos());
        let mut x = ((i as f64 - 0.25) * PI / (nf + 0.5)).cos();
        let (p_lo, _) = legendre_eval(n, lo);
        let mut converged = false;
        for _ in 0..MAX_NEWTON_ITERATIONS {
            let (p, dp) = legendre_eval(n, x);
            if p == 0.0 {
                converged = true;
                break;
            }
            if p.signum() == p_lo.signum() {
                lo = x;
            } else {
                hi = x;
            }
            let step = p / dp;
            if step.abs() < NODE_TOLERANCE * x.abs().max(1e-3) {
                x -= step;
                converged = true;
                break;
            }
            let mut next = x - step;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let moved = (next - x).abs();
            x = next;
            if moved < NODE_TOLERANCE * x.abs().max(1e-3) || hi - lo < 4.0 * f64::EPSILON {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::QuadratureNoConvergence {
                order: n,
                index: i,
                iterations: MAX_NEWTON_ITERATIONS,
            });
        }
        // one polishing step at the converged point
        let (p, dp) = legendre_eval(n, x);
        let polished = x - p / dp;
        if polished > lo && polished < hi {
            x = polished;
        }
        let (_, dp) = legendre_eval(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - i] = x;
        nodes[i - 1] = -x;
        weights[n - i] = w;
        weights[i - 1] = w;
    }
    if n % 2 == 1 {
        let (_, dp) = legendre_eval(n, 0.0);
        nodes[half] = 0.0;
        weights[half] = 2.0 / (dp * dp);
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        half_length: 1.0,
    })
}

/// Scales a rule on `[-a, a]` to `[-a·l, a·l]`.
pub fn rescale(rule: &QuadratureRule, l: f64) -> Result<QuadratureRule> {
    if !(l > 0.0 && l.is_finite()) {
        return Err(invalid("l", format!("scale must be positive and finite, got {l}")));
    }
    Ok(QuadratureRule {
        nodes: rule.nodes.iter().map(|&q| q * l).collect(),
        weights: rule.weights.iter().map(|&w| w * l).collect(),
        half_length: rule.half_length * l,
    })
}

/// Gauss-Legendre rule of order `n` directly on `[-l, l]`.
pub fn gauss_legendre_on(n: usize, l: f64) -> Result<QuadratureRule> {
    rescale(&gauss_legendre(n)?, l)
}

/// A complex wavefunction sampled on the nodes of a quadrature rule.
#[derive(Debug, Clone)]
pub struct GridFunction {
    rule: Arc<QuadratureRule>,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(rule: Arc<QuadratureRule>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != rule.order() {
            return Err(invalid(
                "values",
                format!("{} samples for a rule of order {}", values.len(), rule.order()),
            ));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(invalid("values", "samples must be finite"));
        }
        Ok(Self { rule, values })
    }

    /// Samples `f` at every node.
    pub fn from_fn<F: Fn(f64) -> Complex64>(rule: Arc<QuadratureRule>, f: F) -> Result<Self> {
        let values = rule.nodes().iter().map(|&q| f(q)).collect();
        Self::new(rule, values)
    }

    pub fn rule(&self) -> &Arc<QuadratureRule> {
        &self.rule
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn nodes(&self) -> &[f64] {
        self.rule.nodes()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values
            .iter()
            .zip(self.rule.weights())
            .map(|(v, &w)| w * v.norm_sqr())
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            rule: Arc::clone(&self.rule),
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    /// Unit-norm copy whose largest-modulus sample is real and positive.
    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm();
        if !(norm > 0.0) {
            return Err(Error::ZeroNorm);
        }
        let pivot = self
            .values
            .iter()
            .copied()
            .max_by(|a, b| a.norm_sqr().total_cmp(&b.norm_sqr()))
            .unwrap_or_default();
        let phase = if pivot.norm() > 0.0 {
            pivot.conj() / pivot.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        Ok(self.scaled(phase / norm))
    }

    /// Pointwise `|φ(q_i)|²`.
    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    pub(crate) fn map_values<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Self {
        Self {
            rule: Arc::clone(&self.rule),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub(crate) fn with_values(&self, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        Self {
            rule: Arc::clone(&self.rule),
            values,
        }
    }

    /// Weighted L² distance `‖self - other‖`.
    pub fn distance(&self, other: &GridFunction) -> Result<f64> {
        check_same_rule(&self.rule, &other.rule)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .zip(self.rule.weights())
            .map(|((a, b), &w)| w * (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }
}

pub(crate) fn check_same_rule(a: &Arc<QuadratureRule>, b: &Arc<QuadratureRule>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

/// `⟨f|g⟩ = Σ_i w_i conj(f_i) g_i`.
pub fn inner_product(f: &GridFunction, g: &GridFunction) -> Result<Complex64> {
    check_same_rule(&f.rule, &g.rule)?;
    Ok(f.values
        .iter()
        .zip(&g.values)
        .zip(f.rule.weights())
        .map(|((a, b), &w)| a.conj() * b * w)
        .sum())
}
