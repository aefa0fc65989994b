//! Quarter-order Bessel functions of the first kind and sign-change root finding.
//!
//! Below [`SERIES_CROSSOVER`] the ascending series is summed in double-double
//! arithmetic, so the alternating cancellation near the crossover (terms of
//! order `1e11` against a result of order `0.1`) costs nothing visible in the
//! final `f64`. Above it the Hankel expansion is used.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Switch from the ascending series to the Hankel expansion.
pub const SERIES_CROSSOVER: f64 = 30.0;

/// Default scan step for characteristic-equation roots.
pub const DEFAULT_SCAN_STEP: f64 = PI / 16.0;

/// Bisection stops once the bracket is narrower than this.
const BRACKET_WIDTH: f64 = 1e-13;

// Γ(1/4) and Γ(3/4) to 40 digits
const GAMMA_QUARTER: f64 = 3.625_609_908_221_908_311_930_685_155_867_672;
const GAMMA_THREE_QUARTERS: f64 = 1.225_416_702_465_177_645_129_098_303_362_890;

/// The Bessel orders that occur in the CTOA eigenproblem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BesselOrder {
    MinusThreeQuarters,
    MinusQuarter,
    Quarter,
    ThreeQuarters,
    FiveQuarters,
}

impl BesselOrder {
    pub const ALL: [BesselOrder; 5] = [
        BesselOrder::MinusThreeQuarters,
        BesselOrder::MinusQuarter,
        BesselOrder::Quarter,
        BesselOrder::ThreeQuarters,
        BesselOrder::FiveQuarters,
    ];

    pub fn nu(self) -> f64 {
        match self {
            BesselOrder::MinusThreeQuarters => -0.75,
            BesselOrder::MinusQuarter => -0.25,
            BesselOrder::Quarter => 0.25,
            BesselOrder::ThreeQuarters => 0.75,
            BesselOrder::FiveQuarters => 1.25,
        }
    }

    pub fn from_nu(nu: f64) -> Option<Self> {
        Self::ALL.into_iter().find(|o| o.nu() == nu)
    }

    /// `Γ(ν + 1)`.
    fn gamma_nu_plus_one(self) -> f64 {
        match self {
            BesselOrder::MinusThreeQuarters => GAMMA_QUARTER,
            BesselOrder::MinusQuarter => GAMMA_THREE_QUARTERS,
            BesselOrder::Quarter => GAMMA_QUARTER / 4.0,
            BesselOrder::ThreeQuarters => 0.75 * GAMMA_THREE_QUARTERS,
            BesselOrder::FiveQuarters => 1.25 * GAMMA_QUARTER / 4.0,
        }
    }
}

/// `J_ν(x)` for `x ≥ 0`.
///
/// `x = 0` is accepted only for positive orders (value 0); negative orders
/// diverge there.
pub fn bessel_j(order: BesselOrder, x: f64) -> Result<f64> {
    let nu = order.nu();
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::BesselDomain { nu, x });
    }
    if x == 0.0 {
        return if nu > 0.0 {
            Ok(0.0)
        } else {
            Err(Error::BesselDomain { nu, x })
        };
    }
    if x <= SERIES_CROSSOVER {
        Ok((0.5 * x).powf(nu) * series_scaled(order, x))
    } else {
        Ok(hankel(nu, x))
    }
}

/// `(x/2)^{-ν} J_ν(x)`, an entire function of `x²` that stays finite at the
/// origin for every order.
pub fn bessel_j_scaled(order: BesselOrder, x: f64) -> Result<f64> {
    let nu = order.nu();
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::BesselDomain { nu, x });
    }
    if x <= SERIES_CROSSOVER {
        Ok(series_scaled(order, x))
    } else {
        Ok(hankel(nu, x) / (0.5 * x).powf(nu))
    }
}

/// `Σ_k (-x²/4)^k / (k! Γ(k + ν + 1))` in double-double.
fn series_scaled(order: BesselOrder, x: f64) -> f64 {
    let nu = order.nu();
    let y = TwoFold::product(x, x).scale(0.25);
    let mut term = TwoFold::from(1.0 / order.gamma_nu_plus_one());
    let mut sum = term;
    let mut k = 1.0;
    loop {
        term = term.mul(y).div_f64(-(k * (k + nu)));
        sum = sum.add(term);
        if k > y.hi && term.hi.abs() <= 1e-34 * sum.hi.abs().max(1e-300) {
            break;
        }
        k += 1.0;
        if k > 400.0 {
            break;
        }
    }
    sum.to_f64()
}

/// Hankel's large-argument expansion, truncated at its smallest term.
fn hankel(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut p = 0.0;
    let mut q = 0.0;
    let mut term: f64 = 1.0;
    let mut last = f64::INFINITY;
    let mut k = 0usize;
    loop {
        if term.abs() > last || term.abs() < 1e-18 {
            break;
        }
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        last = term.abs();
        k += 1;
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        if k > 200 {
            break;
        }
    }
    let phase = (0.5 * nu + 0.25) * PI;
    let (sx, cx) = x.sin_cos();
    let (sp, cp) = phase.sin_cos();
    let cos_w = cx * cp + sx * sp;
    let sin_w = sx * cp - cx * sp;
    (2.0 / (PI * x)).sqrt() * (p * cos_w - q * sin_w)
}

/// Positive roots of a real function with their residuals.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RootList {
    pub roots: Vec<f64>,
    pub residuals: Vec<f64>,
}

impl RootList {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Finds the sign changes of `f` on `(0, x_max]` and refines each by bisection.
///
/// The scan is geometric between `1e-9·scan_step` and `scan_step` so that roots
/// close to the origin are bracketed too, then uniform with `scan_step`.
pub fn find_roots<F: FnMut(f64) -> f64>(mut f: F, x_max: f64, scan_step: f64) -> Result<RootList> {
    if !(x_max > 0.0) || !(scan_step > 0.0) {
        return Err(crate::error::invalid(
            "scan",
            format!("x_max ({x_max}) and scan_step ({scan_step}) must be positive"),
        ));
    }
    let mut grid = Vec::new();
    let mut x = 1e-9 * scan_step;
    while x < scan_step.min(x_max) {
        grid.push(x);
        x *= 1.25;
    }
    let mut k = 1.0;
    while k * scan_step <= x_max {
        grid.push(k * scan_step);
        k += 1.0;
    }
    if grid.last().is_some_and(|&g| g < x_max) {
        grid.push(x_max);
    }

    let mut eval = |x: f64| -> Result<f64> {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite { x, value: v })
        }
    };

    let mut out = RootList::default();
    let mut a = grid[0];
    let mut fa = eval(a)?;
    for &b in &grid[1..] {
        let fb = eval(b)?;
        if fb == 0.0 {
            out.roots.push(b);
            out.residuals.push(0.0);
        } else if fa != 0.0 && fa.signum() != fb.signum() {
            let (mut lo, mut hi, mut flo) = (a, b, fa);
            while hi - lo > BRACKET_WIDTH {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let fm = eval(mid)?;
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if fm.signum() == flo.signum() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            let root = 0.5 * (lo + hi);
            out.residuals.push(eval(root)?.abs());
            out.roots.push(root);
        }
        a = b;
        fa = fb;
    }
    Ok(out)
}

/// Double-double number `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Debug, Clone, Copy)]
struct TwoFold {
    hi: f64,
    lo: f64,
}

impl From<f64> for TwoFold {
    fn from(hi: f64) -> Self {
        Self { hi, lo: 0.0 }
    }
}

impl TwoFold {
    fn two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        let bb = s - a;
        let err = (a - (s - bb)) + (b - bb);
        Self { hi: s, lo: err }
    }

    fn quick_two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        Self {
            hi: s,
            lo: b - (s - a),
        }
    }

    fn product(a: f64, b: f64) -> Self {
        let p = a * b;
        Self {
            hi: p,
            lo: a.mul_add(b, -p),
        }
    }

    fn scale(self, s: f64) -> Self {
        // exact for powers of two
        Self {
            hi: self.hi * s,
            lo: self.lo * s,
        }
    }

    fn add(self, o: Self) -> Self {
        let s = Self::two_sum(self.hi, o.hi);
        let t = Self::two_sum(self.lo, o.lo);
        let u = Self::quick_two_sum(s.hi, s.lo + t.hi);
        Self::quick_two_sum(u.hi, u.lo + t.lo)
    }

    fn mul(self, o: Self) -> Self {
        let p = Self::product(self.hi, o.hi);
        let cross = self.hi * o.lo + self.lo * o.hi;
        Self::quick_two_sum(p.hi, p.lo + cross)
    }

    fn div_f64(self, d: f64) -> Self {
        let q1 = self.hi / d;
        let r = self.add(Self::product(q1, d).neg());
        let q2 = r.hi / d;
        let r = r.add(Self::product(q2, d).neg());
        let q3 = r.hi / d;
        Self::quick_two_sum(q1, q2).add(Self::from(q3))
    }

    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Plain f64 series with as many terms as needed; only trustworthy for
    /// small x where no cancellation occurs.
    fn naive_series(nu: f64, gamma: f64, x: f64) -> f64 {
        let y = x * x / 4.0;
        let mut term = 1.0 / gamma;
        let mut sum = term;
        for k in 1..50 {
            let k = k as f64;
            term *= -y / (k * (k + nu));
            sum += term;
        }
        (x / 2.0).powf(nu) * sum
    }

    #[test]
    fn quarter_order_vanishes_at_origin() {
        assert_eq!(bessel_j(BesselOrder::Quarter, 0.0).unwrap(), 0.0);
        let a = bessel_j(BesselOrder::Quarter, 1e-8).unwrap();
        let b = bessel_j(BesselOrder::Quarter, 1e-4).unwrap();
        assert!(a.abs() < 1e-2);
        // x^{1/4} scaling
        assert!(((b / a) - 10.0).abs() < 1e-6);
    }

    #[test]
    fn negative_orders_reject_origin_and_negative_arguments() {
        assert!(bessel_j(BesselOrder::MinusQuarter, 0.0).is_err());
        assert!(bessel_j(BesselOrder::Quarter, -1.0).is_err());
        assert!(bessel_j_scaled(BesselOrder::MinusThreeQuarters, 0.0).is_ok());
    }

    #[test]
    fn matches_independent_series_at_one() {
        // 1/Γ(5/4) computed from Γ(1/4)/4 independently of the module table
        let gamma = 3.625_609_908_221_908 / 4.0;
        let want = naive_series(0.25, gamma, 1.0);
        let got = bessel_j(BesselOrder::Quarter, 1.0).unwrap();
        assert!(((got - want) / want).abs() < 1e-14, "{got} vs {want}");
    }

    #[test]
    fn reference_values() {
        // mpmath.besselj at 30 digits
        let cases = [
            (BesselOrder::Quarter, 1.0, 0.752_231_333_340_790_1),
            (BesselOrder::MinusQuarter, 2.0, 0.003_586_915_624_172_916),
            (BesselOrder::MinusThreeQuarters, 5.0, 0.233_561_208_633_274_8),
            (BesselOrder::FiveQuarters, 20.0, 0.000_915_539_854_385_064_3),
            (BesselOrder::ThreeQuarters, 100.0, -0.063_581_765_898_987_9),
        ];
        for (o, x, want) in cases {
            let got = bessel_j(o, x).unwrap();
            assert!(((got - want) / want).abs() < 1e-12, "{o:?} {x}: {got} vs {want}");
        }
    }

    #[test]
    fn recurrence_ties_orders_together() {
        for x in [0.5, 1.0, 5.0, 20.0, 100.0] {
            let jm = bessel_j(BesselOrder::MinusThreeQuarters, x).unwrap();
            let j0 = bessel_j(BesselOrder::Quarter, x).unwrap();
            let jp = bessel_j(BesselOrder::FiveQuarters, x).unwrap();
            let lhs = jm + jp;
            let rhs = 0.5 / x * j0;
            let scale = jm.abs().max(jp.abs()).max(rhs.abs());
            assert!((lhs - rhs).abs() < 1e-10 * scale, "x={x}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn crossover_is_continuous() {
        for o in BesselOrder::ALL {
            let below = bessel_j(o, SERIES_CROSSOVER - 1e-6).unwrap();
            let above = bessel_j(o, SERIES_CROSSOVER + 1e-6).unwrap();
            let slope_allowance = 2e-6 * 0.2;
            assert!(
                (below - above).abs() < 1e-10 * below.abs().max(above.abs()) + slope_allowance,
                "{o:?}: {below} vs {above}"
            );
            // compare series and asymptotic at the same point
            let series = (0.5 * SERIES_CROSSOVER).powf(o.nu()) * series_scaled(o, SERIES_CROSSOVER);
            let asym = hankel(o.nu(), SERIES_CROSSOVER);
            assert!((series - asym).abs() < 1e-13, "{o:?}: {series} vs {asym}");
        }
    }

    #[test]
    fn linear_root() {
        let r = find_roots(|x| x - 5.0, 10.0, DEFAULT_SCAN_STEP).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r.roots[0] - 5.0).abs() < 1e-12);
    }

    #[test]
    fn no_sign_change_gives_empty_list() {
        let r = find_roots(|x| x * x + 1.0, 10.0, DEFAULT_SCAN_STEP).unwrap();
        assert!(r.is_empty());
    }

    #[test]
    fn non_finite_aborts() {
        let err = find_roots(|x| if x > 3.0 { f64::NAN } else { 1.0 }, 10.0, 0.5).unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }));
    }

    #[test]
    fn minus_quarter_zeros() {
        let r = find_roots(
            |x| bessel_j(BesselOrder::MinusQuarter, x).unwrap(),
            40.0,
            DEFAULT_SCAN_STEP,
        )
        .unwrap();
        assert!((r.roots[0] - 2.006_299_671_789_45).abs() < 1e-10);
        assert!(r.max_residual() < 1e-10);
        for w in r.roots.windows(2) {
            assert!(w[0] < w[1]);
            assert!((w[1] - w[0] - PI).abs() < 0.1);
        }
    }

    #[test]
    fn tiny_roots_are_bracketed() {
        let r = find_roots(|x| x - 1e-4, 1.0, DEFAULT_SCAN_STEP).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r.roots[0] - 1e-4).abs() < 1e-13);
    }
}
