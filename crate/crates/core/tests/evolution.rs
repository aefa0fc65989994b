use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use ctoa::analytic::{eigenfunction, eigenvalues, CharacteristicCase};
use ctoa::evolution::{
    evaluate, evolve, moment_matrices, moments, nodal_class, project, reconstruct, trace_state, FourierState,
    NodalClass, PlaneWaveBasis,
};
use ctoa::nystrom::Sign;
use ctoa::quadrature::{gauss_legendre_on, GridFunction};
use ctoa::tables::{arrival_results, ArrivalSettings, TableId};
use ctoa::{Complex64, PhysicalParams, QuadratureRule};
use proptest::prelude::*;

fn grid(n: usize) -> Arc<QuadratureRule> {
    Arc::new(gauss_legendre_on(n, 1.0).unwrap())
}

fn eigenstate(gamma: f64, case: CharacteristicCase, n: usize, sign: Sign, k_max: usize) -> (f64, FourierState) {
    let p = PhysicalParams::atomic(gamma).unwrap();
    let ef = eigenfunction(&p, case, n, sign).unwrap();
    let f = ef.normalize(grid(2400)).unwrap();
    (ef.tau, project(&f, &PlaneWaveBasis::new(p, k_max).unwrap()).unwrap())
}

/// `(⟨q⟩, σ²)` of the reconstructed density by direct quadrature.
fn grid_moments(state: &FourierState, rule: Arc<QuadratureRule>) -> (f64, f64) {
    let f = reconstruct(state, rule.clone()).unwrap();
    let w = rule.weights();
    let q = rule.nodes();
    let d = f.density();
    let n: f64 = (0..q.len()).map(|i| w[i] * d[i]).sum();
    let m1: f64 = (0..q.len()).map(|i| w[i] * d[i] * q[i]).sum::<f64>() / n;
    let m2: f64 = (0..q.len()).map(|i| w[i] * d[i] * q[i] * q[i]).sum::<f64>() / n;
    (m1, m2 - m1 * m1)
}

#[test]
fn basis_function_projects_to_a_unit_coefficient_and_back() {
    let p = PhysicalParams::atomic(0.3).unwrap();
    let basis = PlaneWaveBasis::new(p, 20).unwrap();
    let rule = grid(200);
    let f = GridFunction::from_fn(rule.clone(), |q| basis.eval(0, q)).unwrap();
    let s = project(&f, &basis).unwrap();
    assert!((s.coeff(0).unwrap() - 1.0).norm() < 1e-12);
    for k in -20..=20i64 {
        if k != 0 {
            assert!(s.coeff(k).unwrap().norm() < 1e-12);
        }
    }
    assert!(reconstruct(&s, rule).unwrap().distance(&f).unwrap() < 1e-12);
    let (m, v) = moments(&s);
    assert!(m.abs() < 1e-15 && (v - 1.0 / 3.0).abs() < 1e-15);
}

#[test]
fn periodic_even_ground_state_is_captured() {
    let (_, s) = eigenstate(0.0, CharacteristicCase::PeriodicEven, 1, Sign::Plus, 200);
    assert!(s.captured_fraction() > 1.0 - 1e-6);
}

/// The reconstruction error is the discarded tail, `‖f − P_K f‖ = √(1 − Σ|b_k|²)`;
/// with coefficients decaying like `k⁻²` that is a few times `10⁻⁴` at `K = 200`.
#[test]
fn reconstruction_error_is_the_discarded_tail() {
    let rule = grid(2400);
    let p = PhysicalParams::atomic(0.0).unwrap();
    let f = eigenfunction(&p, CharacteristicCase::PeriodicEven, 1, Sign::Plus)
        .unwrap()
        .normalize(rule.clone())
        .unwrap();
    let mut errors = Vec::new();
    for k in [100, 200, 400] {
        let s = project(&f, &PlaneWaveBasis::new(p, k).unwrap()).unwrap();
        let err = reconstruct(&s, rule.clone()).unwrap().distance(&f).unwrap();
        assert!((err - (1.0 - s.captured_fraction()).sqrt()).abs() < 1e-8);
        assert!(((reconstruct(&s, rule.clone()).unwrap().norm_sqr()) - s.norm_sqr()).abs() < 1e-10);
        errors.push(err);
    }
    assert!(errors[1] < 1e-3);
    // halving the tail width with k⁻² coefficients shrinks the error by 2^{3/2}
    for w in errors.windows(2) {
        assert!((w[0] / w[1] - 2f64.powf(1.5)).abs() < 0.1, "{errors:?}");
    }
}

/// Coefficients of the odd antiperiodic ground state fall off like `k⁻²`: the
/// state times `e^{−iπq/l}` is periodic, but only its value, not its slope,
/// matches at the walls. The even partner, which is not, falls off like `k⁻¹`.
#[test]
fn antiperiodic_coefficient_decay_rates() {
    let ratio = |s: &FourierState, k: i64| s.coeff(k).unwrap().norm() / s.coeff(2 * k).unwrap().norm();
    let (_, odd) = eigenstate(FRAC_PI_2, CharacteristicCase::AntiperiodicOdd, 1, Sign::Plus, 400);
    let (_, even) = eigenstate(FRAC_PI_2, CharacteristicCase::AntiperiodicEven, 1, Sign::Plus, 400);
    for k in [50, 100, 150] {
        assert!((ratio(&odd, k) - 4.0).abs() < 0.1, "odd k={k}: {}", ratio(&odd, k));
        assert!((ratio(&even, k) - 2.0).abs() < 0.1, "even k={k}: {}", ratio(&even, k));
    }
    let tail = (151..=400).map(|k| odd.coeff(k).unwrap().norm()).fold(0.0, f64::max);
    assert!(tail > 1e-6 && tail < 1e-4, "{tail}");
}

#[test]
fn evolution_composes_and_conserves_the_norm() {
    let (_, s) = eigenstate(0.2, CharacteristicCase::General(0.2), 2, Sign::Plus, 120);
    let a = evolve(&evolve(&s, 0.013), 0.029);
    let b = evolve(&s, 0.042);
    for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
        assert!((x - y).norm() < 1e-13);
    }
    assert_eq!(evolve(&s, 0.0).coeffs(), s.coeffs());
    for t in [0.01, 0.1, 1.0, 10.0] {
        assert!((evolve(&s, t).norm_sqr() - s.norm_sqr()).abs() < 1e-10);
    }
    assert!((b.time() - 0.042).abs() < 1e-15);
}

#[test]
fn single_mode_evolves_by_a_global_phase() {
    let p = PhysicalParams::atomic(-0.4).unwrap();
    let basis = PlaneWaveBasis::new(p, 3).unwrap();
    let mut c = vec![Complex64::new(0.0, 0.0); 7];
    c[5] = Complex64::new(0.6, 0.8);
    let s = FourierState::new(basis, c).unwrap();
    let t = 0.37;
    let e = evolve(&s, t);
    let expect = Complex64::new(0.6, 0.8) * Complex64::from_polar(1.0, -basis.energy(2) * t / p.hbar);
    assert!((e.coeff(2).unwrap() - expect).norm() < 1e-15);
    let tr = trace_state(&s, 1.0, 0.1).unwrap();
    assert!(tr.var_q.iter().all(|&v| (v - 1.0 / 3.0).abs() < 1e-14));
}

#[test]
fn moment_matrices_match_quadrature() {
    let p = PhysicalParams::new(1.0, 1.0, 1.7, 0.45).unwrap();
    let basis = PlaneWaveBasis::new(p, 6).unwrap();
    let (q, q2) = moment_matrices(&basis);
    let rule = gauss_legendre_on(200, p.l).unwrap();
    for r in 0..basis.mode_count() {
        assert!(q[(r, r)].norm() < 1e-15);
        assert!((q2[(r, r)].re - p.l * p.l / 3.0).abs() < 1e-14);
        for c in 0..basis.mode_count() {
            let (kr, kc) = (basis.mode(r), basis.mode(c));
            let direct = |m: i32| {
                rule.integrate_complex(|x| basis.eval(kr, x).conj() * x.powi(m) * basis.eval(kc, x))
            };
            assert!((q[(r, c)] - direct(1)).norm() < 1e-12);
            assert!((q2[(r, c)] - direct(2)).norm() < 1e-12);
        }
    }
}

#[test]
fn coefficient_moments_match_grid_moments() {
    let (tau, s) = eigenstate(0.01, CharacteristicCase::General(0.01), 3, Sign::Plus, 150);
    let rule = grid(1200);
    for t in [0.0, 0.3 * tau, tau, 1.7 * tau] {
        let e = evolve(&s, t);
        let (m, v) = moments(&e);
        let (gm, gv) = grid_moments(&e, rule.clone());
        assert!((m - gm).abs() < 1e-8 && (v - gv).abs() < 1e-8, "t = {t}");
    }
}

#[test]
fn reconstruction_agrees_with_pointwise_evaluation() {
    let (_, s) = eigenstate(0.7, CharacteristicCase::General(0.7), 1, Sign::Minus, 40);
    let rule = grid(50);
    let f = reconstruct(&s, rule.clone()).unwrap();
    for (&q, &v) in rule.nodes().iter().zip(f.values()) {
        assert!((evaluate(&s, q) - v).norm() < 1e-14);
    }
}

#[test]
fn tabulated_single_arrivals() {
    let k = 200;
    // periodic even n = 1: minimum 122.4e-3, at the eigenvalue 122.6e-3
    let (tau, s) = eigenstate(0.0, CharacteristicCase::PeriodicEven, 1, Sign::Plus, k);
    let tr = trace_state(&s, 2.0 * tau, 1e-4).unwrap();
    let at = tr.arrival(tau).unwrap();
    assert!((tr.var_min * 1e3 - 122.4).abs() <= 0.05);
    assert!((at.var_at_tau * 1e3 - 122.6).abs() <= 0.05);
    assert!(at.mean_at_tau.abs() < 1e-12);
    // periodic even n = 3 at its eigenvalue: 39.72e-3
    let (tau, s) = eigenstate(0.0, CharacteristicCase::PeriodicEven, 3, Sign::Plus, k);
    let at = trace_state(&s, 2.0 * tau, 1e-4).unwrap().arrival(tau).unwrap();
    assert!((at.var_at_tau * 1e3 - 39.72).abs() <= 0.005);
    // antiperiodic odd n = 5: minimum and value at the eigenvalue agree to four digits
    let (tau, s) = eigenstate(FRAC_PI_2, CharacteristicCase::AntiperiodicOdd, 5, Sign::Plus, k);
    let tr = trace_state(&s, 2.0 * tau, 1e-4).unwrap();
    let at = tr.arrival(tau).unwrap();
    assert!((tr.var_min * 1e3 - 16.53).abs() <= 0.005);
    assert!((at.var_at_tau * 1e3 - 16.53).abs() <= 0.005);
    // gamma = 0.01, n = 4: mean position −0.49e-4 at the eigenvalue
    let (tau, s) = eigenstate(0.01, CharacteristicCase::General(0.01), 4, Sign::Plus, 300);
    let at = trace_state(&s, 2.0 * tau, 1e-4).unwrap().arrival(tau).unwrap();
    assert!((at.mean_at_tau * 1e4 + 0.49).abs() <= 0.005, "{}", at.mean_at_tau);
}

/// The negative-eigenvalue partner has the same dynamics run backwards. At
/// `γ = π/2` conjugation maps mode `k` to `−k − 1`, so the truncated partner is
/// the mirror image and its (tiny, truncation-induced) mean flips sign.
#[test]
fn negative_partner_arrives_in_the_past() {
    for (gamma, case, flip) in [
        (0.0, CharacteristicCase::PeriodicEven, 1.0),
        (FRAC_PI_2, CharacteristicCase::AntiperiodicOdd, -1.0),
        (0.01, CharacteristicCase::General(0.01), -1.0),
        (-0.5, CharacteristicCase::General(-0.5), -1.0),
    ] {
        let (tau, plus) = eigenstate(gamma, case, 2, Sign::Plus, 150);
        let (_, minus) = eigenstate(gamma, case, 2, Sign::Minus, 150);
        let fwd = trace_state(&plus, 2.0 * tau, 5e-4).unwrap();
        let bwd = trace_state(&minus, -2.0 * tau, -5e-4).unwrap();
        assert_eq!(fwd.times.len(), bwd.times.len());
        for i in 0..fwd.times.len() {
            assert!((fwd.var_q[i] - bwd.var_q[i]).abs() < 1e-10, "gamma {gamma}, t {}", fwd.times[i]);
            assert!((fwd.mean_q[i] - flip * bwd.mean_q[i]).abs() < 1e-10, "gamma {gamma}: {} vs {}", fwd.mean_q[i], bwd.mean_q[i]);
        }
        assert!((fwd.t_min + bwd.t_min).abs() < 1e-12);
    }
}

fn descending(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

/// Every tabulated eigenfunction of the parity families, and every even one at
/// `γ = 0.01`, has a variance that falls to a single minimum and then rises
/// within twice its eigenvalue; minimum variance decreases with `n` in each
/// family; the nodal classification follows the parity.
#[test]
fn arrival_shapes_of_the_tabulated_families() {
    for id in [TableId::PeriodicEven, TableId::AntiperiodicOdd, TableId::Mixed] {
        let rows = arrival_results(id, &ArrivalSettings::for_table(id)).unwrap();
        let var_min: Vec<f64> = rows.iter().map(|r| r.var_min).collect();
        assert!(descending(&var_min), "{id:?}: {var_min:?}");
        for r in &rows {
            let expected = match id {
                TableId::PeriodicEven => NodalClass::NonNodal,
                TableId::AntiperiodicOdd => NodalClass::Nodal,
                _ if r.n % 2 == 0 => NodalClass::NonNodal,
                _ => NodalClass::Nodal,
            };
            assert_eq!(r.nodal, expected, "{id:?} n = {}", r.n);
            if id != TableId::Mixed || r.n % 2 == 0 {
                assert!(r.single_dip, "{id:?} n = {}", r.n);
            }
        }
    }
}

/// At `γ = 0.01` the third eigenfunction's variance does not rise monotonically
/// after its minimum: one step just after `t_min` dips by about `10⁻⁵`. The
/// wiggle is a property of the state, not of the truncation, because it
/// survives quadrupling the basis.
#[test]
fn third_small_phase_state_has_a_variance_wiggle() {
    let mut sizes = Vec::new();
    for k in [300, 1200] {
        let p = PhysicalParams::atomic(0.01).unwrap();
        let case = CharacteristicCase::General(0.01);
        let row = eigenvalues(&p, case, 3).unwrap()[2];
        let ef = eigenfunction(&p, case, 3, Sign::Plus).unwrap();
        let f = ef.normalize(Arc::new(gauss_legendre_on(4 * k + 200, 1.0).unwrap())).unwrap();
        let s = project(&f, &PlaneWaveBasis::new(p, k).unwrap()).unwrap();
        let tr = trace_state(&s, 2.0 * row.tau_plus, 1e-4).unwrap();
        assert!(!tr.has_single_dip(2.0 * row.tau_plus));
        let after = tr.times.iter().position(|&t| t >= tr.t_min).unwrap();
        let drop = tr.var_q[after..]
            .windows(2)
            .map(|w| w[0] - w[1])
            .fold(0.0, f64::max);
        sizes.push(drop);
    }
    assert!(sizes.iter().all(|&d| d > 5e-6 && d < 2e-5), "{sizes:?}");
    assert!((sizes[0] / sizes[1] - 1.0).abs() < 0.2);
}

#[test]
fn nodal_classes_of_parity_states() {
    let (tau, s) = eigenstate(0.0, CharacteristicCase::PeriodicEven, 2, Sign::Plus, 200);
    assert_eq!(nodal_class(&evolve(&s, tau)), NodalClass::NonNodal);
    let (tau, s) = eigenstate(0.0, CharacteristicCase::PeriodicOdd, 2, Sign::Plus, 200);
    assert_eq!(nodal_class(&evolve(&s, tau)), NodalClass::Nodal);
}

#[test]
fn invalid_traces_are_rejected() {
    let (_, s) = eigenstate(0.0, CharacteristicCase::PeriodicEven, 1, Sign::Plus, 10);
    assert!(trace_state(&s, 1.0, -0.1).is_err());
    assert!(trace_state(&s, 1.0, 0.0).is_err());
    assert!(PlaneWaveBasis::with_modes(PhysicalParams::default(), 400).is_err());
    let small = Arc::new(gauss_legendre_on(30, 1.0).unwrap());
    let f = GridFunction::from_fn(small, |_| Complex64::new(1.0, 0.0)).unwrap();
    assert!(project(&f, &PlaneWaveBasis::new(PhysicalParams::default(), 10).unwrap()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn variance_is_nonnegative_and_norm_conserved(
        g in -1.5f64..1.5, re in proptest::collection::vec(-1.0f64..1.0, 21), im in proptest::collection::vec(-1.0f64..1.0, 21),
        t in -3.0f64..3.0,
    ) {
        let p = PhysicalParams::atomic(g).unwrap();
        let basis = PlaneWaveBasis::new(p, 10).unwrap();
        let c: Vec<Complex64> = re.iter().zip(&im).map(|(&a, &b)| Complex64::new(a, b)).collect();
        prop_assume!(c.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-3);
        let s = FourierState::new(basis, c).unwrap();
        let e = evolve(&s, t);
        prop_assert!((e.norm_sqr() - s.norm_sqr()).abs() < 1e-10 * s.norm_sqr());
        let (m, v) = moments(&e);
        prop_assert!(v >= 0.0);
        prop_assert!(m.abs() <= 1.0);
        let tr = trace_state(&s, 0.5, 0.05).unwrap();
        prop_assert!(tr.t_min >= tr.times[0] && tr.t_min <= *tr.times.last().unwrap());
    }
}
