//! Closed-form eigenfunctions checked against the integral operator itself:
//! `‖Tφ − τφ‖/‖φ‖` with a quadrature split at the kernel's jump.

use std::f64::consts::PI;
use std::sync::Arc;

use ctoa::algebra::apply_t_split;
use ctoa::analytic::{merged_eigenvalues, AnalyticEigenfunction};
use ctoa::nystrom::Sign;
use ctoa::quadrature::{gauss_legendre_on, inner_product};
use ctoa::PhysicalParams;

fn main() -> ctoa::Result<()> {
    let rule = Arc::new(gauss_legendre_on(200, 1.0)?);
    for gamma in [0.0, 0.01, PI / 8.0, PI / 2.0] {
        let p = PhysicalParams::atomic(gamma)?;
        println!("gamma = {gamma:.4}");
        for (case, row) in merged_eigenvalues(&p, 4)? {
            for sign in [Sign::Plus, Sign::Minus] {
                let ef = AnalyticEigenfunction::from_root(&p, case, row.n, row.root, sign)?;
                let f = ef.sample(rule.clone())?;
                let tf = apply_t_split(&p, |q| ef.eval(q), rule.clone(), 8, 24)?;
                let residual = tf.distance(&f.scaled(ef.tau.into()))? / f.norm();
                let rayleigh = inner_product(&f, &tf)?.re / f.norm_sqr();
                println!(
                    "  n = {} {} {:18} tau = {:+.10}  <f|Tf> = {:+.10}  residual {:.1e}",
                    row.n,
                    sign.symbol(),
                    case.label(),
                    ef.tau,
                    rayleigh,
                    residual
                );
            }
        }
    }
    Ok(())
}
