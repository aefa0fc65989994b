//! Quarter-order Bessel functions and the roots of the characteristic
//! functions that fix the eigenvalues `τ = ±μl²/(4ħr)`.

use std::f64::consts::PI;

use ctoa::analytic::{characteristic_fn, characteristic_roots, CharacteristicCase};
use ctoa::specfun::{bessel_j, BesselOrder};

fn main() -> ctoa::Result<()> {
    println!("J_nu(x) at x = 1, 10, 50:");
    for order in BesselOrder::ALL {
        let v: Vec<String> = [1.0, 10.0, 50.0]
            .iter()
            .map(|&x| bessel_j(order, x).map(|j| format!("{j:+.15}")))
            .collect::<ctoa::Result<_>>()?;
        println!("  nu = {:+.2}: {}", order.nu(), v.join("  "));
    }

    let cases = [
        CharacteristicCase::PeriodicOdd,
        CharacteristicCase::PeriodicEven,
        CharacteristicCase::AntiperiodicEven,
        CharacteristicCase::AntiperiodicOdd,
        CharacteristicCase::General(PI / 8.0),
    ];
    for case in cases {
        let roots = characteristic_roots(case, 5)?;
        let worst = roots
            .iter()
            .map(|&r| characteristic_fn(case, r).map(f64::abs))
            .collect::<ctoa::Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        let shown: Vec<String> = roots.iter().map(|r| format!("{r:.10}")).collect();
        println!("{:>20}: {}  (max |f(r)| = {worst:.1e})", case.label(), shown.join(" "));
    }
    Ok(())
}
