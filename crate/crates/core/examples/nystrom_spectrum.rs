//! Nystrom eigenvalues of the time-of-arrival operator against the closed
//! form, including Richardson extrapolation for the periodic operator whose
//! kernel has a jump along the diagonal.

use std::f64::consts::PI;

use ctoa::analytic::merged_eigenvalues;
use ctoa::nystrom::{discretize, extrapolated_eigenvalues, numeric_eigenvalues};
use ctoa::PhysicalParams;

fn main() -> ctoa::Result<()> {
    let count = 5;
    for gamma in [0.0, PI / 8.0, PI / 4.0, PI / 2.0] {
        let p = PhysicalParams::atomic(gamma)?;
        let op = discretize(&p, 500)?;
        println!("gamma = {gamma:.6}  (Hermiticity defect at N = 500: {:.1e})", op.hermiticity_defect());
        let exact = merged_eigenvalues(&p, count)?;
        let (plus, minus) = numeric_eigenvalues(&p, 1000, count)?;
        let (rich, _) = extrapolated_eigenvalues(&p, 1000, count)?;
        println!("   n  family              closed form   Nystrom N=1000  extrapolated    tau+ + tau-");
        for (i, (case, row)) in exact.iter().enumerate() {
            println!(
                "  {:2}  {:18} {:+.10} {:+.10}  {:+.10} {:+.1e}",
                row.n,
                case.label(),
                row.tau_plus,
                plus[i],
                rich[i],
                plus[i] + minus[i]
            );
        }
    }
    Ok(())
}
