//! Parity and time-reversal relations between the eigenfunctions of `T_γ`,
//! `T_{−γ}` and between the `±τ` branches, in position and momentum.

use std::f64::consts::PI;

use ctoa::analytic::{symmetry_report, Relation};
use ctoa::PhysicalParams;

fn main() -> ctoa::Result<()> {
    for gamma in [0.0, PI / 8.0, 0.3, PI / 2.0] {
        let p = PhysicalParams::atomic(gamma)?;
        let report = symmetry_report(&p, 6)?;
        print!("gamma = {gamma:.4}:");
        for rel in [Relation::Mirror, Relation::Reversal, Relation::Reflection, Relation::Overlap] {
            match report.max(rel) {
                Some(v) => print!("  {rel:?} {v:.1e}"),
                None => print!("  {rel:?} n/a"),
            }
        }
        println!();
    }
    Ok(())
}
