//! `(HT − TH)φ = iħφ` on test vectors from the canonical domain, its failure
//! outside that domain, and the constant boundary defect left by a vector
//! that satisfies the boundary condition but not the domain conditions.

use std::f64::consts::PI;

use ctoa::algebra::{
    boundary_probe, commutator_defect, commutator_residual, make_canonical_vector, predicted_boundary_defect,
    violation_probe,
};
use ctoa::PhysicalParams;

fn main() -> ctoa::Result<()> {
    for (gamma, h) in [(PI / 8.0, vec![1.0]), (0.0, vec![0.0, 1.0])] {
        let p = PhysicalParams::atomic(gamma)?;
        let v = make_canonical_vector(&p, &h, p.is_periodic())?;
        print!("gamma = {gamma:.4} canonical residual:");
        for n in [1000, 2000, 4000, 8000] {
            print!("  N={n}: {:.2e}", commutator_residual(&p, &v, n)?);
        }
        println!();
        let r = commutator_residual(&p, &violation_probe(&p)?, 4000)?;
        println!("               outside the domain: {r:.3}");
    }

    let p = PhysicalParams::atomic(PI / 8.0)?;
    let probe = boundary_probe(&p);
    let d = commutator_defect(&p, &probe, 4000)?;
    println!(
        "boundary probe: mean defect {:.6}, predicted {:.6}, non-constant part {:.1e}",
        d.mean(),
        predicted_boundary_defect(&p, &probe),
        d.deviation_from_constant()
    );
    Ok(())
}
