//! Evolves eigenfunctions with the boundary-condition Hamiltonian and shows
//! that the position variance is smallest, with the mean at the origin, at the
//! time equal to the eigenvalue. The negative-eigenvalue partner arrives in
//! the past.

use std::sync::Arc;

use ctoa::analytic::{eigenvalues, AnalyticEigenfunction, CharacteristicCase};
use ctoa::evolution::{evolve, nodal_class, project, trace_state, PlaneWaveBasis};
use ctoa::nystrom::Sign;
use ctoa::quadrature::gauss_legendre_on;
use ctoa::PhysicalParams;

fn main() -> ctoa::Result<()> {
    let p = PhysicalParams::atomic(0.0)?;
    let case = CharacteristicCase::PeriodicEven;
    let rule = Arc::new(gauss_legendre_on(2000, p.l)?);
    let basis = PlaneWaveBasis::new(p, 200)?;
    let rows = eigenvalues(&p, case, 4)?;
    println!(" n  sign   tau          t_min      var_min     mean(tau)    captured  class");
    for row in &rows {
        for sign in [Sign::Plus, Sign::Minus] {
            let ef = AnalyticEigenfunction::from_root(&p, case, row.n, row.root, sign)?;
            let state = project(&ef.normalize(rule.clone())?, &basis)?;
            let t_end = 2.0 * ef.tau;
            let tr = trace_state(&state, t_end, 1e-4_f64.copysign(t_end))?;
            let at = tr.arrival(ef.tau).expect("window contains tau");
            println!(
                "{:2}  {}   {:+.6}   {:+.4}   {:.6}   {:+.1e}   {:.7}  {:?}",
                row.n,
                sign.symbol(),
                ef.tau,
                tr.t_min,
                tr.var_min,
                at.mean_at_tau,
                tr.captured,
                nodal_class(&evolve(&state, tr.t_min))
            );
        }
    }
    Ok(())
}
