//! Reproduces the four reference tables and prints every comparison.
//!
//! Run in release mode: `cargo run --release --example reproduce_tables`.

use std::time::Instant;

use ctoa::tables::{reproduce_arrival_table, reproduce_spectrum_table, ArrivalSettings, TableId, TableReport};

fn show(r: &TableReport) {
    println!(" n  quantity                     computed        reference       tolerance  ");
    for c in &r.checks {
        let verdict = match (c.enforced, c.pass) {
            (true, true) => "pass",
            (true, false) => "FAIL",
            (false, _) => "info",
        };
        println!(
            "{:2}  {:28} {:+.8e} {:+.8e} {:.1e}  {verdict}",
            c.n, c.quantity, c.computed, c.reference, c.tolerance
        );
    }
    for a in &r.arrivals {
        println!(
            "    n = {:2}: t_min {:.4}  captured {:.7}  {:?}  single dip {}",
            a.n, a.t_min, a.captured, a.nodal, a.single_dip
        );
    }
}

fn main() -> ctoa::Result<()> {
    for id in [TableId::PeriodicEven, TableId::AntiperiodicOdd, TableId::Mixed] {
        let start = Instant::now();
        let r = reproduce_arrival_table(id, &ArrivalSettings::for_table(id))?;
        println!("== Table {} ({:.1?}) ==", id.number(), start.elapsed());
        show(&r);
        println!("passed: {}\n", r.passed());
    }
    let start = Instant::now();
    let r = reproduce_spectrum_table(2000)?;
    println!("== Table 4 ({:.1?}) ==", start.elapsed());
    show(&r);
    println!("passed: {}", r.passed());
    Ok(())
}
