//! Reference tables and the protocols that reproduce them.
//!
//! The reference values live in `data/*.csv` exactly as printed, each file
//! carrying its provenance in `#` comment lines. A printed value remembers how
//! many decimals it had, so eigenvalues can be compared to half a unit in the
//! last printed place.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use serde::Serialize;

use crate::analytic::{eigenvalues, merged_eigenvalues, AnalyticEigenfunction, CharacteristicCase};
use crate::error::{invalid, Result};
use crate::evolution::{evolve, nodal_class, project, trace_state, NodalClass, PlaneWaveBasis};
use crate::kernel::PhysicalParams;
use crate::nystrom::{extrapolated_eigenvalues, numeric_eigenvalues, Sign};
use crate::quadrature::gauss_legendre_on;

const TABLE1: &str = include_str!("../data/table1.csv");
const TABLE2: &str = include_str!("../data/table2.csv");
const TABLE3: &str = include_str!("../data/table3.csv");
const TABLE4: &str = include_str!("../data/table4.csv");

/// Relative tolerance on variances for the parity families.
pub const PARITY_VARIANCE_TOL: f64 = 5e-3;
/// Relative tolerance on the minimum variance at `γ = 0.01`, even and odd `n`.
pub const MIXED_EVEN_VARIANCE_TOL: f64 = 1e-2;
pub const MIXED_ODD_VARIANCE_TOL: f64 = 5e-2;
/// Absolute tolerance on the mean position at the eigenvalue.
pub const MIXED_MEAN_TOL: f64 = 2e-4;
/// Nystrom (extrapolated) against the printed periodic eigenvalues.
pub const PERIODIC_NYSTROM_TOL: f64 = 1e-6;
/// Nystrom against closed form for the non-parity operators.
pub const MIXED_NYSTROM_TOL: f64 = 5e-4;

/// The four reference tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TableId {
    PeriodicEven,
    AntiperiodicOdd,
    Mixed,
    Spectrum,
}

impl TableId {
    pub fn number(self) -> usize {
        match self {
            TableId::PeriodicEven => 1,
            TableId::AntiperiodicOdd => 2,
            TableId::Mixed => 3,
            TableId::Spectrum => 4,
        }
    }

    pub fn from_number(n: usize) -> Option<Self> {
        [Self::PeriodicEven, Self::AntiperiodicOdd, Self::Mixed, Self::Spectrum]
            .into_iter()
            .find(|t| t.number() == n)
    }

    /// Boundary phase and family of the arrival tables.
    fn family(self) -> Option<(f64, CharacteristicCase)> {
        match self {
            TableId::PeriodicEven => Some((0.0, CharacteristicCase::PeriodicEven)),
            TableId::AntiperiodicOdd => Some((FRAC_PI_2, CharacteristicCase::AntiperiodicOdd)),
            TableId::Mixed => Some((0.01, CharacteristicCase::General(0.01))),
            TableId::Spectrum => None,
        }
    }
}

/// A number as printed, converted to natural units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Printed {
    pub value: f64,
    /// Half a unit in the last printed place, in natural units.
    pub half_unit: f64,
}

impl Printed {
    fn parse(text: &str, scale: f64) -> Result<Option<Self>> {
        let t = text.trim();
        if t.is_empty() {
            return Ok(None);
        }
        let v: f64 = t
            .parse()
            .map_err(|_| invalid("table", format!("malformed number `{t}`")))?;
        let decimals = t.split_once('.').map_or(0, |(_, frac)| frac.len());
        Ok(Some(Self {
            value: v * scale,
            half_unit: 0.5 * 10f64.powi(-(decimals as i32)) * scale,
        }))
    }
}

/// One row of Tables I–III.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArrivalReference {
    pub n: usize,
    pub eigenvalue: Printed,
    pub mean_at_tau: Option<Printed>,
    pub var_min: Option<Printed>,
    pub var_at_tau: Option<Printed>,
}

/// One row of Table IV: `(exact, numeric)` for `γ = 0, π/8, π/4`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReference {
    pub n: usize,
    pub columns: [(Printed, Printed); 3],
}

/// Boundary phases of the Table IV columns.
pub const SPECTRUM_GAMMAS: [f64; 3] = [0.0, PI / 8.0, PI / 4.0];

fn records(text: &str) -> Result<Vec<csv::StringRecord>> {
    let mut rd = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .flexible(false)
        .from_reader(text.as_bytes());
    rd.records()
        .map(|r| r.map_err(|e| invalid("table", e.to_string())))
        .collect()
}

fn index(rec: &csv::StringRecord) -> Result<usize> {
    rec[0]
        .trim()
        .parse()
        .map_err(|_| invalid("table", format!("bad row index `{}`", &rec[0])))
}

/// Reference rows of Table I, II or III.
pub fn arrival_reference(id: TableId) -> Result<Vec<ArrivalReference>> {
    let (text, tau_scale, var_scale, mean_scale) = match id {
        TableId::PeriodicEven => (TABLE1, 1e-3, 1e-3, 0.0),
        TableId::AntiperiodicOdd => (TABLE2, 1e-3, 1e-3, 0.0),
        TableId::Mixed => (TABLE3, 1e-2, 1e-2, 1e-4),
        TableId::Spectrum => return Err(invalid("table", "table 4 is a spectrum table")),
    };
    records(text)?
        .iter()
        .map(|r| {
            let n = index(r)?;
            let eigenvalue = Printed::parse(&r[1], tau_scale)?
                .ok_or_else(|| invalid("table", format!("row {n} has no eigenvalue")))?;
            let row = if id == TableId::Mixed {
                ArrivalReference {
                    n,
                    eigenvalue,
                    mean_at_tau: Printed::parse(&r[2], mean_scale)?,
                    var_min: Printed::parse(&r[3], var_scale)?,
                    var_at_tau: Printed::parse(&r[4], var_scale)?,
                }
            } else {
                ArrivalReference {
                    n,
                    eigenvalue,
                    mean_at_tau: None,
                    var_min: Printed::parse(&r[2], var_scale)?,
                    var_at_tau: Printed::parse(&r[3], var_scale)?,
                }
            };
            Ok(row)
        })
        .collect()
}

/// Reference rows of Table IV.
pub fn spectrum_reference() -> Result<Vec<SpectrumReference>> {
    records(TABLE4)?
        .iter()
        .map(|r| {
            let n = index(r)?;
            let cell = |i: usize| -> Result<Printed> {
                Printed::parse(&r[i], 1.0)?.ok_or_else(|| invalid("table", format!("row {n} has a blank cell")))
            };
            Ok(SpectrumReference {
                n,
                columns: [(cell(1)?, cell(2)?), (cell(3)?, cell(4)?), (cell(5)?, cell(6)?)],
            })
        })
        .collect()
}

/// One comparison against a reference value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub n: usize,
    /// Computed eigenvalue of the row.
    pub eigenvalue: f64,
    pub quantity: String,
    pub computed: f64,
    pub reference: f64,
    /// Absolute tolerance actually applied.
    pub tolerance: f64,
    /// Informational rows are reported but do not affect the verdict.
    pub enforced: bool,
    pub pass: bool,
}

impl Check {
    fn new(n: usize, eigenvalue: f64, quantity: &str, computed: f64, reference: f64, tolerance: f64) -> Self {
        Self {
            n,
            eigenvalue,
            quantity: quantity.to_string(),
            computed,
            reference,
            tolerance,
            enforced: true,
            pass: (computed - reference).abs() <= tolerance,
        }
    }

    fn relative(n: usize, eigenvalue: f64, quantity: &str, computed: f64, reference: f64, rel: f64) -> Self {
        Self::new(n, eigenvalue, quantity, computed, reference, rel * reference.abs())
    }

    fn info(mut self) -> Self {
        self.enforced = false;
        self
    }

    pub fn deviation(&self) -> f64 {
        (self.computed - self.reference).abs()
    }
}

/// Computed arrival data for one eigenfunction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArrivalResult {
    pub n: usize,
    pub tau: f64,
    pub t_min: f64,
    pub var_min: f64,
    pub var_at_tau: f64,
    pub mean_at_tau: f64,
    pub captured: f64,
    pub nodal: NodalClass,
    pub single_dip: bool,
}

/// Outcome of reproducing one table.
#[derive(Debug, Clone, Serialize)]
pub struct TableReport {
    pub table: TableId,
    pub arrivals: Vec<ArrivalResult>,
    pub checks: Vec<Check>,
}

impl TableReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().filter(|c| c.enforced).all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.enforced && !c.pass)
    }
}

/// Numerical settings for Tables I–III.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArrivalSettings {
    /// Gauss-Legendre order used to project eigenfunctions.
    pub quad_order: usize,
    /// Mode cutoff `K` (the basis has `2K + 1` modes).
    pub k_max: usize,
    pub dt: f64,
    /// Step used for rows whose index is listed in `fine_rows`.
    pub fine_dt: f64,
    pub fine_rows: Vec<usize>,
    /// Rows to reproduce.
    pub rows: Vec<usize>,
    /// Length of every trace; `None` means twice the largest tabulated eigenvalue.
    pub t_end: Option<f64>,
}

impl ArrivalSettings {
    /// Protocol stated for each table: 401 modes at `dt = 1e-4` for I and II
    /// (`5e-5` for rows 9 and 10 of II), 601 modes for III without its blank
    /// first row.
    pub fn for_table(id: TableId) -> Self {
        let mut s = Self {
            quad_order: 2000,
            k_max: 200,
            dt: 1e-4,
            fine_dt: 1e-4,
            fine_rows: Vec::new(),
            rows: (1..=10).collect(),
            t_end: None,
        };
        match id {
            TableId::AntiperiodicOdd => {
                s.fine_dt = 5e-5;
                s.fine_rows = vec![9, 10];
            }
            TableId::Mixed => {
                s.k_max = 300;
                s.rows = (2..=10).collect();
            }
            _ => {}
        }
        s
    }

    fn step_for(&self, n: usize) -> f64 {
        if self.fine_rows.contains(&n) {
            self.fine_dt
        } else {
            self.dt
        }
    }
}

/// Evolves the positive eigenfunctions of one family and records their
/// arrival data.
pub fn arrival_results(id: TableId, settings: &ArrivalSettings) -> Result<Vec<ArrivalResult>> {
    let (gamma, case) = id
        .family()
        .ok_or_else(|| invalid("table", "table 4 has no arrival data"))?;
    let p = PhysicalParams::atomic(gamma)?;
    let max_n = settings.rows.iter().copied().max().unwrap_or(0);
    if max_n == 0 || settings.rows.contains(&0) {
        return Err(invalid("rows", "row indices start at 1"));
    }
    let roots = eigenvalues(&p, case, max_n)?;
    let rule = Arc::new(gauss_legendre_on(settings.quad_order, p.l)?);
    let basis = PlaneWaveBasis::new(p, settings.k_max)?;
    let first = settings.rows.iter().copied().min().unwrap_or(1);
    let t_end = settings.t_end.unwrap_or(2.0 * roots[first - 1].tau_plus);

    settings
        .rows
        .iter()
        .map(|&n| {
            let row = roots[n - 1];
            let ef = AnalyticEigenfunction::from_root(&p, case, n, row.root, Sign::Plus)?;
            let f = ef.normalize(rule.clone())?;
            let state = project(&f, &basis)?;
            let tr = trace_state(&state, t_end, settings.step_for(n))?;
            let arrival = tr
                .arrival(ef.tau)
                .ok_or_else(|| invalid("t_end", format!("trace ends before tau = {}", ef.tau)))?;
            Ok(ArrivalResult {
                n,
                tau: ef.tau,
                t_min: tr.t_min,
                var_min: tr.var_min,
                var_at_tau: arrival.var_at_tau,
                mean_at_tau: arrival.mean_at_tau,
                captured: tr.captured,
                nodal: nodal_class(&evolve(&state, tr.t_min)),
                single_dip: tr.has_single_dip(2.0 * ef.tau),
            })
        })
        .collect()
}

/// Reproduces Table I, II or III and compares it row by row.
pub fn reproduce_arrival_table(id: TableId, settings: &ArrivalSettings) -> Result<TableReport> {
    let reference = arrival_reference(id)?;
    let arrivals = arrival_results(id, settings)?;
    let mut checks = Vec::new();
    for a in &arrivals {
        let Some(r) = reference.iter().find(|r| r.n == a.n) else {
            continue;
        };
        checks.push(Check::new(a.n, a.tau, "eigenvalue", a.tau, r.eigenvalue.value, r.eigenvalue.half_unit));
        let (var_tol, enforce_at_tau) = match id {
            TableId::Mixed if a.n % 2 == 0 => (MIXED_EVEN_VARIANCE_TOL, false),
            TableId::Mixed => (MIXED_ODD_VARIANCE_TOL, false),
            _ => (PARITY_VARIANCE_TOL, true),
        };
        if let Some(v) = r.var_min {
            checks.push(Check::relative(a.n, a.tau, "var_min", a.var_min, v.value, var_tol));
        }
        if let Some(v) = r.var_at_tau {
            let c = Check::relative(a.n, a.tau, "var_at_tau", a.var_at_tau, v.value, var_tol);
            checks.push(if enforce_at_tau { c } else { c.info() });
        }
        if let Some(m) = r.mean_at_tau {
            checks.push(Check::new(a.n, a.tau, "mean_at_tau", a.mean_at_tau, m.value, MIXED_MEAN_TOL));
        }
    }
    Ok(TableReport {
        table: id,
        arrivals,
        checks,
    })
}

/// Reproduces Table IV with `quad_order` Gauss-Legendre points.
///
/// Closed-form eigenvalues are compared with the printed exact column to
/// half a unit in the last place. For `γ = 0` the Nystrom eigenvalues,
/// Richardson-extrapolated from orders `N` and `N/2`, must match the printed
/// column within `1e-6`; for `γ = π/8, π/4` plain Nystrom must match the closed
/// form within `5e-4`. The printed numeric columns are reported for reference.
pub fn reproduce_spectrum_table(quad_order: usize) -> Result<TableReport> {
    let reference = spectrum_reference()?;
    let count = reference.len();
    let mut checks = Vec::new();
    for (col, &gamma) in SPECTRUM_GAMMAS.iter().enumerate() {
        let p = PhysicalParams::atomic(gamma)?;
        let exact: Vec<f64> = merged_eigenvalues(&p, count)?
            .iter()
            .map(|(_, r)| r.tau_plus)
            .collect();
        let label = |what: &str| format!("{what}[gamma={gamma:.6}]");
        let numeric = if col == 0 {
            extrapolated_eigenvalues(&p, quad_order, count)?.0
        } else {
            numeric_eigenvalues(&p, quad_order, count)?.0
        };
        for (i, r) in reference.iter().enumerate() {
            let (ex, num) = r.columns[col];
            checks.push(Check::new(r.n, exact[i], &label("closed_form"), exact[i], ex.value, ex.half_unit));
            if col == 0 {
                checks.push(Check::new(r.n, exact[i], &label("nystrom"), numeric[i], ex.value, PERIODIC_NYSTROM_TOL));
            } else {
                checks.push(Check::new(r.n, exact[i], &label("nystrom"), numeric[i], exact[i], MIXED_NYSTROM_TOL));
            }
            checks.push(Check::new(r.n, exact[i], &label("printed_numeric"), numeric[i], num.value, num.half_unit).info());
        }
    }
    Ok(TableReport {
        table: TableId::Spectrum,
        arrivals: Vec::new(),
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_values_keep_their_precision() {
        let p = Printed::parse("9.970", 1e-3).unwrap().unwrap();
        assert!((p.value - 9.970e-3).abs() < 1e-17);
        assert!((p.half_unit - 5e-7).abs() < 1e-19);
        assert!(Printed::parse("  ", 1.0).unwrap().is_none());
        assert!(Printed::parse("x", 1.0).is_err());
    }

    #[test]
    fn reference_tables_load() {
        for id in [TableId::PeriodicEven, TableId::AntiperiodicOdd, TableId::Mixed] {
            let rows = arrival_reference(id).unwrap();
            assert_eq!(rows.len(), 10);
            assert_eq!(rows[0].n, 1);
        }
        let t3 = arrival_reference(TableId::Mixed).unwrap();
        assert!(t3[0].var_min.is_none());
        assert!((t3[3].mean_at_tau.unwrap().value + 0.49e-4).abs() < 1e-12);
        let t4 = spectrum_reference().unwrap();
        assert_eq!(t4.len(), 7);
        assert!((t4[0].columns[1].1.value - 0.73953).abs() < 1e-15);
    }

    #[test]
    fn table_ids_round_trip() {
        for n in 1..=4 {
            assert_eq!(TableId::from_number(n).unwrap().number(), n);
        }
        assert!(TableId::from_number(5).is_none());
    }
}
