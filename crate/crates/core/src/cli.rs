//! The `ctoa` command line: one positional task plus flags.
//!
//! ```text
//! ctoa spectrum --gamma pi/8 --count 7
//! ctoa evolve --gamma 0.01 --n 4 --modes 601 --output trace.csv
//! ctoa table2 --rows 5 --format json
//! ```
//!
//! Exit status is 0 when every enforced comparison passes, 1 on a numerical
//! mismatch or failure, and 2 on a usage error.
//!
//! CSV output has a fixed header per task; numbers carry 12 significant
//! digits. JSON output is one object with the keys `config`, `results` and
//! `residuals`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::{
    boundary_probe, commutator_defect, commutator_residual, make_canonical_vector, predicted_boundary_defect,
    violation_probe,
};
use crate::analytic::{
    eigenvalues, merged_eigenvalues, symmetry_report, AnalyticEigenfunction, CharacteristicCase, Parity,
    SYMMETRY_TOLERANCE,
};
use crate::error::Error;
use crate::evolution::{evolve, nodal_class, project, trace_state, PlaneWaveBasis};
use crate::kernel::PhysicalParams;
use crate::nystrom::{numeric_eigenvalues, Sign};
use crate::quadrature::gauss_legendre_on;
use crate::tables::{
    reproduce_arrival_table, reproduce_spectrum_table, ArrivalSettings, TableId, TableReport, MIXED_NYSTROM_TOL,
};

/// Commutator residual bound for canonical test vectors.
pub const COMMUTATOR_TOLERANCE: f64 = 1e-3;
/// Residual a vector outside the canonical domain must exceed.
pub const VIOLATION_THRESHOLD: f64 = 0.1;
/// Relative agreement of the boundary-probe defect with its prediction.
pub const BOUNDARY_TOLERANCE: f64 = 1e-3;

const DEFAULT_ORDER: usize = 2000;
const DEFAULT_K: usize = 200;
const DEFAULT_DT: f64 = 1e-4;
const DEFAULT_COUNT: usize = 10;
const MIXED_TABLE_K: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    /// Closed-form and Nystrom eigenvalues side by side.
    Spectrum,
    /// Position moments of one evolved eigenfunction.
    Evolve,
    /// Periodic even arrivals.
    Table1,
    /// Antiperiodic odd arrivals.
    Table2,
    /// Arrivals at gamma = 0.01.
    Table3,
    /// Eigenvalues at gamma = 0, pi/8, pi/4.
    Table4,
    /// Parity and time-reversal relations between eigenfunctions.
    Symmetry,
    /// Canonical commutation on test vectors.
    Commutator,
}

impl Task {
    fn table(self) -> Option<TableId> {
        match self {
            Task::Table1 => Some(TableId::PeriodicEven),
            Task::Table2 => Some(TableId::AntiperiodicOdd),
            Task::Table3 => Some(TableId::Mixed),
            Task::Table4 => Some(TableId::Spectrum),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SignArg {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyArg {
    Even,
    Odd,
}

#[derive(Debug, Parser)]
#[command(name = "ctoa", version, about = "Confined time-of-arrival operators: spectra, arrivals and tables")]
struct Args {
    task: Task,
    #[arg(long, help = "Mass [default: 1]")]
    mu: Option<f64>,
    #[arg(long, help = "Reduced Planck constant [default: 1]")]
    hbar: Option<f64>,
    #[arg(long = "l", help = "Half-length of the confining box [default: 1]")]
    l: Option<f64>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_angle,
          help = "Boundary phase; accepts numbers and forms like pi/8 or -3pi/8 [default: 0]")]
    gamma: Option<f64>,
    #[arg(long, help = "Gauss-Legendre order N [default: 2000]")]
    order: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_COUNT, help = "Number of eigenvalues")]
    count: usize,
    #[arg(long, default_value_t = 1, help = "Eigenfunction index for evolve")]
    n: usize,
    #[arg(long, value_enum, default_value_t = SignArg::Plus)]
    sign: SignArg,
    #[arg(long, value_enum, help = "Restrict evolve to one parity family (gamma = 0 or pi/2)")]
    family: Option<FamilyArg>,
    #[arg(long, conflicts_with = "k", help = "Number of plane-wave modes (odd)")]
    modes: Option<usize>,
    #[arg(long, help = "Mode cutoff K [default: 200]")]
    k: Option<usize>,
    #[arg(long, help = "Time step [default: 1e-4]")]
    dt: Option<f64>,
    #[arg(long = "t-end", allow_hyphen_values = true, help = "End of the trace [default: twice the eigenvalue]")]
    t_end: Option<f64>,
    #[arg(long, help = "Reproduce table rows up to this index")]
    rows: Option<usize>,
    #[arg(long, short, help = "Output file [default: standard output]")]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

/// A fully resolved run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub task: Task,
    pub params: PhysicalParams,
    pub quad_order: usize,
    pub k_max: usize,
    pub dt: f64,
    pub t_end: Option<f64>,
    pub count: usize,
    pub index: usize,
    pub sign: SignArg,
    pub family: Option<FamilyArg>,
    pub rows: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: Format,
}

/// Command-line failure: bad usage (exit 2) or a failed run (exit 1).
#[derive(Debug)]
pub enum CliError {
    /// Help or version text; not an error.
    Info(String),
    Usage(String),
    Run(Error),
    Io(io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Info(m) | CliError::Usage(m) => f.write_str(m),
            CliError::Run(e) => write!(f, "error: {e}"),
            CliError::Io(e) => write!(f, "error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Run(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.into())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Info(_) => 0,
            CliError::Usage(_) => 2,
            CliError::Run(_) | CliError::Io(_) => 1,
        }
    }
}

/// Parses `"0.3"`, `"pi"`, `"pi/8"`, `"-3pi/8"`, `"3*pi/8"`.
pub fn parse_angle(text: &str) -> std::result::Result<f64, String> {
    let t = text.trim().to_ascii_lowercase();
    if let Ok(v) = t.parse::<f64>() {
        return if v.is_finite() { Ok(v) } else { Err(format!("`{text}` is not finite")) };
    }
    let bad = || format!("`{text}` is not a number or a multiple of pi");
    let (num, den) = t.split_once('/').map_or((t.as_str(), None), |(a, b)| (a, Some(b)));
    let coeff = num.strip_suffix("pi").ok_or_else(bad)?.trim_end_matches('*');
    let coeff = match coeff {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    let den = match den {
        Some(d) => d.trim().parse::<f64>().map_err(|_| bad())?,
        None => 1.0,
    };
    let v = coeff * PI / den;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

/// Maps `γ` into `(−π/2, π/2]`. The operators depend on `γ` only modulo `π`.
pub fn reduce_angle(gamma: f64) -> f64 {
    let r = gamma - PI * (gamma / PI).round();
    if r <= -FRAC_PI_2 {
        r + PI
    } else {
        r
    }
}

fn usage(msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("error: {msg}\n\nFor more information, try '--help'."))
}

/// Parses `argv` (including the program name) into a resolved configuration.
pub fn parse_args<I, T>(argv: I) -> std::result::Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::error::ErrorKind;
    let a = Args::try_parse_from(argv).map_err(|e| match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CliError::Info(e.render().to_string()),
        _ => CliError::Usage(e.render().to_string()),
    })?;
    let table = a.task.table();
    let params = match table {
        Some(id) => {
            if a.mu.is_some() || a.hbar.is_some() || a.l.is_some() || a.gamma.is_some() {
                return Err(usage("table tasks use the published parameters; drop --mu/--hbar/--l/--gamma"));
            }
            PhysicalParams::atomic(match id {
                TableId::PeriodicEven | TableId::Spectrum => 0.0,
                TableId::AntiperiodicOdd => FRAC_PI_2,
                TableId::Mixed => 0.01,
            })
        }
        None => PhysicalParams::new(
            a.mu.unwrap_or(1.0),
            a.hbar.unwrap_or(1.0),
            a.l.unwrap_or(1.0),
            reduce_angle(a.gamma.unwrap_or(0.0)),
        ),
    }
    .map_err(usage)?;

    let k_max = match (a.modes, a.k) {
        (Some(m), _) if m % 2 == 0 || m == 0 => return Err(usage(format!("--modes must be odd, got {m}"))),
        (Some(m), _) => m / 2,
        (None, Some(k)) => k,
        (None, None) if a.task == Task::Table3 => MIXED_TABLE_K,
        (None, None) => DEFAULT_K,
    };
    let quad_order = a.order.unwrap_or(DEFAULT_ORDER);
    if quad_order < 2 {
        return Err(usage("--order must be at least 2"));
    }
    if matches!(a.task, Task::Evolve | Task::Table1 | Task::Table2 | Task::Table3) && quad_order < 4 * k_max {
        return Err(usage(format!("--order {quad_order} cannot resolve K = {k_max}; need at least {}", 4 * k_max)));
    }
    let dt = a.dt.unwrap_or(DEFAULT_DT);
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(usage(format!("--dt must be positive, got {dt}")));
    }
    if let Some(t) = a.t_end {
        if !(t.is_finite() && t != 0.0) {
            return Err(usage(format!("--t-end must be finite and nonzero, got {t}")));
        }
    }
    if a.count == 0 {
        return Err(usage("--count must be positive"));
    }
    if a.n == 0 {
        return Err(usage("--n starts at 1"));
    }
    if a.rows == Some(0) {
        return Err(usage("--rows must be positive"));
    }
    if a.family.is_some() && CharacteristicCase::with_parity(&params, Parity::Even).is_none() {
        return Err(usage("--family needs gamma = 0 or gamma = pi/2"));
    }
    Ok(RunConfig {
        task: a.task,
        params,
        quad_order,
        k_max,
        dt,
        t_end: a.t_end,
        count: a.count,
        index: a.n,
        sign: a.sign,
        family: a.family,
        rows: a.rows,
        output: a.output,
        format: a.format,
    })
}

/// Formats with 12 significant digits, in positional notation where that is
/// short and scientific notation otherwise.
pub fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let e = x.abs().log10().floor() as i32;
    if (-5..12).contains(&e) {
        format!("{:.*}", (11 - e) as usize, x)
    } else {
        format!("{x:.11e}")
    }
}

/// Tabular output of one run.
#[derive(Debug, Clone)]
pub struct Report {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub results: Value,
    pub residuals: Value,
    /// All enforced comparisons passed.
    pub passed: bool,
}

impl Report {
    fn write_csv<W: Write>(&self, w: W) -> std::result::Result<(), CliError> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(&self.header)?;
        for r in &self.rows {
            wr.write_record(r)?;
        }
        wr.flush()?;
        Ok(())
    }

    fn write_json<W: Write>(&self, config: &RunConfig, mut w: W) -> std::result::Result<(), CliError> {
        let doc = json!({
            "config": config,
            "results": self.results,
            "residuals": self.residuals,
        });
        serde_json::to_writer_pretty(&mut w, &doc).map_err(io::Error::from)?;
        writeln!(w)?;
        Ok(())
    }

    pub fn write<W: Write>(&self, config: &RunConfig, w: W) -> std::result::Result<(), CliError> {
        match config.format {
            Format::Csv => self.write_csv(w),
            Format::Json => self.write_json(config, w),
        }
    }
}

fn sign_of(s: SignArg) -> Sign {
    match s {
        SignArg::Plus => Sign::Plus,
        SignArg::Minus => Sign::Minus,
    }
}

fn bool_str(b: bool) -> String {
    b.to_string()
}

fn spectrum(c: &RunConfig) -> crate::Result<Report> {
    let p = &c.params;
    let rows = merged_eigenvalues(p, c.count)?;
    let (plus, minus) = numeric_eigenvalues(p, c.quad_order, c.count)?;
    let mut out = Vec::new();
    let mut results = Vec::new();
    let mut worst: f64 = 0.0;
    let mut passed = true;
    for (i, (case, row)) in rows.iter().enumerate() {
        for (sign, exact, numeric) in [(Sign::Plus, row.tau_plus, plus[i]), (Sign::Minus, row.tau_minus, minus[i])] {
            let dev = (exact - numeric).abs();
            let pass = dev <= MIXED_NYSTROM_TOL;
            worst = worst.max(dev);
            passed &= pass;
            out.push(vec![
                row.n.to_string(),
                sign.symbol().to_string(),
                case.label(),
                sig12(row.root),
                sig12(exact),
                sig12(numeric),
                sig12(dev),
                bool_str(pass),
            ]);
            results.push(json!({
                "n": row.n, "sign": sign.symbol().to_string(), "family": case.label(), "root": row.root,
                "tau_closed_form": exact, "tau_nystrom": numeric, "deviation": dev, "pass": pass,
            }));
        }
    }
    Ok(Report {
        header: vec!["n", "sign", "family", "root", "tau_closed_form", "tau_nystrom", "deviation", "pass"],
        rows: out,
        results: Value::Array(results),
        residuals: json!({ "max_deviation": worst, "tolerance": MIXED_NYSTROM_TOL }),
        passed,
    })
}

fn evolve_task(c: &RunConfig) -> crate::Result<Report> {
    let p = &c.params;
    let (case, root) = match c.family {
        Some(fam) => {
            let parity = if fam == FamilyArg::Even { Parity::Even } else { Parity::Odd };
            let case = CharacteristicCase::with_parity(p, parity)
                .ok_or_else(|| crate::error::invalid("family", "needs gamma = 0 or pi/2"))?;
            (case, eigenvalues(p, case, c.index)?[c.index - 1].root)
        }
        None => {
            let (case, row) = merged_eigenvalues(p, c.index)?[c.index - 1];
            (case, row.root)
        }
    };
    let ef = AnalyticEigenfunction::from_root(p, case, c.index, root, sign_of(c.sign))?;
    let rule = Arc::new(gauss_legendre_on(c.quad_order, p.l)?);
    let f = ef.normalize(rule)?;
    let state = project(&f, &PlaneWaveBasis::new(*p, c.k_max)?)?;
    let t_end = c.t_end.unwrap_or(2.0 * ef.tau);
    let tr = trace_state(&state, t_end, c.dt.copysign(t_end))?;
    let arrival = tr.arrival(ef.tau);
    let nodal = nodal_class(&evolve(&state, tr.t_min));
    let rows = (0..tr.times.len())
        .map(|i| vec![sig12(tr.times[i]), sig12(tr.mean_q[i]), sig12(tr.var_q[i])])
        .collect();
    let results = Value::Array(
        (0..tr.times.len())
            .map(|i| json!({ "t": tr.times[i], "mean_q": tr.mean_q[i], "var_q": tr.var_q[i] }))
            .collect(),
    );
    Ok(Report {
        header: vec!["t", "mean_q", "var_q"],
        rows,
        results,
        residuals: json!({
            "family": case.label(),
            "tau": ef.tau,
            "t_min": tr.t_min,
            "var_min": tr.var_min,
            "mean_at_tau": arrival.map(|a| a.mean_at_tau),
            "var_at_tau": arrival.map(|a| a.var_at_tau),
            "captured": tr.captured,
            "nodal": nodal,
        }),
        passed: true,
    })
}

fn table_report(r: TableReport) -> Report {
    let rows = r
        .checks
        .iter()
        .map(|c| {
            vec![
                c.n.to_string(),
                sig12(c.eigenvalue),
                c.quantity.clone(),
                sig12(c.computed),
                sig12(c.reference),
                sig12(c.tolerance),
                bool_str(c.enforced),
                bool_str(c.pass),
            ]
        })
        .collect();
    let failures = r.failures().count();
    let worst = r
        .checks
        .iter()
        .filter(|c| c.enforced)
        .map(|c| c.deviation() / c.tolerance)
        .fold(0.0, f64::max);
    Report {
        header: vec!["n", "eigenvalue", "quantity", "computed", "reference", "tolerance", "enforced", "pass"],
        rows,
        residuals: json!({ "failures": failures, "worst_deviation_over_tolerance": worst }),
        passed: r.passed(),
        results: json!({ "table": r.table.number(), "arrivals": r.arrivals, "checks": r.checks }),
    }
}

fn arrival_table(c: &RunConfig, id: TableId) -> crate::Result<Report> {
    let mut s = ArrivalSettings::for_table(id);
    s.quad_order = c.quad_order;
    s.k_max = c.k_max;
    s.dt = c.dt;
    s.fine_dt = s.fine_dt.min(c.dt);
    s.t_end = c.t_end;
    if let Some(r) = c.rows {
        s.rows.retain(|&n| n <= r);
        if s.rows.is_empty() {
            return Err(crate::error::invalid("rows", format!("table {} has no rows up to {r}", id.number())));
        }
    }
    Ok(table_report(reproduce_arrival_table(id, &s)?))
}

fn symmetry(c: &RunConfig) -> crate::Result<Report> {
    let rep = symmetry_report(&c.params, c.count)?;
    let rows = rep
        .rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                format!("{:?}", r.relation).to_lowercase(),
                format!("{:?}", r.representation).to_lowercase(),
                sig12(r.residual),
                bool_str(r.residual <= SYMMETRY_TOLERANCE),
            ]
        })
        .collect();
    let worst = rep.max_overall();
    Ok(Report {
        header: vec!["n", "relation", "representation", "residual", "pass"],
        rows,
        results: serde_json::to_value(&rep.rows).unwrap_or(Value::Null),
        residuals: json!({ "max_residual": worst, "tolerance": SYMMETRY_TOLERANCE }),
        passed: worst <= SYMMETRY_TOLERANCE,
    })
}

fn commutator(c: &RunConfig) -> crate::Result<Report> {
    let p = &c.params;
    let periodic = p.is_periodic();
    let h: &[f64] = if periodic { &[0.0, 1.0] } else { &[1.0] };
    let v = make_canonical_vector(p, h, periodic)?;
    let coarse = c.quad_order;
    let fine = 2 * coarse;
    let r_coarse = commutator_residual(p, &v, coarse)?;
    let r_fine = commutator_residual(p, &v, fine)?;
    let r_violation = commutator_residual(p, &violation_probe(p)?, fine)?;

    // (vector, grid, measured, bound, pass)
    let mut checks: Vec<(&str, usize, f64, f64, bool)> = vec![
        ("canonical", coarse, r_coarse, COMMUTATOR_TOLERANCE, r_coarse < COMMUTATOR_TOLERANCE),
        ("canonical", fine, r_fine, COMMUTATOR_TOLERANCE, r_fine < COMMUTATOR_TOLERANCE && r_fine < r_coarse),
        ("violation", fine, r_violation, VIOLATION_THRESHOLD, r_violation > VIOLATION_THRESHOLD),
    ];
    if !periodic && p.gamma.cos().abs() > 1e-12 {
        let probe = boundary_probe(p);
        let d = commutator_defect(p, &probe, fine)?;
        let predicted = predicted_boundary_defect(p, &probe);
        let rel = (d.mean() - predicted).norm() / predicted.norm();
        checks.push(("boundary", fine, rel, BOUNDARY_TOLERANCE, rel < BOUNDARY_TOLERANCE));
    }
    let rows = checks
        .iter()
        .map(|&(name, n, r, b, ok)| vec![name.to_string(), n.to_string(), sig12(r), sig12(b), bool_str(ok)])
        .collect();
    let results = Value::Array(
        checks
            .iter()
            .map(|&(name, n, r, b, ok)| json!({ "vector": name, "grid": n, "residual": r, "bound": b, "pass": ok }))
            .collect(),
    );
    Ok(Report {
        header: vec!["vector", "grid", "residual", "bound", "pass"],
        rows,
        results,
        residuals: json!({ "canonical": r_fine, "violation": r_violation, "refinement_ratio": r_coarse / r_fine }),
        passed: checks.iter().all(|c| c.4),
    })
}

/// Computes the report for a configuration without writing it.
pub fn compute(config: &RunConfig) -> crate::Result<Report> {
    match (config.task, config.task.table()) {
        (Task::Spectrum, _) => spectrum(config),
        (Task::Evolve, _) => evolve_task(config),
        (Task::Symmetry, _) => symmetry(config),
        (Task::Commutator, _) => commutator(config),
        (_, Some(TableId::Spectrum)) => Ok(table_report(reproduce_spectrum_table(config.quad_order)?)),
        (_, Some(id)) => arrival_table(config, id),
        (_, None) => unreachable!("every remaining task is a table"),
    }
}

/// Runs a configuration, writes its output and returns the exit status.
pub fn run(config: &RunConfig) -> std::result::Result<i32, CliError> {
    let report = compute(config)?;
    match &config.output {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            report.write(config, &mut w)?;
            w.flush()?;
        }
        None => report.write(config, io::stdout().lock())?,
    }
    Ok(if report.passed { 0 } else { 1 })
}

/// Entry point shared by the binary: parse, run, report errors on stderr.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match parse_args(argv).and_then(|c| run(&c)) {
        Ok(code) => code,
        Err(CliError::Info(m)) => {
            print!("{m}");
            0
        }
        Err(e) => {
            let msg = e.to_string();
            eprint!("{msg}");
            if !msg.ends_with('\n') {
                eprintln!();
            }
            e.exit_code()
        }
    }
}
