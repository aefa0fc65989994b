use std::f64::consts::{FRAC_PI_2, PI};
use std::process::Command;

use ctoa::cli::{compute, parse_angle, parse_args, reduce_angle, sig12, CliError, Format, Task};

fn ctoa(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_ctoa")).args(args).output().expect("binary runs")
}

#[test]
fn defaults_are_filled_in() {
    let c = parse_args(["ctoa", "spectrum"]).unwrap();
    assert_eq!(c.task, Task::Spectrum);
    assert_eq!((c.quad_order, c.k_max, c.count, c.index), (2000, 200, 10, 1));
    assert_eq!((c.params.mu, c.params.hbar, c.params.l, c.params.gamma), (1.0, 1.0, 1.0, 0.0));
    assert_eq!(c.dt, 1e-4);
    assert_eq!(c.format, Format::Csv);
    assert_eq!(parse_args(["ctoa", "table3"]).unwrap().k_max, 300);
    let e = parse_args(["ctoa", "evolve", "--gamma", "0.01", "--n", "4", "--modes", "601", "--order", "1200"]).unwrap();
    assert_eq!((e.k_max, e.index), (300, 4));
}

#[test]
fn angles_parse_and_reduce_modulo_pi() {
    assert_eq!(parse_angle("pi/8").unwrap(), PI / 8.0);
    assert_eq!(parse_angle("-3pi/8").unwrap(), -3.0 * PI / 8.0);
    assert_eq!(parse_angle("3*pi/8").unwrap(), 3.0 * PI / 8.0);
    assert_eq!(parse_angle("0.25").unwrap(), 0.25);
    assert!(parse_angle("x").is_err() && parse_angle("inf").is_err() && parse_angle("pi/0").is_err());
    assert!((reduce_angle(PI + 0.3) - 0.3).abs() < 1e-15);
    assert_eq!(reduce_angle(-FRAC_PI_2), FRAC_PI_2);
    assert!((reduce_angle(-PI / 8.0 - PI) + PI / 8.0).abs() < 1e-15);
    let c = parse_args(["ctoa", "spectrum", "--gamma", "pi/2"]).unwrap();
    assert_eq!(c.params.gamma, FRAC_PI_2);
}

#[test]
fn invalid_invocations_are_usage_errors() {
    let bad: &[&[&str]] = &[
        &["ctoa", "spectrum", "--gamma", "x"],
        &["ctoa", "spectrum", "--bogus"],
        &["ctoa", "table1", "--gamma", "0.3"],
        &["ctoa", "evolve", "--modes", "600"],
        &["ctoa", "evolve", "--k", "200", "--order", "500"],
        &["ctoa", "evolve", "--gamma", "0.3", "--family", "even"],
        &["ctoa", "spectrum", "--l", "-1"],
        &["ctoa", "evolve", "--n", "0"],
        &["ctoa", "evolve", "--dt", "0"],
        &["ctoa"],
    ];
    for argv in bad {
        match parse_args(argv.iter().copied()) {
            Err(e @ CliError::Usage(_)) => assert_eq!(e.exit_code(), 2),
            other => panic!("{argv:?} gave {other:?}"),
        }
    }
    assert!(matches!(parse_args(["ctoa", "--help"]), Err(CliError::Info(_))));
    let out = ctoa(&["spectrum", "--gamma", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty() && out.stdout.is_empty());
}

#[test]
fn twelve_significant_digits() {
    assert_eq!(sig12(0.1246075068021234), "0.124607506802");
    assert_eq!(sig12(-2.5), "-2.50000000000");
    assert!(sig12(1.23456789012345e-9).starts_with("1.23456789012e-9"));
}

#[test]
fn half_pi_spectrum_matches_the_bessel_root() {
    let out = ctoa(&["spectrum", "--gamma", "1.5708", "--count", "3", "--order", "800"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    let header = rows.headers().unwrap().clone();
    assert_eq!(
        header.iter().collect::<Vec<_>>(),
        ["n", "sign", "family", "root", "tau_closed_form", "tau_nystrom", "deviation", "pass"]
    );
    let first = rows.records().next().unwrap().unwrap();
    let tau: f64 = first[4].parse().unwrap();
    // first root of J_{-3/4}, τ = μl²/(ħ·4j²)... checked against an independent mpmath evaluation
    assert!((tau - 0.236181435316).abs() < 1e-9, "{tau}");
}

#[test]
fn output_is_deterministic_and_json_is_structured() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = ctoa(&["commutator", "--gamma", "pi/8", "--format", "json", "-o", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty());
    }
    let x = std::fs::read_to_string(&a).unwrap();
    let y = std::fs::read_to_string(&b).unwrap();
    // the files differ only in the recorded output path
    assert_eq!(x.replace("a.json", "b.json"), y);
    let first = ctoa(&["commutator", "--gamma", "pi/8"]);
    let second = ctoa(&["commutator", "--gamma", "pi/8"]);
    assert!(first.stdout == second.stdout && !first.stdout.is_empty());
    let doc: serde_json::Value = serde_json::from_str(&x).unwrap();
    for key in ["config", "results", "residuals"] {
        assert!(doc.get(key).is_some(), "missing {key}");
    }
    assert_eq!(doc["config"]["task"], "commutator");
    assert!(doc["residuals"]["canonical"].as_f64().unwrap() < 1e-3);
    assert!(doc["residuals"]["violation"].as_f64().unwrap() > 0.1);
}

#[test]
fn table_two_reproduces_its_first_rows() {
    let c = parse_args(["ctoa", "table2", "--rows", "3"]).unwrap();
    let report = compute(&c).unwrap();
    assert!(report.passed);
    assert_eq!(report.header, ["n", "eigenvalue", "quantity", "computed", "reference", "tolerance", "enforced", "pass"]);
    assert!(report.rows.iter().any(|r| r[0] == "1"));
    assert!(report.rows.iter().all(|r| r[6] != "true" || r[7] == "true"));
}

#[test]
fn symmetry_task_passes_for_a_general_phase() {
    let c = parse_args(["ctoa", "symmetry", "--gamma", "0.7", "--count", "3", "--order", "400"]).unwrap();
    let report = compute(&c).unwrap();
    assert!(report.passed);
    assert!(!report.rows.is_empty());
}
