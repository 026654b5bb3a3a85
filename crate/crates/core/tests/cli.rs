mod common;

use std::path::Path;
use std::process::{Command, Output};

use fpdim::output::OutputRecord;

use common::quantum_dimension;

fn fpdim(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fpdim"))
        .args(args)
        .env("FPDIM_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

fn json(cache: &Path, args: &[&str]) -> OutputRecord {
    let mut args = args.to_vec();
    args.push("--json");
    let out = fpdim(cache, &args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    OutputRecord::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap()
}

fn column(rec: &OutputRecord, name: &str) -> Vec<String> {
    let idx = rec
        .columns
        .iter()
        .position(|c| c == name)
        .expect("column exists");
    rec.rows.iter().map(|r| r[idx].clone()).collect()
}

#[test]
fn rho_golden_values() {
    let dir = tempfile::tempdir().unwrap();
    let out = fpdim(
        dir.path(),
        &["rho", "--k", "2", "--n", "4", "--lambda", "1,0"],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("rho: 1.41421356237310\n"));
    let rec = json(
        dir.path(),
        &[
            "rho",
            "--k",
            "2",
            "--n",
            "3",
            "--lambda",
            "1,0",
            "--exact-check",
        ],
    );
    assert_eq!(rec.summary["rho"], "1.00000000000000");
    assert_eq!(rec.summary["spectral_radius"], "1.00000000000000");
}

#[test]
fn box_violation_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = fpdim(
        dir.path(),
        &["rho", "--k", "2", "--n", "4", "--lambda", "3,0"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("not in P_2(4)"));
}

#[test]
fn malformed_arguments_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["rho", "--k", "2", "--n", "4", "--lambda", "x"][..],
        &["fpdim", "--k", "2"],
        &["fpdim", "--k", "2", "--n", "5", "--r", "3"],
        &["verify", "nonsense"],
        &[
            "rho", "--k", "2", "--n", "4", "--lambda", "1", "--tol", "-1",
        ],
    ] {
        assert_eq!(fpdim(dir.path(), args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn fpdim_table_matches_closed_forms() {
    let dir = tempfile::tempdir().unwrap();
    let rec = json(dir.path(), &["fpdim", "--k", "2", "--n", "4"]);
    let labels = column(&rec, "lambda");
    assert_eq!(labels, ["0", "1", "2", "1,1", "2,1", "2,2"]);
    for (label, value) in labels.iter().zip(column(&rec, "fpdim")) {
        let parts: Vec<usize> = match label.as_str() {
            "0" => vec![],
            s => s.split(',').map(|x| x.parse().unwrap()).collect(),
        };
        let expected = quantum_dimension(&parts, 2, 4.0);
        let got: f64 = value.parse().unwrap();
        assert!(
            (got - expected).abs() < 1e-8,
            "{label}: {got} vs {expected}"
        );
    }
    assert_eq!(rec.summary["homomorphism_violations"], "0");
    assert!(dir.path().join("gr-2-4-quantum.tbl").exists());
}

#[test]
fn classical_filtration_level_is_trivial() {
    let dir = tempfile::tempdir().unwrap();
    let rec = json(
        dir.path(),
        &["fpdim", "--k", "2", "--mode", "classical", "--r", "3"],
    );
    for (label, value) in column(&rec, "lambda").iter().zip(column(&rec, "fpdim")) {
        let expected = if label == "0" {
            "1.00000000000000"
        } else {
            "0.00000000000000"
        };
        assert_eq!(value, expected, "{label}");
    }
}

#[test]
fn qprod_rows_sorted_by_degree() {
    let dir = tempfile::tempdir().unwrap();
    let rec = json(
        dir.path(),
        &[
            "qprod", "--k", "2", "--n", "4", "--lambda", "1", "--mu", "1",
        ],
    );
    assert_eq!(rec.rows, [["2", "0", "1"], ["1,1", "0", "1"]]);
    let rec = json(
        dir.path(),
        &[
            "qprod", "--k", "3", "--n", "6", "--lambda", "0", "--mu", "3,1",
        ],
    );
    assert_eq!(rec.rows, [["3,1", "0", "1"]]);
    let rec = json(
        dir.path(),
        &[
            "qprod", "--k", "2", "--n", "4", "--lambda", "1", "--mu", "2,1",
        ],
    );
    assert_eq!(rec.rows, [["2,2", "0", "1"], ["0", "1", "1"]]);
}

#[test]
fn lr_and_fusion_and_dim() {
    let dir = tempfile::tempdir().unwrap();
    let rec = json(
        dir.path(),
        &["lr", "--lambda", "2,1", "--mu", "2,1", "--nu", "3,2,1"],
    );
    assert_eq!(rec.summary["coefficient"], "2");
    let rec = json(
        dir.path(),
        &["lr", "--lambda", "1", "--mu", "1", "--k", "2", "--n", "4"],
    );
    assert_eq!(rec.rows, [["2", "1"], ["1,1", "1"]]);
    let rec = json(
        dir.path(),
        &[
            "fusion", "--k", "2", "--r", "1", "--lambda", "1", "--mu", "1",
        ],
    );
    assert_eq!(rec.rows, [["1,1", "1"]]);
    let rec = json(dir.path(), &["dim", "--k", "4", "--lambda", "6,4,2,1"]);
    assert_eq!(rec.summary["dim"], "360");
}

#[test]
fn limit_converges_to_schur_dimension() {
    let dir = tempfile::tempdir().unwrap();
    let rec = json(
        dir.path(),
        &["limit", "--k", "2", "--lambda", "2,1", "--r-max", "200"],
    );
    assert_eq!(rec.summary["target"], "2");
    assert_eq!(rec.summary["converged"], "true");
    assert_eq!(rec.summary["strictly_increasing"], "true");
    assert_eq!(rec.rows.len(), 199);
}

#[test]
fn galkin_equality_exactly_at_extremes() {
    let dir = tempfile::tempdir().unwrap();
    let rec = json(dir.path(), &["galkin", "--k-max", "5", "--n-max", "30"]);
    assert!(rec.violations.is_empty());
    for row in &rec.rows {
        let k: usize = row[0].parse().unwrap();
        let n: usize = row[1].parse().unwrap();
        assert_eq!(row[4] == "true", k == 1 || k == n - 1, "{row:?}");
    }
}

#[test]
fn verify_all_is_green() {
    let dir = tempfile::tempdir().unwrap();
    let out = fpdim(dir.path(), &["verify", "all"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["fpdim", "--k", "3", "--n", "6", "--json", "--no-cache"];
    let one = fpdim(dir.path(), &[&args[..], &["--threads", "1"]].concat());
    let four = fpdim(dir.path(), &[&args[..], &["--threads", "4"]].concat());
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    assert!(
        std::fs::read_dir(dir.path()).unwrap().next().is_none(),
        "--no-cache wrote a file"
    );
}

#[test]
fn cache_is_reused_and_damage_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["fpdim", "--k", "2", "--n", "5", "--json"];
    let first = fpdim(dir.path(), &args);
    let path = dir.path().join("gr-2-5-quantum.tbl");
    assert!(path.exists());
    let second = fpdim(dir.path(), &args);
    assert_eq!(first.stdout, second.stdout);
    std::fs::write(
        &path,
        "fpdim-product-table 1\nk 2 n 5 mode quantum\nend 1\n",
    )
    .unwrap();
    let damaged = fpdim(dir.path(), &args);
    assert_eq!(damaged.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&damaged.stderr).contains("cache"));
    let bypass = fpdim(dir.path(), &[&args[..], &["--no-cache"]].concat());
    assert_eq!(bypass.stdout, first.stdout);
}
