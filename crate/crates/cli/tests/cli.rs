use std::path::Path;
use std::process::{Command, Output};

fn qlorenz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qlorenz")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn help_succeeds() {
    let out = qlorenz(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("Exit codes"));
    assert_eq!(qlorenz(&["tables", "--help"]).status.code(), Some(0));
}

#[test]
fn uniform_coefficient() {
    let out = qlorenz(&["gini", "--dist", "uniform", "--index", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("0.333333"));
}

#[test]
fn invalid_input_exits_with_one() {
    for args in [
        &["gini", "--dist", "nosuch:a=1"][..],
        &["gini", "--dist", "paretoII:a=-1"],
        &["gini", "--dist", "paretoII:a=1,zeta=2"],
        &["curve", "--dist", "uniform", "--p", "1.5"],
        &["simulate", "--dist", "uniform"],
        &["frobnicate"],
    ] {
        let out = qlorenz(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}: {}", stderr(&out));
    }
}

#[test]
fn heavy_tail_needs_the_extension_flag() {
    let out = qlorenz(&["gini", "--dist", "paretoII:a=1", "--index", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("--extend-heavy-tail"));
    let out = qlorenz(&["gini", "--dist", "paretoII:a=1", "--index", "0", "--extend-heavy-tail"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("1.000000"));
}

#[test]
fn constant_incomes_have_no_inequality() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("incomes.csv");
    std::fs::write(&data, "income\n7\n7\n7\n7\n").unwrap();
    let csv = dir.path().join("est.csv");
    let out = qlorenz(&[
        "--out",
        csv.to_str().unwrap(),
        "estimate",
        "--data",
        data.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let rows = read_csv(&csv);
    assert_eq!(rows[0][..2], ["index", "estimate"]);
    for row in &rows[1..] {
        assert!(row[1].parse::<f64>().unwrap().abs() < 1e-15, "{row:?}");
    }
}

#[test]
fn negative_incomes_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("incomes.csv");
    std::fs::write(&data, "1\n-2\n3\n").unwrap();
    let out = qlorenz(&["estimate", "--data", data.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn output_format_follows_the_extension() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("g.json");
    let out = qlorenz(&["--out", json.to_str().unwrap(), "gini", "--dist", "lognormal"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let value: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    let rows = value.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0]["extended"], serde_json::Value::Bool(false));

    let bad = dir.path().join("g.txt");
    let out = qlorenz(&["--out", bad.to_str().unwrap(), "gini", "--dist", "lognormal"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!bad.exists());
}

#[test]
fn seeded_runs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for (k, workers) in ["1", "3", "1"].into_iter().enumerate() {
        let path = dir.path().join(format!("run{k}.csv"));
        let out = qlorenz(&[
            "--workers",
            workers,
            "--out",
            path.to_str().unwrap(),
            "simulate",
            "--dist",
            "weibull:beta=0.5",
            "--n",
            "20,50",
            "--reps",
            "64",
            "--seed",
            "42",
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        files.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(files[0], files[1]);
    assert_eq!(files[0], files[2]);
}

/// G0..G3 in catalogue order.
const PRINTED: [[f64; 4]; 14] = [
    [0.333, 0.333, 0.455, 0.333],
    [0.762, 0.671, 0.792, 0.720],
    [0.636, 0.525, 0.673, 0.572],
    [0.423, 0.329, 0.483, 0.361],
    [0.339, 0.261, 0.406, 0.285],
    [0.520, 0.333, 0.510, 0.388],
    [1.000, 0.515, 0.704, 0.610],
    [1.000, 0.455, 0.636, 0.528],
    [0.741, 0.434, 0.609, 0.497],
    [0.667, 0.424, 0.595, 0.481],
    [0.937, 0.731, 0.843, 0.787],
    [0.750, 0.570, 0.720, 0.629],
    [0.500, 0.393, 0.550, 0.432],
    [0.159, 0.136, 0.222, 0.134],
];

#[test]
fn coefficient_table_matches_the_reference_values() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table1.csv");
    let out = qlorenz(&["--out", path.to_str().unwrap(), "tables", "--which", "table1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let rows = read_csv(&path);
    let header = &rows[0];
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let cols = [col("G0"), col("G1"), col("G2"), col("G3")];
    let mut off = Vec::new();
    for (row, printed) in rows[1..15].iter().zip(PRINTED) {
        for (k, &c) in cols.iter().enumerate() {
            let v: f64 = row[c].parse().unwrap();
            if (v - printed[k]).abs() > 0.002 {
                off.push(format!("{}/G{k}", row[0]));
            }
        }
    }
    // The reference G0 for Pareto(1.5) is 0.741; the exact grid value is 0.750.
    assert_eq!(off, ["Pareto(1.5)/G0"]);
}

#[test]
fn stochastic_tables_need_a_seed() {
    let out = qlorenz(&["tables", "--which", "table2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn transfer_example_quantities() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let out = qlorenz(&[
        "--out",
        path.to_str().unwrap(),
        "transfer",
        "--dist",
        "paretoII:a=2,sigma=100000",
        "--p0",
        "0.2",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let rows = read_csv(&path);
    let get = |name: &str| -> f64 { rows.iter().find(|r| r[0] == name).unwrap()[1].parse().unwrap() };
    assert!((get("poverty_line_b") - 11_803.398_875).abs() < 1e-5);
    assert!((get("levy_threshold_c") - 123_606.797_750).abs() < 1e-5);
    assert!((get("median_after") - get("median_before")).abs() < 1e-6);
}
