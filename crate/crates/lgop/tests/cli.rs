use std::path::Path;
use std::process::{Command, Output};

use lgop_core::analysis::error_cell;
use lgop_core::{OperatorParams, TestFunction};

fn lgop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lgop")).args(args).output().expect("binary runs")
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn table1_csv_layout_and_cell() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t1.csv");
    let o = lgop(&["table1", "--out", out.to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = read_csv(&out);
    assert_eq!(header.join(","), "x,eta,alpha,beta,R_value,f_value,abs_error,tail_mass,K");
    assert_eq!(rows.len(), 40);
    let cell = rows
        .iter()
        .find(|r| num(&r[0]) == 0.5 && num(&r[1]) == 50.0 && num(&r[2]) == 1.0)
        .expect("x=0.5 eta=50 in the first block");
    assert!((num(&cell[6]) - 0.001533680).abs() <= 1e-5f64.max(0.01 * 0.001533680));

    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("t1.json")).unwrap()).unwrap();
    let jrows = json["rows"].as_array().unwrap();
    assert_eq!(jrows.len(), rows.len());
    for (j, c) in jrows.iter().zip(&rows) {
        assert_eq!(j["abs_error"].as_f64().unwrap().to_bits(), num(&c[6]).to_bits());
        assert_eq!(j["K"].as_u64().unwrap().to_string(), c[8]);
    }
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("alpha=5 beta=10"));
}

#[test]
fn csv_values_round_trip_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = lgop(&[
        "sweep",
        "--alpha",
        "0.5",
        "--beta",
        "2",
        "--eta",
        "33",
        "--x",
        "0.3,1.7",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let (_, rows) = read_csv(&out);
    let p = OperatorParams::new(0.5, 2.0, 33.0).unwrap();
    for (r, x) in rows.iter().zip([0.3, 1.7]) {
        let c = error_cell(&p, &TestFunction::xexp5(), x).unwrap();
        assert_eq!(num(&r[4]).to_bits(), c.r_value.to_bits());
        assert_eq!(num(&r[6]).to_bits(), c.abs_error.to_bits());
        assert_eq!(num(&r[7]).to_bits(), c.tail_mass.to_bits());
        assert_eq!(r[8], c.truncation_index.to_string());
    }
}

#[test]
fn table2_reports_closed_form_values() {
    let o = lgop(&["table2", "--x", "2", "--eta", "25"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let first = r.records().next().unwrap().unwrap();
    // printed 3.36403; the moment closed form gives 2.496832
    assert!((num(&first[6]) - 2.496832).abs() <= 1e-10);
    assert!(String::from_utf8(o.stderr).unwrap().contains("differ from the printed values"));
}

#[test]
fn sweep_of_constant_is_one() {
    let o = lgop(&["sweep", "--function", "monomial:0", "--x", "0,0.5,3,10"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let vals: Vec<f64> = r.records().map(|rec| num(&rec.unwrap()[4])).collect();
    assert_eq!(vals.len(), 16);
    assert!(vals.iter().all(|v| (v - 1.0).abs() <= 1e-12), "{vals:?}");
}

#[test]
fn output_is_deterministic() {
    let a = lgop(&["sweep", "--function", "poly:1,-2,0.5", "--eta", "10,20,40,80", "--x", "0,0.1,0.2,0.4,0.8,1.6"]);
    let b = lgop(&["sweep", "--function", "poly:1,-2,0.5", "--eta", "10,20,40,80", "--x", "0,0.1,0.2,0.4,0.8,1.6"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn json_to_stdout_without_out() {
    let o = lgop(&["sweep", "--x", "1", "--eta", "25", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["command"], "sweep");
    let err = v["rows"][0]["abs_error"].as_f64().unwrap();
    assert!((err - 0.004815770).abs() <= 1e-8);
}

#[test]
fn moments_command_compares_closed_and_numerical() {
    let o = lgop(&["moments", "--alpha", "2", "--beta", "0.5", "--eta", "25", "--x", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut r = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(
        r.headers().unwrap().iter().collect::<Vec<_>>().join(","),
        "x,eta,alpha,beta,moment,closed,numerical,rel_diff"
    );
    let rows: Vec<csv::StringRecord> = r.records().map(|x| x.unwrap()).collect();
    assert_eq!(rows.len(), 9);
    for row in &rows {
        let d = num(&row[7]);
        if &row[4] == "mu4_printed" {
            assert!(d > 1e-6, "printed fourth moment should be off here");
        } else {
            assert!(d <= 1e-8, "{row:?}");
        }
    }
}

#[test]
fn voronovskaja_command_fits_slope() {
    let o = lgop(&[
        "voronovskaja",
        "--function",
        "monomial:2",
        "--alpha",
        "1",
        "--beta",
        "1",
        "--x",
        "1",
        "--eta",
        "100,1000,10000",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("limit 8.0000000000"), "{err}");
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn validation_errors_exit_with_one() {
    for args in [
        &["sweep", "--alpha", "-1"][..],
        &["sweep", "--beta", "0"],
        &["sweep", "--eta", "25,-3"],
        &["sweep", "--x", "-0.5"],
        &["sweep", "--function", "sin"],
        &["sweep", "--eps", "2"],
        &["sweep", "--quad-order", "0"],
        &["sweep", "--bogus"],
        &["voronovskaja", "--function", "sqrt"],
        &["frobnicate"],
    ] {
        let o = lgop(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn truncation_failure_exits_with_two() {
    // the series would need far more than the term cap
    let o = lgop(&["sweep", "--eta", "100", "--x", "100000"]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().nth(1).unwrap().contains("NaN"));
}

#[test]
fn help_exits_cleanly() {
    let o = lgop(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8(o.stdout).unwrap().contains("theorem-check"));
}
