use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn operator(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../testdata/operators")
        .join(format!("{name}.json"))
}

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eigenroots"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn op_arg(name: &str) -> String {
    operator(name).to_string_lossy().into_owned()
}

fn write_operator(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(format!("{name}.json"));
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn classify_prints_constants_and_json() {
    let tmp = TempDir::new().unwrap();
    let o = run(&["classify", "--operator", &op_arg("t2")], tmp.path());
    assert!(o.status.success());
    assert!(
        stdout(&o).contains("degenerate, j0=2, d=5/7, b=5/7, A={7}"),
        "{}",
        stdout(&o)
    );
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("t2-classify.json")).unwrap())
            .unwrap();
    assert_eq!(report["d"], "5/7");
    assert_eq!(report["attainment"], serde_json::json!([7]));
    assert_eq!(report["b_equals_d"], true);
}

#[test]
fn classify_non_degenerate_and_invalid() {
    let tmp = TempDir::new().unwrap();
    let zd = write_operator(
        tmp.path(),
        "zd",
        r#"{"terms":[{"order":1,"coeffs":[["0","0"],["1","0"]]}]}"#,
    );
    let o = run(&["classify", "--operator", &zd], tmp.path());
    assert!(o.status.success());
    assert!(stdout(&o).contains("exactly-solvable, non-degenerate"));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("zd-classify.json")).unwrap())
            .unwrap();
    assert!(report["d"].is_null());

    let bad = write_operator(
        tmp.path(),
        "bad",
        r#"{"terms":[{"order":3,"coeffs":[["0","0"],["0","0"],["0","0"],["0","0"],["1","0"]]}]}"#,
    );
    let o = run(&["classify", "--operator", &bad], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("not exactly-solvable"));
}

#[test]
fn eigen_dumps_exact_coefficients() {
    let tmp = TempDir::new().unwrap();
    let o = run(
        &["eigen", "--operator", &op_arg("laguerre"), "--n", "2"],
        tmp.path(),
    );
    assert!(o.status.success());
    let dump: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("laguerre-eigen.json")).unwrap())
            .unwrap();
    assert_eq!(dump[0]["coeffs"], serde_json::json!(["2", "-4", "1"]));
    assert_eq!(dump[0]["lambda"], "-2");
}

#[test]
fn eigen_reports_non_unique_degree_and_continues() {
    let tmp = TempDir::new().unwrap();
    let o = run(
        &[
            "eigen",
            "--operator",
            &op_arg("singular"),
            "--n-grid",
            "5,6",
        ],
        tmp.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("1 warning(s)"), "{}", stderr(&o));
    let dump: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("singular-eigen.json")).unwrap())
            .unwrap();
    assert!(dump[0]["error"].as_str().unwrap().contains("not unique"));
    assert!(dump[1]["coeffs"].is_array());
}

#[test]
fn repeat_run_is_served_from_cache_byte_identically() {
    let tmp = TempDir::new().unwrap();
    let args = ["eigen", "--operator", &op_arg("t3"), "--n-grid", "10,20"];
    assert!(run(&args, tmp.path()).status.success());
    let first = fs::read(tmp.path().join("t3-eigen.json")).unwrap();
    let cached: Vec<_> = fs::read_dir(tmp.path().join("cache")).unwrap().collect();
    assert_eq!(cached.len(), 2);
    assert!(run(&args, tmp.path()).status.success());
    assert_eq!(fs::read(tmp.path().join("t3-eigen.json")).unwrap(), first);
}

#[test]
fn edited_operator_never_sees_stale_cache() {
    let tmp = TempDir::new().unwrap();
    let cache = tmp.path().join("cache").to_string_lossy().into_owned();
    let a = write_operator(
        tmp.path(),
        "op",
        r#"{"terms":[{"order":1,"coeffs":[["0","0"],["1","0"]]},{"order":2,"coeffs":[["1","0"]]}]}"#,
    );
    assert!(run(
        &["eigen", "--operator", &a, "--n", "3", "--cache", &cache],
        tmp.path()
    )
    .status
    .success());
    let before = fs::read_to_string(tmp.path().join("op-eigen.json")).unwrap();
    let a = write_operator(
        tmp.path(),
        "op",
        r#"{"terms":[{"order":1,"coeffs":[["0","0"],["1","0"]]},{"order":2,"coeffs":[["3","0"]]}]}"#,
    );
    assert!(run(
        &["eigen", "--operator", &a, "--n", "3", "--cache", &cache],
        tmp.path()
    )
    .status
    .success());
    let after = fs::read_to_string(tmp.path().join("op-eigen.json")).unwrap();
    assert_ne!(before, after);
    // zD + 3D²: p₃ = z³ + 9z
    assert!(after.contains("\"9\""), "{after}");
}

fn growth_rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::ReaderBuilder::new()
        .flexible(true)
        .from_path(path)
        .unwrap();
    r.records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect()
}

#[test]
fn growth_reproduces_table_exponents() {
    let tmp = TempDir::new().unwrap();
    let o = run(
        &[
            "growth",
            "--operator",
            &op_arg("t2"),
            "--n-grid",
            "50,100",
            "--prefactor",
            "1.3",
        ],
        tmp.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = growth_rows(&tmp.path().join("t2-growth.csv"));
    assert_eq!(rows.len(), 3);
    for (row, want) in rows.iter().zip([0.671977, 0.694847]) {
        let got: f64 = row[2].parse().unwrap();
        assert!((got - want).abs() < 1e-3, "{got}");
    }
    assert_eq!(rows[2][0], "fit");
    assert!(rows[2][2].parse::<f64>().is_ok());
}

#[test]
fn outputs_are_deterministic() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let args = ["scaled", "--operator", &op_arg("t4"), "--n-grid", "20,30"];
    assert!(run(&args, a.path()).status.success());
    assert!(run(&args, b.path()).status.success());
    assert_eq!(
        fs::read(a.path().join("t4-scaled.csv")).unwrap(),
        fs::read(b.path().join("t4-scaled.csv")).unwrap()
    );
}

#[test]
fn scaled_t1_cloud_is_bounded() {
    let tmp = TempDir::new().unwrap();
    let o = run(
        &[
            "scaled",
            "--operator",
            &op_arg("t1"),
            "--n",
            "100",
            "--d",
            "1",
        ],
        tmp.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let mut r = csv::Reader::from_path(tmp.path().join("t1-scaled.csv")).unwrap();
    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        ["n", "index", "re", "im", "abs", "err_radius", "scaled"]
    );
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 100);
    for row in &rows {
        assert!(row[4].parse::<f64>().unwrap() <= 3.0);
        assert_eq!(&row[6], "1");
    }
}

#[test]
fn roots_csv_has_one_row_per_root() {
    let tmp = TempDir::new().unwrap();
    let o = run(
        &["roots", "--operator", &op_arg("hermite"), "--n-grid", "3,4"],
        tmp.path(),
    );
    assert!(o.status.success());
    let mut r = csv::Reader::from_path(tmp.path().join("hermite-roots.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 7);
    let max = rows[..3]
        .iter()
        .map(|row| row[4].parse::<f64>().unwrap())
        .fold(0.0, f64::max);
    assert!((max - 1.5f64.sqrt()).abs() < 1e-15);
}

#[test]
fn cauchy_prints_equation_and_writes_residuals() {
    let tmp = TempDir::new().unwrap();
    let o = run(
        &[
            "cauchy",
            "--operator",
            &op_arg("t4"),
            "--n-grid",
            "25,50",
            "--samples",
            "16",
        ],
        tmp.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("z^3C^3+z^2C^5=1\n"));
    let mut r = csv::Reader::from_path(tmp.path().join("t4-residuals.csv")).unwrap();
    assert_eq!(r.records().count(), 32);
}

#[test]
fn checks_pass_on_t3_and_fail_when_a_precondition_breaks() {
    let tmp = TempDir::new().unwrap();
    let o = run(
        &["checks", "--operator", &op_arg("t3"), "--n-grid", "10,25"],
        tmp.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(tmp.path().join("t3-checks.csv").exists());

    // the radius bound needs n > k = 7
    let o = run(
        &["checks", "--operator", &op_arg("t2"), "--n-grid", "7,20"],
        tmp.path(),
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL radius_bound"), "{}", stdout(&o));
}

#[test]
fn laguerre_consecutive_clouds_interlace() {
    let tmp = TempDir::new().unwrap();
    let o = run(
        &[
            "interlace",
            "--operator",
            &op_arg("laguerre"),
            "--n-grid",
            "19,20",
        ],
        tmp.path(),
    );
    assert!(o.status.success());
    assert!(stdout(&o).contains("interlace: true"));
}

#[test]
fn interlace_rejects_complex_clouds() {
    let tmp = TempDir::new().unwrap();
    let o = run(
        &[
            "interlace",
            "--operator",
            &op_arg("t4"),
            "--n-grid",
            "19,20",
        ],
        tmp.path(),
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("not real"));
}

#[test]
fn invalid_configuration_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let t2 = op_arg("t2");
    for args in [
        vec!["growth", "--operator", &t2, "--n-grid", "50,40"],
        vec![
            "growth",
            "--operator",
            &t2,
            "--n",
            "5",
            "--precision-bits",
            "32",
        ],
        vec![
            "cauchy",
            "--operator",
            &t2,
            "--n",
            "20",
            "--radius-factor",
            "1.0",
        ],
        vec!["growth", "--operator", &t2],
    ] {
        let o = run(&args, tmp.path());
        assert_eq!(o.status.code(), Some(1), "{args:?}");
    }
}
