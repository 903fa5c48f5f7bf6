use std::f64::consts::E;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn curveasym(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curveasym"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn column(csv_text: &str, name: &str) -> Vec<f64> {
    let mut rdr = csv::Reader::from_reader(csv_text.as_bytes());
    let idx = rdr
        .headers()
        .unwrap()
        .iter()
        .position(|h| h == name)
        .expect("column present");
    rdr.records().map(|r| r.unwrap()[idx].parse().unwrap()).collect()
}

fn write(dir: &Path, name: &str, text: &str) {
    fs::write(dir.join(name), text).unwrap();
}

#[test]
fn ex1_ratios_are_constant() {
    let dir = TempDir::new().unwrap();
    let out = curveasym(
        &["example", "--name", "ex1", "--alpha", "1", "--out", "ex1.csv"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("ex1.csv")).unwrap();
    assert!(text.starts_with("t,D,DS,DT,ratio_support,ratio_tangent,unbounded,truncation_bound\n"));
    for col in ["ratio_support", "ratio_tangent"] {
        let v = column(&text, col);
        assert_eq!(v.len(), 32);
        assert!(v.iter().all(|r| (r - 0.455938).abs() < 1e-6), "{col}: {v:?}");
    }
}

#[test]
fn lagrange_extremal_tail_approaches_inverse_e() {
    let dir = TempDir::new().unwrap();
    let out = curveasym(
        &[
            "meanvalue",
            "--preset",
            "lagrange-extremal",
            "--xmin",
            "1e-8",
            "--out",
            "mv.csv",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("mv.csv")).unwrap();
    assert!(text.starts_with("x,tau,ratio_h,ratio_t,residual\n"));
    let r = column(&text, "ratio_t");
    let last = *r.last().unwrap();
    assert!((last - 1.0 / E).abs() <= 2.0 / 1e-8f64.ln().abs());
    assert!(r.iter().all(|&v| v >= 1.0 / E - 1e-6));
}

#[test]
fn missing_config_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let out = curveasym(&["analyze", "--config", "missing.cfg"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn unknown_key_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "c.cfg", "kind = graph\nf = t^2\ncolour = red\n");
    let out = curveasym(&["analyze", "--config", "c.cfg"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
}

#[test]
fn bad_expression_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "c.cfg", "kind = graph\nf = t^^2\n");
    assert_eq!(
        curveasym(&["analyze", "--config", "c.cfg"], dir.path()).status.code(),
        Some(2)
    );
}

#[test]
fn identical_configs_give_identical_csv() {
    let dir = TempDir::new().unwrap();
    write(
        dir.path(),
        "c.cfg",
        "kind = graph\nf = t^3\ndf = 3*t^2\na = 0\nb = 4\nsequence.t0 = 1\nsequence.count = 20\n",
    );
    let a = curveasym(&["analyze", "--config", "c.cfg", "--out", "a.csv"], dir.path());
    let b = curveasym(&["analyze", "--config", "c.cfg", "--out", "b.csv"], dir.path());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(b.status.code(), Some(0));
    let (x, y) = (
        fs::read(dir.path().join("a.csv")).unwrap(),
        fs::read(dir.path().join("b.csv")).unwrap(),
    );
    assert_eq!(x, y);
    let want = 1.0 / 3f64.sqrt();
    let r = column(&String::from_utf8(x).unwrap(), "ratio_support");
    assert!((r.last().unwrap() - want).abs() < 1e-6);
}

#[test]
fn json_summary_has_the_verdict_record() {
    let dir = TempDir::new().unwrap();
    let out = curveasym(
        &[
            "example",
            "--name",
            "ex2",
            "--alpha",
            "2",
            "--out",
            "ex2.csv",
            "--json-summary",
            "s.json",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("s.json")).unwrap()).unwrap();
    assert!((v["estimate"].as_f64().unwrap() - 4.0 / 9.0).abs() < 1e-3);
    assert!((v["bound"].as_f64().unwrap() - 1.0 / E).abs() < 1e-15);
    assert_eq!(v["verdict"], "holds");
    assert_eq!(v["window"], 8);
}

#[test]
fn rows_exclude_failed_samples_which_are_listed() {
    let dir = TempDir::new().unwrap();
    // undefined for t > 0.5, so the first two chords (t = 0.9, 0.63) fail
    write(
        dir.path(),
        "c.cfg",
        "kind = graph\nf = t*sqrt(0.5 - t)\na = 0\nb = 1\nsequence.t0 = 0.9\nsequence.count = 12\n",
    );
    let out = curveasym(
        &[
            "analyze",
            "--config",
            "c.cfg",
            "--out",
            "t.csv",
            "--json-summary",
            "s.json",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("t.csv")).unwrap();
    assert_eq!(text.lines().count() - 1, 10);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("s.json")).unwrap()).unwrap();
    assert_eq!(v["failures"].as_array().unwrap().len(), 2);
    assert_eq!(v["rows"], 10);
}

#[test]
fn all_samples_failing_is_a_numerical_error() {
    let dir = TempDir::new().unwrap();
    write(
        dir.path(),
        "c.cfg",
        "kind = graph\nf = ln(t - 5)\nstart = 0, 0\na = 0\nb = 4\nsequence.t0 = 1\n",
    );
    assert_eq!(
        curveasym(&["analyze", "--config", "c.cfg"], dir.path()).status.code(),
        Some(3)
    );
}

#[test]
fn a_missed_margin_reports_a_violation() {
    let dir = TempDir::new().unwrap();
    // a negative epsilon demands a margin above 1/e; the parabola's 1/2 misses 1/e + 0.2
    write(
        dir.path(),
        "c.cfg",
        "kind = graph\nf = t^2\ndf = 2*t\na = 0\nb = 4\nepsilon = -0.2\n",
    );
    let out = curveasym(&["analyze", "--config", "c.cfg", "--json-summary"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("\"verdict\": \"violated\""));
}

#[test]
fn remark41_and_powerweight_examples() {
    let dir = TempDir::new().unwrap();
    let out = curveasym(
        &["example", "--name", "remark41", "--alpha", "3", "--out", "r.csv"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let r = column(&fs::read_to_string(dir.path().join("r.csv")).unwrap(), "ratio_h");
    assert!(r.iter().all(|v| (v - 0.25f64.powf(1.0 / 3.0)).abs() < 1e-9));
    let out = curveasym(
        &["example", "--name", "powerweight", "--beta", "2", "--out", "p.csv"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let r = column(&fs::read_to_string(dir.path().join("p.csv")).unwrap(), "ratio_t");
    assert!(r.iter().all(|v| (v - 0.75).abs() < 1e-9));
}

#[test]
fn meanvalue_config_run() {
    let dir = TempDir::new().unwrap();
    write(
        dir.path(),
        "m.cfg",
        "problem = lagrange\ng = sin(t) + t^2\ndg = cos(t) + 2*t\nx0 = 1\nxmin = 1e-4\ncount = 12\n",
    );
    let out = curveasym(&["meanvalue", "--config", "m.cfg", "--out", "m.csv"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = column(&fs::read_to_string(dir.path().join("m.csv")).unwrap(), "ratio_t");
    assert_eq!(r.len(), 12);
    // g″(0) ≠ 0, so ξ/x → 1/2
    assert!((r.last().unwrap() - 0.5).abs() < 1e-3);
}

#[test]
fn arclength_on_a_catalog_family() {
    let dir = TempDir::new().unwrap();
    let out = curveasym(&["arclength", "--name", "parabola", "--out", "a.csv"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("a.csv")).unwrap();
    assert!(text.starts_with("t,L,LS,LT,ratio_Ls,ratio_Lt\n"));
    let r = column(&text, "ratio_Ls");
    assert!((r.last().unwrap() - 0.5).abs() < 1e-6);
    assert_eq!(
        curveasym(&["arclength", "--name", "no-such-curve"], dir.path())
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn verify_single_criterion() {
    let dir = TempDir::new().unwrap();
    let out = curveasym(&["verify", "--criterion", "1"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("[PASS] 1"));
    assert_eq!(
        curveasym(&["verify", "--criterion", "12"], dir.path()).status.code(),
        Some(2)
    );
}
