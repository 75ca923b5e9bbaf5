//! End-to-end tests of the binary: the CLI must be a thin mapper whose
//! outputs match the library calls exactly (full-precision CSV/JSON).

use std::fs;
use std::path::Path;
use std::process::Command;

use nulfrac_core::nabla::frac_sum;
use nulfrac_core::{GridFunction, LatticeSpec, OperatorConfig};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nulfrac"))
}

fn write_grid(path: &Path, base: f64, values: &[f64]) {
    let mut s = String::from("s,f\n");
    for (i, v) in values.iter().enumerate() {
        s.push_str(&format!("{:.16e},{:.16e}\n", base + i as f64, v));
    }
    fs::write(path, s).unwrap();
}

fn read_grid(path: &Path) -> (f64, Vec<f64>) {
    let text = fs::read_to_string(path).unwrap();
    let mut base = None;
    let mut vals = Vec::new();
    for line in text.lines().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let mut it = line.split(',');
        let s: f64 = it.next().unwrap().parse().unwrap();
        let f: f64 = it.next().unwrap().parse().unwrap();
        if base.is_none() {
            base = Some(s);
        }
        vals.push(f);
    }
    (base.unwrap(), vals)
}

const QUAD: &str = r#"{"family":"quadratic","c1":1.0,"c2":0.0,"c3":0.0}"#;

#[test]
fn sum_matches_library_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("f.csv");
    let output = dir.path().join("out.csv");
    let values = [0.3, -0.8, 0.41, 0.99, -0.27, 0.63];
    write_grid(&input, 0.25, &values);

    let status = bin()
        .args(["sum", "--lattice", QUAD, "--gamma", "0.4", "--alpha", "0.7"])
        .arg("--input")
        .arg(&input)
        .arg("--output")
        .arg(&output)
        .status()
        .unwrap();
    assert!(status.success());

    let lat = LatticeSpec::quadratic(1.0, 0.0, 0.0).unwrap();
    let cfg = OperatorConfig::new(lat, 0.4, 0.7).unwrap();
    let f = GridFunction::new(0.25, values.to_vec()).unwrap();
    let want = frac_sum(&cfg, &f).unwrap();

    let (base, got) = read_grid(&output);
    assert_eq!(base, 0.25);
    assert_eq!(got, want.values(), "CLI output differs from the library call");
}

#[test]
fn sum_of_ones_telescopes() {
    // on any lattice the order-1 sum of f = 1 is x_g(z) - x_g(a)
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("ones.csv");
    let output = dir.path().join("out.csv");
    write_grid(&input, 0.0, &[1.0; 7]);
    let status = bin()
        .args(["sum", "--lattice", QUAD, "--gamma", "0.8", "--alpha", "1.0"])
        .arg("--input")
        .arg(&input)
        .arg("--output")
        .arg(&output)
        .status()
        .unwrap();
    assert!(status.success());
    let lat = LatticeSpec::quadratic(1.0, 0.0, 0.0).unwrap();
    let (_, got) = read_grid(&output);
    for (j, v) in got.iter().enumerate() {
        let want = lat.x_shifted(0.8, j as f64) - lat.x_shifted(0.8, 0.0);
        assert!((v - want).abs() < 1e-12);
    }
}

#[test]
fn direct_mode_rejects_integer_order() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("f.csv");
    write_grid(&input, 0.0, &[1.0, 2.0, 3.0, 4.0]);
    let out = bin()
        .args(["diff", "--mode", "direct", "--lattice", QUAD, "--alpha", "2.0"])
        .arg("--input")
        .arg(&input)
        .arg("--output")
        .arg(dir.path().join("out.csv"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("integer order"), "stderr: {}", err);
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.csv");
    fs::write(&input, "s,f\n0,1\n0.5,2\n").unwrap();
    let out = bin()
        .args(["sum", "--lattice", QUAD, "--alpha", "1.0"])
        .arg("--input")
        .arg(&input)
        .arg("--output")
        .arg(dir.path().join("out.csv"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_writes_report_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let out = bin()
        .args(["verify", "--seed", "0", "--trials", "1"])
        .arg("--output")
        .arg(&report)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.matches("[pass]").count(), 29, "expected 29 passing lines:\n{}", stdout);

    // byte-identical re-serialization of the parsed report
    let text = fs::read_to_string(&report).unwrap();
    let parsed: Vec<nulfrac_verify::CheckReport> = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed.len(), 29);
    assert!(parsed.iter().all(|r| r.passed));
    let dir2 = tempfile::tempdir().unwrap();
    let report2 = dir2.path().join("again.json");
    // reuse the writer through a second binary run with the same seed
    let out2 = bin()
        .args(["verify", "--seed", "0", "--trials", "1"])
        .arg("--output")
        .arg(&report2)
        .output()
        .unwrap();
    assert_eq!(out2.status.code(), Some(0));
    assert_eq!(text, fs::read_to_string(&report2).unwrap(), "reports differ across runs");
}

#[test]
fn exp_series_csv() {
    let dir = tempfile::tempdir().unwrap();
    let output = dir.path().join("e.csv");
    let status = bin()
        .args([
            "exp",
            "--lattice",
            r#"{"family":"q_quadratic","q":0.6,"c1":0.8,"c2":1.7,"c3":0.4}"#,
            "--alpha",
            "0.5",
            "--lambda",
            "0.5",
            "--anchor",
            "-1.0",
            "--count",
            "5",
        ])
        .arg("--output")
        .arg(&output)
        .status()
        .unwrap();
    assert!(status.success());
    let text = fs::read_to_string(&output).unwrap();
    assert!(text.starts_with("z,value,err_estimate\n"));
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn fde_json_output() {
    let dir = tempfile::tempdir().unwrap();
    let output = dir.path().join("fde.json");
    let status = bin()
        .args([
            "solve-fde",
            "--lattice",
            r#"{"family":"q_quadratic","q":0.6,"c1":0.8,"c2":1.7,"c3":0.4}"#,
            "--alpha",
            "0.5",
            "--coeffs",
            "0.25,0,1",
            "--anchor",
            "0.0",
            "--count",
            "4",
        ])
        .arg("--output")
        .arg(&output)
        .status()
        .unwrap();
    assert!(status.success());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&output).unwrap()).unwrap();
    let roots = v["roots"].as_array().unwrap();
    assert_eq!(roots.len(), 2);
    let mut ims: Vec<f64> = roots.iter().map(|r| r["im"].as_f64().unwrap()).collect();
    ims.sort_by(f64::total_cmp);
    assert_eq!(ims, vec![-0.5, 0.5]);
    assert!(v["residual"].as_f64().unwrap() < 1e-8);
}

#[test]
fn tail_tol_env_override() {
    let dir = tempfile::tempdir().unwrap();
    let out_tight = dir.path().join("tight.csv");
    let out_loose = dir.path().join("loose.csv");
    let args = |out: &Path| {
        vec![
            "exp".to_string(),
            "--lattice".into(),
            r#"{"family":"q_quadratic","q":0.6,"c1":0.8,"c2":1.7,"c3":0.4}"#.into(),
            "--alpha".into(),
            "0.5".into(),
            "--lambda".into(),
            "0.5".into(),
            "--anchor".into(),
            "0.0".into(),
            "--count".into(),
            "4".into(),
            "--output".into(),
            out.display().to_string(),
        ]
    };
    assert!(bin().args(args(&out_tight)).env("NULFRAC_TAIL_TOL", "1e-14").status().unwrap().success());
    assert!(bin().args(args(&out_loose)).env("NULFRAC_TAIL_TOL", "1e-3").status().unwrap().success());
    let err_of = |p: &Path| -> f64 {
        fs::read_to_string(p)
            .unwrap()
            .lines()
            .last()
            .unwrap()
            .split(',')
            .nth(2)
            .unwrap()
            .parse()
            .unwrap()
    };
    assert!(err_of(&out_loose) > err_of(&out_tight), "env tolerance had no effect");
}

#[test]
fn config_file_defaults_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("f.csv");
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    write_grid(&input, 0.0, &[0.5, 1.5, -0.5, 2.0, 0.25]);
    let config = dir.path().join("cfg.json");
    fs::write(
        &config,
        format!(
            r#"{{"lattice":{{"family":"quadratic","c1":1.0,"c2":0.0,"c3":0.0}},"gamma":0.4,"alpha":0.7,"input":"{}","output":"{}"}}"#,
            input.display(),
            out_a.display()
        ),
    )
    .unwrap();
    // config alone
    let status = bin().arg("sum").arg("--config").arg(&config).status().unwrap();
    assert!(status.success());
    // flag overrides alpha
    let status = bin()
        .arg("sum")
        .arg("--config")
        .arg(&config)
        .args(["--alpha", "1.0"])
        .arg("--output")
        .arg(&out_b)
        .status()
        .unwrap();
    assert!(status.success());
    let (_, a) = read_grid(&out_a);
    let (_, b) = read_grid(&out_b);
    assert_ne!(a, b, "flag override had no effect");
}
