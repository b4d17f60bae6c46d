use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conharm"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_config(dir: &Path, toml: &str, cmd: &str, extra: &[&str]) -> Output {
    fs::write(dir.join("exp.toml"), toml).unwrap();
    let mut args = vec![cmd, "--config", "exp.toml", "--out-dir", "out"];
    args.extend_from_slice(extra);
    run(dir, &args)
}

fn report(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("out").join(name)).unwrap()).unwrap()
}

fn degrees(v: &Value) -> Vec<f64> {
    v["result"]["functions"]["function_spectrum"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| d["degree"].as_f64().unwrap())
        .collect()
}

#[test]
fn c2_spectrum_in_window_0_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(
        dir.path(),
        "[cone]\nmodel = \"kahler\"\nn = 2\n[spectrum]\nwindow = [0.0, 3.0]\n",
        "spectrum",
        &[],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = report(dir.path(), "spectrum.json");
    assert_eq!(degrees(&v), vec![0.0, 1.0, 2.0]);
    assert_eq!(v["result"]["spectral_match"]["sets_equal"], true);
    let csv = fs::read_to_string(dir.path().join("out/spectrum.csv")).unwrap();
    assert!(csv.lines().any(|l| l == "rate,type,multiplicity,eigenvalue,filter_status"));
}

#[test]
fn antipodal_quotient_keeps_only_degree_zero_below_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(
        dir.path(),
        "[cone]\nmodel = \"quotient\"\nm = 4\ngroup = \"antipodal\"\n[spectrum]\nwindow = [0.0, 2.0]\n",
        "spectrum",
        &[],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = report(dir.path(), "spectrum.json");
    assert_eq!(degrees(&v), vec![0.0]);
    // no coclosed data on quotients: the 1-form part is skipped with a note
    assert!(!v["result"]["notes"].as_array().unwrap().is_empty());
}

#[test]
fn empty_window_gives_empty_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(dir.path(), "[spectrum]\nwindow = [1.5, 1.5]\n", "spectrum", &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = report(dir.path(), "spectrum.json");
    assert!(degrees(&v).is_empty());
    assert!(v["result"]["oneforms"]["oneform_spectrum"].as_array().unwrap().is_empty());
}

#[test]
fn reruns_are_byte_identical() {
    let cfg = "seed = 11\n[frequency]\ncorpus_index = 17\nd_bar = 0.5\n";
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        for cmd in ["frequency", "spectrum", "classify"] {
            let out = run_config(d.path(), cfg, cmd, &["--plot-data"]);
            assert!(out.status.success(), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
        }
    }
    let mut names: Vec<_> = fs::read_dir(a.path().join("out"))
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert!(names.len() >= 9);
    for n in names {
        let x = fs::read(a.path().join("out").join(&n)).unwrap();
        let y = fs::read(b.path().join("out").join(&n)).unwrap();
        assert_eq!(x, y, "{n:?} differs between runs");
    }
    let f = report(a.path(), "frequency.json");
    assert_eq!(f["seed"], 11);
    assert_eq!(f["config_hash"].as_str().unwrap().len(), 64);
    let plot = fs::read_to_string(a.path().join("out/frequency_plot.csv")).unwrap();
    assert!(plot.contains("log_r,log_H,log_F,N") && plot.contains("# seed 11"));
}

#[test]
fn seed_flag_changes_hash_and_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "[frequency]\ncorpus_index = 3\n";
    run_config(dir.path(), cfg, "frequency", &["--seed", "1"]);
    let a = report(dir.path(), "frequency.json");
    run_config(dir.path(), cfg, "frequency", &["--seed", "2"]);
    let b = report(dir.path(), "frequency.json");
    assert_eq!(a["seed"], 1);
    assert_ne!(a["config_hash"], b["config_hash"]);
}

#[test]
fn explicit_terms_give_a_passing_profile() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"
[cone]
model = "sphere"
m = 4
[frequency]
kind = "one_form"
terms = [
  { type = "IV", rate = 1.0, coefficient = 0.8, index = 2 },
  { type = "II", rate = 0.0, coefficient = -0.5, index = 1 },
  { type = "III", rate = 2.0, coefficient = 0.3 },
]
"#;
    let out = run_config(dir.path(), cfg, "frequency", &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = report(dir.path(), "frequency.json");
    assert_eq!(v["result"]["monotonicity"]["pass"], true);
    assert_eq!(v["result"]["monotonicity"]["constant"], false);
    assert_eq!(v["result"]["doubling"]["pass"], true);
    let n: Vec<f64> = v["result"]["profile"]["N"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!(n.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad_key = run_config(dir.path(), "nonsense = 1\n", "spectrum", &[]);
    assert_eq!(bad_key.status.code(), Some(2));
    let bad_index = run_config(
        dir.path(),
        "[cone]\nm = 4\n[frequency]\nterms = [{ type = \"IV\", rate = 1.0, index = 6 }]\n",
        "frequency",
        &[],
    );
    assert_eq!(bad_index.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad_index.stderr).contains("out of range"));
    let missing = run(dir.path(), &["spectrum", "--config", "nope.toml"]);
    assert_eq!(missing.status.code(), Some(2));
}

fn write_s3_table(dir: &Path, cutoff: f64, corrupt: bool) {
    let mut table = serde_json::json!({
        "cross_section_id": "S3",
        "dim_link": 3,
        "cutoff": cutoff,
        "items": [
            { "kind": "Function", "eigenvalue": 0.0, "multiplicity": 1, "label": "k=0" },
            { "kind": "Function", "eigenvalue": 3.0, "multiplicity": 4, "label": "k=1" },
        ]
    });
    if corrupt {
        table["items"][1]["multiplicity"] = serde_json::json!(0);
    }
    fs::write(dir.join("eig.json"), table.to_string()).unwrap();
}

#[test]
fn corrupted_eigendata_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    write_s3_table(dir.path(), 8.0, true);
    let cfg = "[cone]\nm = 4\neigen_table = \"eig.json\"\n";
    for cmd in ["spectrum", "verify"] {
        let out = run_config(dir.path(), cfg, cmd, &[]);
        assert_eq!(out.status.code(), Some(2), "{cmd}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("multiplicity must be positive"));
    }
}

#[test]
fn incomplete_eigendata_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    write_s3_table(dir.path(), 8.0, false);
    let narrow = "[cone]\nm = 4\neigen_table = \"eig.json\"\n[spectrum]\nwindow = [0.0, 1.0]\noneform = false\n";
    let ok = run_config(dir.path(), narrow, "spectrum", &[]);
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stderr));
    assert_eq!(degrees(&report(dir.path(), "spectrum.json")), vec![0.0]);
    let wide = "[cone]\nm = 4\neigen_table = \"eig.json\"\n[spectrum]\nwindow = [0.0, 3.0]\n";
    let out = run_config(dir.path(), wide, "spectrum", &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("incomplete"));
}

#[test]
fn mesh_cone_spectrum_uses_mesh_eigendata() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(
        dir.path(),
        "tolerance_profile = \"mesh\"\n[cone]\nmodel = \"icosphere\"\nlevel = 2\nn_eigs = 16\n[spectrum]\nwindow = [0.0, 1.5]\noneform = false\n",
        "spectrum",
        &[],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let d = degrees(&report(dir.path(), "spectrum.json"));
    assert_eq!(d.len(), 2);
    assert!(d[0].abs() < 1e-6 && (d[1] - 1.0).abs() < 0.05);
}

#[test]
fn oracle_and_verify_pass_with_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["oracle", "--out-dir", "out"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(report(dir.path(), "oracle.json")["result"]["pass"], true);
    let out = run(dir.path(), &["verify", "--out-dir", "out"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.lines().filter(|l| l.contains("PASS")).count(), 9);
}

#[test]
fn zero_tolerance_diagnostic_is_reported_without_failing_the_suite() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(dir.path(), "[verify]\ntolerance = 0.0\n", "verify", &[]);
    assert!(out.status.success());
    let v = report(dir.path(), "verify.json");
    let diag = &v["result"]["diagnostic"];
    assert_eq!(diag["tolerance"], 0.0);
    // homogeneous fields have constant N up to rounding: at zero tolerance
    // those steps land on or just past the boundary
    let flagged = diag["boundary_flags"].as_u64().unwrap() + diag["violations"].as_u64().unwrap();
    assert!(flagged > 0);
}

#[test]
fn grid_dumps_have_sidecars() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(
        dir.path(),
        "[oracle]\ncircle_modes = 0\nicosphere_levels = []\node = false\ndump_grids = true\n",
        "oracle",
        &[],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for m in [3, 4] {
        let bin = fs::read(dir.path().join(format!("out/grid_r{m}.bin"))).unwrap();
        let side: Value = serde_json::from_str(&fs::read_to_string(dir.path().join(format!("out/grid_r{m}.json"))).unwrap()).unwrap();
        let nodes: u64 = side["shape"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).product();
        assert_eq!(bin.len() as u64, 8 * nodes * side["components"].as_u64().unwrap());
    }
}
