use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lscheme"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("spawn lscheme")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn read_json(p: impl AsRef<Path>) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn build_heisenberg(dir: &Path) -> PathBuf {
    let o = run(dir, &["build", "--group", "heisenberg", "--profile", "desk", "--n-max", "4", "-o", "h.json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    dir.join("h.json")
}

#[test]
fn build_heisenberg_writes_four_sets() {
    let tmp = tempfile::tempdir().unwrap();
    let s = read_json(build_heisenberg(tmp.path()));
    assert_eq!(s["group"]["kind"], "heisenberg");
    let sets = s["sets"].as_array().unwrap();
    assert_eq!(sets.len(), 4);
    // |E_n| = A_n B_n C_n = n^4 4^n for the desk boxes
    let sizes: Vec<usize> = sets.iter().map(|e| e.as_array().unwrap().len()).collect();
    assert_eq!(sizes, vec![4, 256, 5184, 65536]);
}

#[test]
fn build_bs_and_tower_report() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["build", "--group", "bs", "--d", "2", "--profile", "desk", "--n-max", "3", "-o", "bs.json", "--report", "r.json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let s = read_json(tmp.path().join("bs.json"));
    assert_eq!(s["sets"].as_array().unwrap().len(), 3);
    let r = read_json(tmp.path().join("r.json"));
    assert!(r["report"]["rows"].as_array().unwrap().iter().all(|row| row["pass"] != false));
}

#[test]
fn build_abelian_is_refused() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["build", "--group", "zd"]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("no s_o-displacement construction exists"), "{err}");
    let o = run(tmp.path(), &["build", "--group", "dihedral"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn verify_default_heisenberg_passes_with_series_csv() {
    let tmp = tempfile::tempdir().unwrap();
    build_heisenberg(tmp.path());
    let o = run(tmp.path(), &["verify", "h.json", "-o", "v.json", "--emit-csv", "series.csv", "--rows-csv", "rows.csv"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_json(tmp.path().join("v.json"));
    assert!(v["rows"].as_array().unwrap().iter().all(|r| r["pass"] != false));
    let csv = std::fs::read_to_string(tmp.path().join("series.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&header[..3], ["k", "phi_partial", "exp_sum"]);
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first.len(), header.len());
    assert!(lines.count() > 10);
    assert!(std::fs::read_to_string(tmp.path().join("rows.csv")).unwrap().starts_with("condition,"));
}

#[test]
fn verify_corrupted_window_exits_1_with_witness() {
    let tmp = tempfile::tempdir().unwrap();
    let mut s = read_json(build_heisenberg(tmp.path()));
    // [1,3,0] ∈ E_1 and [1,3,0]·x = [2,3,3]
    s["sets"][0].as_array_mut().unwrap().push(serde_json::json!([2, 3, 3]));
    std::fs::write(tmp.path().join("bad.json"), s.to_string()).unwrap();
    let mut witnesses = Vec::new();
    for _ in 0..2 {
        let o = run(tmp.path(), &["verify", "bad.json", "-o", "v.json"]);
        assert_eq!(code(&o), 1);
        let v = read_json(tmp.path().join("v.json"));
        let row = v["rows"].as_array().unwrap().iter().find(|r| r["pass"] == false).unwrap().clone();
        assert!(row["condition"].as_str().unwrap().starts_with("cond1"));
        assert!(row["witness"].as_str().unwrap().contains("[2,3,3]"));
        witnesses.push(row);
    }
    assert_eq!(witnesses[0], witnesses[1]);
}

#[test]
fn unknown_config_key_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("c.json"), r#"{"group":{"kind":"heisenberg"},"colour":"blue"}"#).unwrap();
    let o = run(tmp.path(), &["pipeline", "--config", "c.json"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("colour"));
    let o = run(tmp.path(), &["verify", "missing.json"]);
    assert_eq!(code(&o), 2);
    let o = run(tmp.path(), &["build", "--no-such-flag"]);
    assert_eq!(code(&o), 2);
}

fn pipeline_bytes(dir: &Path, jobs: &str, extra: &[&str], out: &str) -> Vec<u8> {
    let mut args = vec!["--jobs", jobs, "pipeline", "-o", out];
    args.extend_from_slice(extra);
    let o = run(dir, &args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    std::fs::read(dir.join(out)).unwrap()
}

#[test]
fn heisenberg_pipeline_passes_and_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["--group", "heisenberg", "--n-max", "3", "--lift", "--csv-dir", "csv"];
    let a = pipeline_bytes(tmp.path(), "1", &args, "a.json");
    let b = pipeline_bytes(tmp.path(), "4", &args, "b.json");
    assert_eq!(a, b);
    let r: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(r["pass"], true);
    let names: Vec<&str> = r["stages"].as_array().unwrap().iter().map(|s| s["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["build", "verify", "rearrange", "cocycle", "bernoulli", "lift"]);
    for stem in ["verify_series", "conservativity", "kakutani"] {
        assert!(tmp.path().join("csv").join(format!("{stem}.csv")).exists(), "{stem}");
    }
}

#[test]
fn nil2_and_wreath_pipelines_pass() {
    let tmp = tempfile::tempdir().unwrap();
    for (args, out) in [(&["--group", "nil2", "--preset", "h3-mu2", "--n-max", "2"][..], "n.json"), (&["--group", "wreath"][..], "w.json")] {
        let a = pipeline_bytes(tmp.path(), "2", args, out);
        let b = pipeline_bytes(tmp.path(), "1", args, "again.json");
        assert_eq!(a, b);
        let r: Value = serde_json::from_slice(&a).unwrap();
        assert_eq!(r["pass"], true, "{out}");
    }
}

#[test]
fn dihedral_pipeline_reports_bounds() {
    let tmp = tempfile::tempdir().unwrap();
    let a = pipeline_bytes(tmp.path(), "1", &["--group", "dihedral"], "d.json");
    let r: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(r["pass"], true);
    let rows = r["stages"][0]["report"]["rows"].as_array().unwrap();
    let has = |needle: &str| rows.iter().any(|row| row["condition"].as_str().unwrap().contains(needle));
    assert!(has("4H(M)"));
    assert!(has("left"));
    assert!(has("virtcyc"));
}

#[test]
fn snf_matrix_and_presets() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["snf", "--matrix", "[[2,4,4],[-6,6,12],[10,-4,-16]]", "-o", "s.json"]);
    assert_eq!(code(&o), 0);
    let s = read_json(tmp.path().join("s.json"));
    assert_eq!(s["snf"]["diag"], serde_json::json!([2, 6, 12]));
    assert_eq!(s["snf"]["umv_equals_d"], true);
    for (preset, mu) in [("h3", 1), ("h3-mu2", 2), ("h5", 1)] {
        let o = run(tmp.path(), &["snf", "--preset", preset, "-o", "p.json"]);
        assert_eq!(code(&o), 0, "{preset}");
        assert_eq!(read_json(tmp.path().join("p.json"))["direction"]["mu"], mu);
    }
    assert_eq!(code(&run(tmp.path(), &["snf"])), 2);
}

#[test]
fn lift_heisenberg_through_z2() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["build", "--group", "heisenberg", "--n-max", "3", "-o", "h.json"]);
    assert_eq!(code(&o), 0);
    let o = run(tmp.path(), &["lift", "h.json", "--kernel", "2", "--twist", "7", "-o", "g.json", "--report", "r.json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let g = read_json(tmp.path().join("g.json"));
    assert_eq!(g["group"]["kind"], "direct_product");
    let h = read_json(tmp.path().join("h.json"));
    for (e, d) in g["sets"].as_array().unwrap().iter().zip(h["sets"].as_array().unwrap()) {
        assert_eq!(e.as_array().unwrap().len(), 2 * d.as_array().unwrap().len());
    }
    // the lifted window is itself a valid scheme
    let o = run(tmp.path(), &["verify", "g.json"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn rearrange_then_cocycle_and_bernoulli() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["build", "--group", "heisenberg", "--n-max", "3", "-o", "h.json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(code(&run(tmp.path(), &["cocycle", "h.json", "--rearrange"])), 0);
    assert_eq!(code(&run(tmp.path(), &["rearrange", "h.json", "-o", "f.json"])), 0);
    let o = run(tmp.path(), &["cocycle", "f.json", "-o", "c.json"]);
    assert_eq!(code(&o), 0);
    let o = run(tmp.path(), &["bernoulli", "f.json", "-o", "b.json", "--emit-csv", "cons.csv", "--kakutani-csv", "kak.csv"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(std::fs::read_to_string(tmp.path().join("cons.csv")).unwrap().starts_with("K,"));
    assert!(std::fs::read_to_string(tmp.path().join("kak.csv")).unwrap().starts_with("N,"));
    let o = run(tmp.path(), &["phi", "f.json", "--k-max", "8", "--emit-csv", "phi.csv"]);
    assert_eq!(code(&o), 0);
    let phi = std::fs::read_to_string(tmp.path().join("phi.csv")).unwrap();
    assert_eq!(phi.lines().next().unwrap(), "k,phi_partial,phi_f64");
    assert_eq!(phi.lines().count(), 1 + 9);
    assert!(phi.contains("\n1,7/4,"));
}

#[test]
fn published_schema_matches_config_types() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/run_config.schema.json");
    let mut fresh = serde_json::to_string_pretty(&lscheme_cli::config::schema()).unwrap();
    fresh.push('\n');
    if std::env::var_os("LSCHEME_BLESS").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, &fresh).unwrap();
    }
    let published = std::fs::read_to_string(&path).expect("schema file; run with LSCHEME_BLESS=1 to create");
    assert_eq!(published, fresh);
}
