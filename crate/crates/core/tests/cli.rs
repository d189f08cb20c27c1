use dfs_core::cli::{EXIT_INPUT, EXIT_NO_DFS, EXIT_OK, EXIT_VERIFY, PROFILE_ENV};
use dfs_core::gallery;
use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use tempfile::TempDir;

fn dfs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dfs"))
        .args(args)
        .env_remove(PROFILE_ENV)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn emit(dir: &TempDir, name: &str, params: &[&str]) -> PathBuf {
    let path = dir.path().join(format!("{name}.json"));
    let mut args = vec!["gallery", "emit", name, "--out", p(&path)];
    for kv in params {
        args.extend(["--param", kv]);
    }
    let o = dfs(&args);
    assert_eq!(code(&o), EXIT_OK, "{}", stderr(&o));
    path
}

#[test]
fn analyze_reports_dfs_and_writes_report() {
    let dir = TempDir::new().unwrap();
    let model = emit(&dir, "igc_two_level", &[]);
    let report = dir.path().join("report.json");
    let o = dfs(&["analyze", p(&model), "--out", p(&report)]);
    assert_eq!(code(&o), EXIT_OK, "{}", stderr(&o));
    assert!(stdout(&o).contains("igc"));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["records"].as_array().unwrap().len(), 1);
    assert_eq!(v["records"][0]["classification"], "igc");
}

#[test]
fn analyze_without_dfs_exits_three() {
    let dir = TempDir::new().unwrap();
    let model = emit(&dir, "two_level_nonsemisimple", &[]);
    let o = dfs(&["analyze", p(&model)]);
    assert_eq!(code(&o), EXIT_NO_DFS);
    assert!(stdout(&o).contains("no DFS found"));
}

#[test]
fn bad_inputs_exit_one_and_name_the_field() {
    let dir = TempDir::new().unwrap();
    let o = dfs(&["analyze", p(&dir.path().join("missing.json"))]);
    assert_eq!(code(&o), EXIT_INPUT);

    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"dim": 2, "h_eff": [[[0,0],[1,0]],[[0,0],[0,0]]],
            "dissipator": {"diagonal": [{"lambda": 1.0, "J": [[[0,0],[1,0]],[[0,0],[0,0]]]}]}}"#,
    )
    .unwrap();
    let o = dfs(&["analyze", p(&bad)]);
    assert_eq!(code(&o), EXIT_INPUT);
    assert!(stderr(&o).contains("h_eff"), "{}", stderr(&o));

    let o = dfs(&["gallery", "emit", "nosuch"]);
    assert_eq!(code(&o), EXIT_INPUT);
    let o = dfs(&["gallery", "emit", "igc_two_level", "--param", "r=1"]);
    assert_eq!(code(&o), EXIT_INPUT);
    let good = emit(&dir, "igc_two_level", &[]);
    let o = dfs(&["--tol", "bogus=1", "analyze", p(&good)]);
    assert_eq!(code(&o), EXIT_INPUT);
    assert!(stderr(&o).contains("bogus"), "{}", stderr(&o));
}

#[test]
fn verify_passes_and_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let model = emit(&dir, "squeezed_vacuum_two_level", &["r=0.3"]);
    let report = dir.path().join("report.json");
    assert_eq!(code(&dfs(&["analyze", p(&model), "--out", p(&report)])), EXIT_OK);
    let run = || dfs(&["verify", p(&model), p(&report), "--trials", "5", "--seed", "3"]);
    let (a, b) = (run(), run());
    assert_eq!(code(&a), EXIT_OK, "{}", stderr(&a));
    assert!(stdout(&a).contains("PASS"));
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn verify_flags_a_wrong_subspace() {
    let dir = TempDir::new().unwrap();
    let model = emit(&dir, "two_level_decay", &[]);
    let report = dir.path().join("report.json");
    assert_eq!(code(&dfs(&["analyze", p(&model), "--out", p(&report)])), EXIT_OK);
    // replace the decay-free |0> by the excited state
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    v["records"][0]["basis"] = serde_json::json!([[[0.0, 0.0], [1.0, 0.0]]]);
    std::fs::write(&report, v.to_string()).unwrap();
    let o = dfs(&["verify", p(&model), p(&report), "--trials", "3"]);
    assert_eq!(code(&o), EXIT_VERIFY, "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn verify_rejects_report_for_another_model() {
    let dir = TempDir::new().unwrap();
    let a = emit(&dir, "igc_two_level", &[]);
    let b = emit(&dir, "two_level_decay", &[]);
    let report = dir.path().join("report.json");
    dfs(&["analyze", p(&a), "--out", p(&report)]);
    assert_eq!(code(&dfs(&["verify", p(&b), p(&report)])), EXIT_INPUT);
}

#[test]
fn gallery_list_names_every_entry() {
    let o = dfs(&["gallery", "list"]);
    assert_eq!(code(&o), EXIT_OK);
    for e in gallery::entries() {
        assert!(stdout(&o).contains(e.name));
    }
}

#[test]
fn emit_analyze_verify_pipeline_for_whole_gallery() {
    let dir = TempDir::new().unwrap();
    for e in gallery::entries() {
        let model = emit(&dir, e.name, &[]);
        let report = dir.path().join(format!("{}.report.json", e.name));
        let o = dfs(&["analyze", p(&model), "--out", p(&report)]);
        let expected = match &e.expected {
            Some(x) if x.records.is_empty() => EXIT_NO_DFS,
            Some(_) => EXIT_OK,
            None => code(&o),
        };
        assert_eq!(code(&o), expected, "{}: {}", e.name, stderr(&o));
        let o = dfs(&["verify", p(&model), p(&report), "--trials", "3"]);
        assert_eq!(code(&o), EXIT_OK, "{}: {}{}", e.name, stdout(&o), stderr(&o));
    }
}

#[test]
fn truncated_models_carry_a_note() {
    let dir = TempDir::new().unwrap();
    let model = emit(&dir, "damped_oscillator_truncated", &["n_max=20", "alpha=0.5"]);
    let o = dfs(&["analyze", p(&model)]);
    assert!(stderr(&o).contains("truncated"), "{}", stderr(&o));
    let o = dfs(&["gallery", "emit", "damped_oscillator_truncated", "--param", "n_max=5"]);
    assert_eq!(code(&o), EXIT_INPUT);
}

#[test]
fn propagate_writes_purity_and_fidelity_columns() {
    let dir = TempDir::new().unwrap();
    let model = emit(&dir, "two_level_decay", &[]);
    let o = dfs(&["propagate", p(&model), "--state", "basis:1", "--t-final", "3"]);
    assert_eq!(code(&o), EXIT_OK, "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("time\tpurity\tfidelity"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split('\t').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 65);
    let last = rows.last().unwrap();
    assert!((last[0] - 3.0).abs() < 1e-12);
    let q = (-3.0f64).exp();
    assert!((last[1] - (q * q + (1.0 - q) * (1.0 - q))).abs() < 1e-8);

    let state = dir.path().join("psi.json");
    std::fs::write(&state, r#"{"psi": [[1,0],[0,0]]}"#).unwrap();
    let o = dfs(&["propagate", p(&model), "--state", p(&state)]);
    assert_eq!(code(&o), EXIT_OK);
    let o = dfs(&["propagate", p(&model), "--state", "basis:7"]);
    assert_eq!(code(&o), EXIT_INPUT);
}

#[test]
fn profile_comes_from_flag_or_environment() {
    let dir = TempDir::new().unwrap();
    let model = emit(&dir, "igc_two_level", &[]);
    let report = dir.path().join("r.json");
    let cluster = |args: &[&str], env: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_dfs"));
        c.args(args).env_remove(PROFILE_ENV);
        if let Some(v) = env {
            c.env(PROFILE_ENV, v);
        }
        let o = c.output().unwrap();
        assert_eq!(code(&o), EXIT_OK, "{}", stderr(&o));
        let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
        v["tolerances"]["cluster"].as_f64().unwrap()
    };
    let args = ["analyze", p(&model), "--out", p(&report)];
    let default = cluster(&args, None);
    let strict = cluster(&args, Some("strict"));
    let loose = cluster(&[&["--profile", "loose"][..], &args].concat(), Some("strict"));
    assert!((strict - default * 0.1).abs() < 1e-20);
    assert!((loose - default * 100.0).abs() < 1e-14);

    let o = Command::new(env!("CARGO_BIN_EXE_dfs"))
        .args(args)
        .env(PROFILE_ENV, "nonsense")
        .output()
        .unwrap();
    assert_eq!(code(&o), EXIT_INPUT);
}
