use std::path::Path;
use std::process::{Command, Output};

fn covproj(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_covproj")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_diag(path: &Path, diag: &[f64]) {
    let n = diag.len();
    let mut re = vec![0.0; n * n];
    for (i, d) in diag.iter().enumerate() {
        re[i * n + i] = *d;
    }
    let json = serde_json::json!({"n": n, "re": re, "im": vec![0.0; n * n]});
    std::fs::write(path, json.to_string()).unwrap();
}

#[test]
fn project_identity_gives_noise_floor() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("i.json");
    let out = dir.path().join("m.json");
    write_diag(&input, &[1.0, 1.0, 1.0]);
    let o = covproj(&[
        "project",
        "--input",
        input.to_str().unwrap(),
        "--sigma2-db",
        "0",
        "--kappa",
        "5",
        "--norm",
        "fne",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("u_star 0.2"), "{text}");
    assert!(text.contains("branch fne:d1<=kappa"), "{text}");
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let re: Vec<f64> = serde_json::from_value(m["re"].clone()).unwrap();
    for (k, v) in re.iter().enumerate() {
        let want = if k % 4 == 0 { 1.0 } else { 0.0 };
        assert!((v - want).abs() < 1e-14);
    }
}

#[test]
fn project_spectral_worked_value() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("s.json");
    let out = dir.path().join("m.json");
    write_diag(&input, &[10.0, 0.5]);
    let sigma2_db = format!("{}", 10.0 * 2f64.log10());
    let o = covproj(&[
        "project",
        "--input",
        input.to_str().unwrap(),
        "--sigma2-db",
        &sigma2_db,
        "--kappa",
        "2",
        "--norm",
        "sne",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("branch sne:case-4b"));
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let re: Vec<f64> = serde_json::from_value(m["re"].clone()).unwrap();
    assert!((re[0] - 7.0).abs() < 1e-9 && (re[3] - 3.5).abs() < 1e-9, "{re:?}");
}

#[test]
fn oracle_agrees_on_worked_value() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("s.json");
    write_diag(&input, &[10.0, 0.5]);
    let o = covproj(&[
        "oracle",
        "--input",
        input.to_str().unwrap(),
        "--sigma2-db",
        "0",
        "--kappa",
        "2",
        "--norm",
        "fne",
        "--grid-points",
        "100000",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("u_star 4.1"), "{text}");
    assert!(text.trim_end().ends_with("agree"), "{text}");
}

#[test]
fn missing_config_exits_one_and_names_path() {
    let dir = tempfile::tempdir().unwrap();
    let o = covproj(&["run", "--config", "/nonexistent/cfg.json", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("/nonexistent/cfg.json"));
}

#[test]
fn unknown_estimator_lists_registry() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    let text =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/spatial_gaussian_matched.json"))
            .unwrap()
            .replace("\"scm\"", "\"mvdr\"");
    std::fs::write(&cfg, text).unwrap();
    let o = covproj(&["run", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("fne, sne, gauge:<name>, scm, nscm, fpe, clairvoyant"), "{}", stderr(&o));
}

#[test]
fn malformed_config_reports_location() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, "{\n  \"experiment_id\": \"x\",\n  \"mc\": \"many\"\n}").unwrap();
    let o = covproj(&["run", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn indefinite_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("s.json");
    write_diag(&input, &[1.0, -3.0]);
    let o = covproj(&[
        "project",
        "--input",
        input.to_str().unwrap(),
        "--sigma2-db",
        "0",
        "--kappa",
        "2",
        "--out",
        dir.path().join("m.json").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn bad_flags_exit_one() {
    assert_eq!(covproj(&["project", "--kappa", "x"]).status.code(), Some(1));
    assert_eq!(covproj(&["--help"]).status.code(), Some(0));
}

#[test]
fn run_small_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    let mut v: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../configs/doppler_gaussian_mismatched.json"
        ))
        .unwrap(),
    )
    .unwrap();
    v["mc"] = 3.into();
    v["k_values"] = serde_json::json!([16]);
    std::fs::write(&cfg, v.to_string()).unwrap();
    let out = dir.path().join("out");
    let o = covproj(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--threads", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(out.join("results.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 100 * 4);
    assert!(out.join("run_meta.json").exists() && out.join("results.json").exists());
}
