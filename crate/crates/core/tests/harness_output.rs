use covproj::baselines::FpeConfig;
use covproj::harness::{
    emit_results, read_results, run_experiment, ExperimentConfig, KappaMode, RunMeta, RunOutput, CSV_HEADER,
};
use covproj::scenarios::{DopplerScenario, Scenario, ScenarioKind, TextureModel};

fn doppler_config() -> ExperimentConfig {
    ExperimentConfig {
        experiment_id: "doppler-small".into(),
        scenario: Scenario {
            kind: ScenarioKind::Doppler(DopplerScenario {
                n: 6,
                cnr_s_db: 10.0,
                cnr_g_db: 25.0,
                rho_s: 0.8,
                rho_g: 0.95,
                f_s: 0.2,
                noise_power_db: 0.0,
            }),
            texture: TextureModel::Compound { mu_tau: 2.0 },
        },
        k_values: vec![8, 12],
        mc: 5,
        seed: 99,
        grid: vec![-0.5, -0.25, 0.0, 0.25],
        estimators: vec!["fne".into(), "nscm".into(), "gauge:kyfan".into()],
        sigma2_db: 0.0,
        kappa_mode: KappaMode::Explicit(50.0),
        fpe: FpeConfig::default(),
    }
}

#[test]
fn empty_curve_list_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = doppler_config();
    let out = RunOutput { curves: vec![], warnings: vec![], kappa: 1.0, threads: 1, wall_time_s: 0.0 };
    emit_results(&[], &RunMeta::new(&cfg, &out), dir.path()).unwrap();
    let csv = std::fs::read_to_string(dir.path().join("results.csv")).unwrap();
    assert_eq!(csv, CSV_HEADER.join(",") + "\n");
}

#[test]
fn files_round_trip_and_row_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = doppler_config();
    let out = run_experiment(&cfg, Some(2)).unwrap();
    emit_results(&out.curves, &RunMeta::new(&cfg, &out), dir.path()).unwrap();

    let csv = std::fs::read_to_string(dir.path().join("results.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "experiment_id,scenario_type,estimator,K,mc,sigma_a_db,sigma2_db,kappa,grid_value,sinr_av_db,bound_db,failed_trials");
    // |K| * |grid| * (|estimators| + bound)
    assert_eq!(lines.len() - 1, 2 * 4 * 4);
    assert!(lines[1].starts_with("doppler-small,doppler,fne,8,5,0.0,0.0,50.0,-0.5,"));

    let back = read_results(&dir.path().join("results.json")).unwrap();
    assert_eq!(back.curves, out.curves);
    assert_eq!(back.metadata.config, cfg);
    assert!(back.metadata.wall_time_s.is_none());

    let meta: RunMeta =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("run_meta.json")).unwrap()).unwrap();
    assert_eq!(meta.threads, Some(2));
    assert!(meta.wall_time_s.is_some());
    assert_eq!(meta.decisions["fpe_initialization"], "nscm");
    assert!(meta.decisions["texture"].contains("unit mean"));
}

#[test]
fn results_are_byte_identical_across_threads() {
    let cfg = doppler_config();
    let mut files = Vec::new();
    for threads in [1, 4, 8] {
        let dir = tempfile::tempdir().unwrap();
        let out = run_experiment(&cfg, Some(threads)).unwrap();
        emit_results(&out.curves, &RunMeta::new(&cfg, &out), dir.path()).unwrap();
        files.push((
            std::fs::read(dir.path().join("results.csv")).unwrap(),
            std::fs::read(dir.path().join("results.json")).unwrap(),
        ));
    }
    assert!(files.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn unwritable_output_reports_path() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let cfg = doppler_config();
    let out = RunOutput { curves: vec![], warnings: vec![], kappa: 1.0, threads: 1, wall_time_s: 0.0 };
    let err = emit_results(&[], &RunMeta::new(&cfg, &out), &blocker.join("sub")).unwrap_err();
    assert!(err.to_string().contains("file"), "{err}");
}

#[test]
fn sinr_is_invariant_to_estimate_scale() {
    use covproj::harness::{sinr_to_db, sinr_trial};
    use covproj::scenarios::{clutter_covariance, steering_doppler, total_covariance};
    let ScenarioKind::Doppler(d) = doppler_config().scenario.kind else { unreachable!() };
    let m = total_covariance(&clutter_covariance(&d), 0.0);
    let m_hat = m.add_diagonal(3.0);
    for nu in [-0.4, 0.0, 0.1, 0.3] {
        let s = steering_doppler(nu, d.n);
        let a = sinr_to_db(sinr_trial(&m_hat, &m, &s).unwrap());
        let b = sinr_to_db(sinr_trial(&m_hat.scaled(1e3), &m, &s).unwrap());
        assert!((a - b).abs() <= 1e-10, "{a} {b}");
    }
}
