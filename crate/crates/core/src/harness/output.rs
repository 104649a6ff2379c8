//! Result files: `results.csv`, `results.json` and `run_meta.json`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ExperimentConfig, KappaMode, RunOutput, SinrCurve};
use crate::error::{Error, Result};
use crate::scenarios::{ScenarioKind, TextureModel};

pub const CSV_HEADER: [&str; 12] = [
    "experiment_id",
    "scenario_type",
    "estimator",
    "K",
    "mc",
    "sigma_a_db",
    "sigma2_db",
    "kappa",
    "grid_value",
    "sinr_av_db",
    "bound_db",
    "failed_trials",
];

#[derive(Serialize)]
struct CsvRow<'a> {
    experiment_id: &'a str,
    scenario_type: &'a str,
    estimator: &'a str,
    k: usize,
    mc: usize,
    sigma_a_db: f64,
    sigma2_db: f64,
    kappa: f64,
    grid_value: f64,
    sinr_av_db: f64,
    bound_db: f64,
    failed_trials: usize,
}

/// Everything about a run except its results. Only `threads` and `wall_time_s`
/// vary between otherwise identical runs, and they are kept out of `results.*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub version: String,
    pub seed: u64,
    pub kappa: f64,
    pub decisions: BTreeMap<String, String>,
    pub warnings: Vec<String>,
    pub config: ExperimentConfig,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub threads: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_time_s: Option<f64>,
}

impl RunMeta {
    pub fn new(config: &ExperimentConfig, output: &RunOutput) -> Self {
        let mut d = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            d.insert(k.to_string(), v);
        };
        put("sinr_averaging", "linear mean over successful trials, then dB".into());
        put("sinr_db_floor", "zero SINR reported as -300 dB and counted in zero_sinr_trials".into());
        put("failed_trials", "excluded from the average and counted in failed_trials".into());
        put("fpe_initialization", "nscm".into());
        put("fpe_normalization", "trace fixed to n every iteration".into());
        put(
            "kappa",
            match config.kappa_mode {
                KappaMode::True => "condition number of the true covariance".into(),
                KappaMode::Explicit(k) => format!("explicit {k}"),
            },
        );
        put("shrinkage_plateau", "lowest optimal u".into());
        put("trial_rng", "ChaCha8 keyed by seed, stream (K << 32) | trial".into());
        if let ScenarioKind::Spatial(s) = &config.scenario.kind {
            put("sinc", format!("{:?}", s.sinc).to_lowercase());
        }
        if let TextureModel::Compound { .. } = config.scenario.texture {
            put("texture", "Gamma(shape 1/mu_tau, scale mu_tau), unit mean".into());
        }
        Self {
            version: env!("CARGO_PKG_VERSION").into(),
            seed: config.seed,
            kappa: output.kappa,
            decisions: d,
            warnings: output.warnings.clone(),
            config: config.clone(),
            threads: Some(output.threads),
            wall_time_s: Some(output.wall_time_s),
        }
    }

    fn deterministic(&self) -> Self {
        Self { threads: None, wall_time_s: None, ..self.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsFile {
    pub curves: Vec<SinrCurve>,
    pub metadata: RunMeta,
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.to_path_buf(), source }
}

fn write_csv(curves: &[SinrCurve], path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(io(path))?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    let csv_err = |e: csv::Error| Error::Io { path: path.to_path_buf(), source: e.into() };
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for c in curves {
        for ((&grid_value, &sinr_av_db), &bound_db) in c.grid.iter().zip(&c.sinr_av_db).zip(&c.bound_db) {
            w.serialize(CsvRow {
                experiment_id: &c.experiment_id,
                scenario_type: &c.scenario_type,
                estimator: &c.estimator,
                k: c.k,
                mc: c.mc,
                sigma_a_db: c.sigma_a_db,
                sigma2_db: c.sigma2_db,
                kappa: c.kappa,
                grid_value,
                sinr_av_db,
                bound_db,
                failed_trials: c.failed_trials,
            })
            .map_err(csv_err)?;
        }
    }
    w.flush().map_err(io(path))
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|source| Error::Json { context: format!("serialising {}", path.display()), source })?;
    fs::write(path, text + "\n").map_err(io(path))
}

/// Writes `results.csv`, `results.json` and `run_meta.json` into `out_dir`, creating it if needed.
pub fn emit_results(curves: &[SinrCurve], meta: &RunMeta, out_dir: &Path) -> Result<()> {
    fs::create_dir_all(out_dir).map_err(io(out_dir))?;
    write_csv(curves, &out_dir.join("results.csv"))?;
    let results = ResultsFile { curves: curves.to_vec(), metadata: meta.deterministic() };
    write_json(&results, &out_dir.join("results.json"))?;
    write_json(meta, &out_dir.join("run_meta.json"))
}

pub fn read_results(path: &Path) -> Result<ResultsFile> {
    let text = fs::read_to_string(path).map_err(io(path))?;
    serde_json::from_str(&text).map_err(|source| Error::Json { context: format!("{}", path.display()), source })
}
