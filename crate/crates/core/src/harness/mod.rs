//! Monte Carlo SINR benchmark.
//!
//! For each sample support `K` and trial, `K` secondary data are drawn from a
//! trial-local generator, every estimator builds its covariance estimate, and
//! the adaptive weight `w = M_hat^{-1} s` is scored at each grid point by
//! `|w^H s|^2 / (w^H M w)`. Linear SINRs are averaged over trials in trial-index
//! order and only then converted to dB.

mod output;

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use output::{emit_results, read_results, ResultsFile, RunMeta, CSV_HEADER};

use crate::baselines::{fpe, nscm, scm, FpeConfig};
use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, inverse_quad_form, HermitianMatrix, SpectralDecomposition, WeightSolver};
use crate::projector::{normalize, project_decomposed, Norm, ProjectionConfig};
use crate::scenarios::{true_kappa, Sampler, Scenario};
use crate::tolerances::SINR_DB_FLOOR;
use crate::{db_to_linear, linear_to_db, CVector};

pub const REGISTRY: &str = "fne, sne, gauge:<name>, scm, nscm, fpe, clairvoyant";
const OUT_OF_SCOPE: [&str; 3] = ["cml", "fml", "lre"];

/// Environment variable consulted for the worker count when no flag is given.
pub const THREADS_ENV: &str = "COVPROJ_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KappaMode {
    /// Condition number of the true covariance, computed once per run.
    #[default]
    True,
    Explicit(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment_id: String,
    pub scenario: Scenario,
    pub k_values: Vec<usize>,
    pub mc: usize,
    pub seed: u64,
    /// Target angles in degrees (spatial) or normalised Doppler values.
    pub grid: Vec<f64>,
    pub estimators: Vec<String>,
    /// Projector noise floor in dB.
    #[serde(default)]
    pub sigma2_db: f64,
    #[serde(default)]
    pub kappa_mode: KappaMode,
    #[serde(default)]
    pub fpe: FpeConfig,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self =
            serde_json::from_str(text).map_err(|source| Error::Json { context: "experiment config".into(), source })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })?;
        let cfg: Self = serde_json::from_str(&text)
            .map_err(|source| Error::Json { context: format!("config {}", path.display()), source })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        if self.mc == 0 {
            return Err(Error::Config("mc must be >= 1".into()));
        }
        if self.k_values.is_empty() || self.k_values.contains(&0) {
            return Err(Error::Config("k_values must be a non-empty list of positive counts".into()));
        }
        if self.grid.is_empty() || self.grid.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config("grid must be a non-empty list of finite values".into()));
        }
        if self.estimators.is_empty() {
            return Err(Error::Config("estimators must not be empty".into()));
        }
        if !self.sigma2_db.is_finite() {
            return Err(Error::Config("sigma2_db must be finite".into()));
        }
        if let KappaMode::Explicit(k) = self.kappa_mode {
            if !(k >= 1.0) || !k.is_finite() {
                return Err(Error::Config(format!("explicit kappa must be >= 1, got {k}")));
            }
        }
        if self.fpe.max_iter == 0 || !(self.fpe.rel_tol > 0.0) {
            return Err(Error::Config("fpe needs max_iter >= 1 and rel_tol > 0".into()));
        }
        for name in &self.estimators {
            Estimator::parse(name)?;
        }
        Ok(())
    }
}

/// A registry entry.
#[derive(Debug, Clone)]
pub enum Estimator {
    Projection(Norm),
    Scm,
    Nscm,
    Fpe,
    /// The true covariance; attains the bound.
    Clairvoyant,
}

impl Estimator {
    pub fn parse(name: &str) -> Result<Self> {
        let lower = name.to_ascii_lowercase();
        if OUT_OF_SCOPE.contains(&lower.as_str()) {
            return Err(Error::OutOfScope(name.into()));
        }
        match lower.as_str() {
            "fne" => Ok(Estimator::Projection(Norm::Frobenius)),
            "sne" => Ok(Estimator::Projection(Norm::Spectral)),
            "scm" => Ok(Estimator::Scm),
            "nscm" => Ok(Estimator::Nscm),
            "fpe" => Ok(Estimator::Fpe),
            "clairvoyant" => Ok(Estimator::Clairvoyant),
            _ if lower.starts_with("gauge:") => Ok(Estimator::Projection(name.parse()?)),
            _ => Err(Error::UnknownEstimator { name: name.into(), registry: REGISTRY.into() }),
        }
    }
}

/// `|w^H s|^2 / (w^H M w)`; zero when the weight vanishes.
pub fn sinr_with_weight(w: &CVector, m_true: &HermitianMatrix, s: &CVector) -> f64 {
    let num = w.dotc(s).norm_sqr();
    if num == 0.0 {
        return 0.0;
    }
    num / m_true.quad_form(w)
}

/// SINR of the weight `M_hat^{-1} s` (pseudo-inverse when `M_hat` is singular) under `m_true`.
pub fn sinr_trial(m_hat: &HermitianMatrix, m_true: &HermitianMatrix, s: &CVector) -> Result<f64> {
    if s.len() != m_true.n() || m_hat.n() != m_true.n() {
        return Err(Error::DimensionMismatch { expected: m_true.n(), got: s.len().min(m_hat.n()) });
    }
    let w = WeightSolver::new(m_hat)?.solve(s);
    Ok(sinr_with_weight(&w, m_true, s))
}

/// Clairvoyant bound `s^H M^{-1} s`.
pub fn sinr_bound(m_true: &HermitianMatrix, s: &CVector) -> Result<f64> {
    inverse_quad_form(m_true, s)
}

pub fn sinr_to_db(x: f64) -> f64 {
    if x > 0.0 {
        linear_to_db(x)
    } else {
        SINR_DB_FLOOR
    }
}

/// Average-SINR curve for one estimator at one sample support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SinrCurve {
    pub experiment_id: String,
    pub scenario_type: String,
    /// Registry name, or `bound` for the clairvoyant bound row set.
    pub estimator: String,
    #[serde(rename = "K")]
    pub k: usize,
    pub mc: usize,
    pub sigma_a_db: f64,
    pub sigma2_db: f64,
    pub kappa: f64,
    pub grid: Vec<f64>,
    pub sinr_av_db: Vec<f64>,
    pub bound_db: Vec<f64>,
    /// Trials where the estimator failed; excluded from the average.
    pub failed_trials: usize,
    /// Trials whose SINR was exactly zero at some grid point; included in the average.
    pub zero_sinr_trials: usize,
    /// Largest per-trial `SINR / bound` over all trials and grid points.
    pub max_bound_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutput {
    pub curves: Vec<SinrCurve>,
    pub warnings: Vec<String>,
    pub kappa: f64,
    pub threads: usize,
    pub wall_time_s: f64,
}

/// Worker count: explicit flag, else `COVPROJ_THREADS`, else available parallelism.
pub fn resolve_threads(flag: Option<usize>) -> Result<usize> {
    if let Some(n) = flag {
        if n == 0 {
            return Err(Error::Config("--threads must be >= 1".into()));
        }
        return Ok(n);
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(Error::Config(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// Trial-local generator: a fixed key from the master seed and one stream per `(K, trial)`.
pub fn trial_rng(seed: u64, k: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((k as u64) << 32) | trial as u64);
    rng
}

struct Context {
    m_true: HermitianMatrix,
    sampler: Sampler,
    steering: Vec<CVector>,
    bound: Vec<f64>,
    projection: ProjectionConfig,
    fpe: FpeConfig,
    estimators: Vec<Estimator>,
    clairvoyant: WeightSolver,
}

impl Context {
    fn weight_solver(&self, est: &Estimator, data: &[CVector]) -> Result<WeightSolver> {
        match est {
            Estimator::Projection(norm) => {
                let cfg = ProjectionConfig { norm: norm.clone(), ..self.projection.clone() };
                let s = normalize(&scm(data)?, cfg.sigma2)?;
                let p = project_decomposed(eig_hermitian(&s)?, &cfg)?;
                let values = p.solution.lambda_star.iter().map(|l| l * cfg.sigma2).collect();
                Ok(WeightSolver::from_decomposition(SpectralDecomposition { vectors: p.decomposition.vectors, values }))
            }
            Estimator::Scm => WeightSolver::new(&scm(data)?),
            Estimator::Nscm => WeightSolver::new(&nscm(data)?),
            Estimator::Fpe => WeightSolver::new(&fpe(data, &self.fpe)?),
            Estimator::Clairvoyant => Ok(self.clairvoyant.clone()),
        }
    }

    fn trial(&self, k: usize, seed: u64, trial: usize) -> Vec<Result<Vec<f64>, String>> {
        let mut rng = trial_rng(seed, k, trial);
        let data = self.sampler.sample(k, &mut rng);
        self.estimators
            .iter()
            .map(|est| {
                let solver = self.weight_solver(est, &data).map_err(|e| e.to_string())?;
                Ok(self.steering.iter().map(|s| sinr_with_weight(&solver.solve(s), &self.m_true, s)).collect())
            })
            .collect()
    }
}

/// Projector condition number cap for a config.
pub fn resolve_kappa(config: &ExperimentConfig, m_true: &HermitianMatrix) -> Result<f64> {
    match config.kappa_mode {
        KappaMode::True => true_kappa(m_true),
        KappaMode::Explicit(k) => Ok(k),
    }
}

pub fn run_experiment(config: &ExperimentConfig, threads: Option<usize>) -> Result<RunOutput> {
    let started = Instant::now();
    config.validate()?;
    let threads = resolve_threads(threads)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;

    let m_true = config.scenario.covariance();
    let kappa = resolve_kappa(config, &m_true)?;
    let steering: Vec<CVector> = config.grid.iter().map(|&x| config.scenario.steering(x)).collect();
    let bound = steering.iter().map(|s| sinr_bound(&m_true, s)).collect::<Result<Vec<_>>>()?;
    let sigma2 = db_to_linear(config.sigma2_db);
    let ctx = Context {
        sampler: config.scenario.sampler()?,
        clairvoyant: WeightSolver::new(&m_true)?,
        projection: ProjectionConfig::new(sigma2, kappa, Norm::Frobenius),
        fpe: config.fpe,
        estimators: config.estimators.iter().map(|n| Estimator::parse(n)).collect::<Result<_>>()?,
        m_true,
        steering,
        bound,
    };
    let bound_db: Vec<f64> = ctx.bound.iter().map(|&b| sinr_to_db(b)).collect();

    let base = |estimator: &str, k: usize| SinrCurve {
        experiment_id: config.experiment_id.clone(),
        scenario_type: config.scenario.type_name().into(),
        estimator: estimator.into(),
        k,
        mc: config.mc,
        sigma_a_db: config.scenario.noise_power_db(),
        sigma2_db: config.sigma2_db,
        kappa,
        grid: config.grid.clone(),
        sinr_av_db: Vec::new(),
        bound_db: bound_db.clone(),
        failed_trials: 0,
        zero_sinr_trials: 0,
        max_bound_ratio: 0.0,
    };

    let mut curves = Vec::new();
    let mut warnings = Vec::new();
    for &k in &config.k_values {
        let trials: Vec<_> =
            pool.install(|| (0..config.mc).into_par_iter().map(|t| ctx.trial(k, config.seed, t)).collect());

        for (e, name) in config.estimators.iter().enumerate() {
            let mut sum = vec![0.0; config.grid.len()];
            let mut curve = base(name, k);
            let mut first_error = None;
            // index-order reduction keeps sums bit-stable across thread counts
            for outcome in &trials {
                match &outcome[e] {
                    Ok(sinr) => {
                        let mut zero = false;
                        for (g, &x) in sinr.iter().enumerate() {
                            sum[g] += x;
                            zero |= x == 0.0;
                            curve.max_bound_ratio = curve.max_bound_ratio.max(x / ctx.bound[g]);
                        }
                        curve.zero_sinr_trials += zero as usize;
                    }
                    Err(msg) => {
                        curve.failed_trials += 1;
                        first_error.get_or_insert_with(|| msg.clone());
                    }
                }
            }
            let ok = config.mc - curve.failed_trials;
            if ok == 0 {
                warnings.push(format!("estimator {name} skipped at K={k}: {}", first_error.unwrap_or_default()));
                continue;
            }
            if let Some(msg) = first_error {
                warnings.push(format!(
                    "estimator {name} failed in {} of {} trials at K={k}: {msg}",
                    curve.failed_trials, config.mc
                ));
            }
            curve.sinr_av_db = sum.iter().map(|&s| sinr_to_db(s / ok as f64)).collect();
            curves.push(curve);
        }
        let mut b = base("bound", k);
        b.sinr_av_db = bound_db.clone();
        b.max_bound_ratio = 1.0;
        curves.push(b);
    }
    Ok(RunOutput { curves, warnings, kappa, threads, wall_time_s: started.elapsed().as_secs_f64() })
}

/// `||M - M_hat||_F` per trial for a projection estimator, at one sample support.
pub fn frobenius_errors(
    scenario: &Scenario,
    k: usize,
    mc: usize,
    seed: u64,
    projection: &ProjectionConfig,
) -> Result<Vec<f64>> {
    let m_true = scenario.covariance();
    let sampler = scenario.sampler()?;
    (0..mc)
        .map(|t| {
            let data = sampler.sample(k, &mut trial_rng(seed, k, t));
            let (m_hat, _) = crate::projector::project(&scm(&data)?, projection)?;
            Ok(m_hat.distance(&m_true))
        })
        .collect()
}
