//! `covproj`: covariance projection and SINR benchmarking from the command line.
//!
//! Exit status: 0 on success, 1 for usage, configuration or I/O errors, 2 when the
//! numerical machinery fails.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use covproj::harness::{emit_results, run_experiment, ExperimentConfig, RunMeta};
use covproj::linalg::{eig_hermitian, MatrixJson};
use covproj::projector::{normalize, oracle_u, project, Norm, ProjectionConfig};
use covproj::{db_to_linear, Error, HermitianMatrix};

#[derive(Parser)]
#[command(name = "covproj", version, about = "Condition-number constrained covariance projection and SINR benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo SINR experiment and write results.csv, results.json and run_meta.json.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (default: $COVPROJ_THREADS, else all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Project a single Hermitian matrix.
    Project {
        #[command(flatten)]
        common: ProjectArgs,
        /// Where to write the estimate (matrix JSON).
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare the scalar solver against a brute-force grid search.
    Oracle {
        #[command(flatten)]
        common: ProjectArgs,
        #[arg(long, default_value_t = 1_000_000)]
        grid_points: usize,
    },
}

#[derive(Args)]
struct ProjectArgs {
    /// Sample covariance as matrix JSON: {"n": .., "re": [..], "im": [..]}, row-major.
    #[arg(long)]
    input: PathBuf,
    /// Noise floor in dB.
    #[arg(long, allow_hyphen_values = true)]
    sigma2_db: f64,
    #[arg(long)]
    kappa: f64,
    /// fne, sne, or a gauge: kyfan, kyfan:<k>, euclidean, max.
    #[arg(long, default_value = "fne")]
    norm: String,
}

impl ProjectArgs {
    fn load(&self) -> Result<(HermitianMatrix, ProjectionConfig), Error> {
        let s_hat = read_matrix(&self.input)?;
        let norm: Norm = self.norm.parse()?;
        Ok((s_hat, ProjectionConfig::new(db_to_linear(self.sigma2_db), self.kappa, norm)))
    }
}

fn read_matrix(path: &Path) -> Result<HermitianMatrix, Error> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })?;
    let json: MatrixJson = serde_json::from_str(&text)
        .map_err(|source| Error::Json { context: format!("matrix {}", path.display()), source })?;
    HermitianMatrix::try_from(json)
}

fn write_matrix(m: &HermitianMatrix, path: &Path) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(&m.to_json())
        .map_err(|source| Error::Json { context: "matrix".into(), source })?;
    std::fs::write(path, text + "\n").map_err(|source| Error::Io { path: path.into(), source })
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run { config, out, threads } => {
            let cfg = ExperimentConfig::load(&config)?;
            let output = run_experiment(&cfg, threads)?;
            emit_results(&output.curves, &RunMeta::new(&cfg, &output), &out)?;
            for w in &output.warnings {
                eprintln!("warning: {w}");
            }
            println!(
                "{}: {} curves, kappa {:.6}, {} threads, {:.2} s -> {}",
                cfg.experiment_id,
                output.curves.len(),
                output.kappa,
                output.threads,
                output.wall_time_s,
                out.display()
            );
        }
        Command::Project { common, out } => {
            let (s_hat, cfg) = common.load()?;
            let (m_hat, sol) = project(&s_hat, &cfg)?;
            write_matrix(&m_hat, &out)?;
            println!("u_star {}", sol.u_star);
            println!("branch {}", sol.branch);
            println!("objective {}", sol.objective);
        }
        Command::Oracle { common, grid_points } => {
            let (s_hat, cfg) = common.load()?;
            let (_, sol) = project(&s_hat, &cfg)?;
            let d = eig_hermitian(&normalize(&s_hat, cfg.sigma2)?)?.values;
            let grid = oracle_u(cfg.norm.gauge().as_ref(), &d, cfg.kappa, grid_points)?;
            let gap = sol.objective - grid.objective;
            println!("solver  u_star {:<24} objective {:<24} branch {}", sol.u_star, sol.objective, sol.branch);
            println!("grid    u      {:<24} objective {:<24} points {grid_points}", grid.u, grid.objective);
            println!("|du| {:e}  objective gap {:e}", (sol.u_star - grid.u).abs(), gap);
            let slack = 1e-6 * (1.0 + grid.objective);
            println!("{}", if gap <= slack { "agree" } else { "DISAGREE" });
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}
