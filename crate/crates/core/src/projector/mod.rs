//! Projection of a sample covariance onto
//! `{ R + sigma_n^2 I : R >= 0, sigma_n^2 >= sigma2, cond <= kappa }`.
//!
//! Work happens on the normalised matrix `S = S_hat / sigma2`: the estimate keeps
//! the eigenvectors of `S`, maps its eigenvalues `d` to `lambda(u_star)` and is
//! scaled back by `sigma2`.

pub mod frobenius;
pub mod gauge;
pub mod generic;
pub mod oracle;
pub mod shrinkage;
pub mod spectral;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

pub use frobenius::{g1, g1_derivative, solve_u_frobenius};
pub use gauge::{gauge_by_name, Euclidean, FnGauge, Gauge, KyFan, MaxEntry};
pub use generic::{solve_u_generic, solve_u_generic_with};
pub use oracle::{oracle_u, OraclePoint};
pub use shrinkage::{h_of_u, lambda_of_u, Branch, GenericMethod, ShrinkageSolution, SpectralCase};
pub use spectral::solve_u_spectral;

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, HermitianMatrix, SpectralDecomposition};
use crate::tolerances::Tolerances;

/// Norm the projection is taken in.
#[derive(Clone)]
pub enum Norm {
    Frobenius,
    Spectral,
    /// Any unitarily invariant norm, given by its gauge; solved numerically.
    Custom(Arc<dyn Gauge>),
}

impl Norm {
    pub fn name(&self) -> String {
        match self {
            Norm::Frobenius => "fne".into(),
            Norm::Spectral => "sne".into(),
            Norm::Custom(g) => format!("gauge:{}", g.name()),
        }
    }

    /// The gauge generating this norm.
    pub fn gauge(&self) -> Arc<dyn Gauge> {
        match self {
            Norm::Frobenius => Arc::new(Euclidean),
            Norm::Spectral => Arc::new(MaxEntry),
            Norm::Custom(g) => g.clone(),
        }
    }

    /// Norm of a Hermitian matrix, through its eigenvalue magnitudes.
    pub fn matrix_norm(&self, m: &HermitianMatrix) -> Result<f64> {
        match self {
            Norm::Frobenius => Ok(m.frobenius_norm()),
            _ => {
                let eig = eig_hermitian(m)?;
                let mut s: Vec<f64> = eig.values.iter().map(|v| v.abs()).collect();
                s.sort_by(|a, b| b.total_cmp(a));
                Ok(self.gauge().eval(&s))
            }
        }
    }
}

impl fmt::Debug for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Norm {
    type Err = Error;

    /// `fne` / `frobenius`, `sne` / `spectral`, or a built-in gauge name, optionally
    /// prefixed with `gauge:`. Gauge names always select the generic solver.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fne" | "frobenius" => Ok(Norm::Frobenius),
            "sne" | "spectral" => Ok(Norm::Spectral),
            _ => {
                let g = s.strip_prefix("gauge:").unwrap_or(s);
                gauge_by_name(g).map(|g| Norm::Custom(Arc::from(g))).map_err(|_| {
                    Error::InvalidParameter(format!(
                        "unknown norm `{s}` (expected fne, sne, kyfan, kyfan:<k>, euclidean, max or gauge:<name>)"
                    ))
                })
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProjectionConfig {
    /// Lower bound on the white-noise power, linear units.
    pub sigma2: f64,
    /// Condition number cap.
    pub kappa: f64,
    pub norm: Norm,
    pub tolerances: Tolerances,
}

impl ProjectionConfig {
    pub fn new(sigma2: f64, kappa: f64, norm: Norm) -> Self {
        Self { sigma2, kappa, norm, tolerances: Tolerances::default() }
    }

    fn validate(&self) -> Result<()> {
        if !(self.sigma2 > 0.0) || !self.sigma2.is_finite() {
            return Err(Error::InvalidParameter(format!("sigma2 must be positive, got {}", self.sigma2)));
        }
        if !(self.kappa >= 1.0) || !self.kappa.is_finite() {
            return Err(Error::InvalidParameter(format!("kappa must be a finite value >= 1, got {}", self.kappa)));
        }
        Ok(())
    }
}

/// Estimate together with the scalar solution and the decomposition of `S` it was built from.
#[derive(Debug, Clone)]
pub struct Projection {
    pub estimate: HermitianMatrix,
    pub solution: ShrinkageSolution,
    pub decomposition: SpectralDecomposition,
}

/// `S_hat / sigma2`.
pub fn normalize(s_hat: &HermitianMatrix, sigma2: f64) -> Result<HermitianMatrix> {
    if !(sigma2 > 0.0) || !sigma2.is_finite() {
        return Err(Error::InvalidParameter(format!("sigma2 must be positive, got {sigma2}")));
    }
    Ok(s_hat.scaled(1.0 / sigma2))
}

/// Solves the scalar problem for descending eigenvalues `d` of the normalised matrix.
pub fn solve_u(d: &[f64], kappa: f64, norm: &Norm, tol: &Tolerances) -> Result<ShrinkageSolution> {
    match norm {
        Norm::Custom(g) => solve_u_generic_with(g.as_ref(), d, kappa, tol),
        Norm::Frobenius => {
            let d = shrinkage::prepare_eigenvalues(d, kappa, tol)?;
            let (u, branch) = frobenius::frobenius_u(&d, kappa);
            Ok(ShrinkageSolution::at(&d, kappa, u, branch, |h| Euclidean.eval(h)))
        }
        Norm::Spectral => {
            let d = shrinkage::prepare_eigenvalues(d, kappa, tol)?;
            let (u, branch) = spectral::spectral_u(&d, kappa);
            Ok(ShrinkageSolution::at(&d, kappa, u, branch, |h| MaxEntry.eval(h)))
        }
    }
}

pub fn project(s_hat: &HermitianMatrix, config: &ProjectionConfig) -> Result<(HermitianMatrix, ShrinkageSolution)> {
    let p = project_full(s_hat, config)?;
    Ok((p.estimate, p.solution))
}

pub fn project_full(s_hat: &HermitianMatrix, config: &ProjectionConfig) -> Result<Projection> {
    config.validate()?;
    let s = normalize(s_hat, config.sigma2)?;
    let eig = eig_hermitian(&s)?;
    project_decomposed(eig, config)
}

/// Projection from a precomputed decomposition of the normalised matrix `S`.
pub fn project_decomposed(eig: SpectralDecomposition, config: &ProjectionConfig) -> Result<Projection> {
    config.validate()?;
    if eig.n() == 0 {
        return Err(Error::EmptyData);
    }
    let solution = solve_u(&eig.values, config.kappa, &config.norm, &config.tolerances)?;
    let estimate = if solution.branch == Branch::DegenerateZero {
        HermitianMatrix::identity(eig.n()).scaled(config.sigma2)
    } else {
        eig.reconstruct_with(&solution.lambda_star).scaled(config.sigma2)
    };
    Ok(Projection { estimate, solution, decomposition: eig })
}
