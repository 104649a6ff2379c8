//! The scalar reduction shared by every norm.
//!
//! With `d` the descending eigenvalues of the normalised sample covariance `S`,
//! the projection keeps the eigenvectors of `S` and replaces `d` with
//! `lambda(u)`, where `u >= 1/kappa` minimises `g(h(u))` for the norm's gauge `g`.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::tolerances::Tolerances;

/// Result of the scalar problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ShrinkageSolution {
    /// Lowest optimal auxiliary variable.
    pub u_star: f64,
    /// Shrunk eigenvalues of the normalised estimate, descending.
    pub lambda_star: Vec<f64>,
    /// Gauge of `|lambda_i - d_i|`, i.e. the norm distance between estimate and `S`.
    pub objective: f64,
    pub branch: Branch,
}

impl ShrinkageSolution {
    pub(crate) fn at(d: &[f64], kappa: f64, u: f64, branch: Branch, gauge: impl Fn(&[f64]) -> f64) -> Self {
        let lambda_star = lambda_unchecked(d, u, kappa);
        let h: Vec<f64> = lambda_star.iter().zip(d).map(|(l, di)| (l - di).abs()).collect();
        Self { u_star: u, objective: gauge(&h), lambda_star, branch }
    }
}

/// Which case of the closed-form solvers (or which generic method) produced `u_star`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// All-zero sample matrix; the estimate is the noise floor.
    DegenerateZero,
    /// `kappa = 1`: the feasible set is `{c I : c >= 1}`.
    KappaOne,
    /// Frobenius, `d1 <= kappa`: the condition number constraint is inactive.
    FrobeniusUnconstrained,
    /// Frobenius, non-negative derivative at `u = 1`.
    FrobeniusLowerEndpoint,
    /// Frobenius, non-positive derivative at `u = d1`.
    FrobeniusUpperEndpoint,
    /// Frobenius, `d1 / kappa <= dN`: the estimate equals `S`.
    FrobeniusIdentity,
    /// Frobenius stationary point found by the alpha/beta sweep (1-based indices).
    FrobeniusInterior {
        alpha: usize,
        beta: usize,
    },
    /// Frobenius stationary point found by derivative bisection after the sweep
    /// rejected every piece on round-off.
    FrobeniusBisection,
    Spectral(SpectralCase),
    Generic(GenericMethod),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralCase {
    /// `d1 <= 1`.
    Case1,
    /// `1 < d1 <= kappa`, `dN <= 1`.
    Case2,
    /// `1 < d1 <= kappa`, `dN > 1`: the estimate equals `S`.
    Case3,
    /// `d1 > kappa`, `dN <= 1`, `(d1 + dN - 1) / kappa <= 1`.
    Case4Low,
    /// `d1 > kappa`, `dN <= 1`, `(d1 + dN - 1) / kappa > 1`.
    Case4High,
    /// `d1 > kappa`, `1 < dN <= d1 / kappa`.
    Case5Crossing,
    /// `d1 > kappa`, `dN > d1 / kappa`: the estimate equals `S`.
    Case5Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenericMethod {
    /// Bisection on the sign of the exact one-sided derivative.
    DerivativeBisection,
    /// Golden-section search plus a leftward bisection onto the optimal plateau.
    GoldenSection,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Branch::DegenerateZero => f.write_str("degenerate-zero"),
            Branch::KappaOne => f.write_str("kappa-one"),
            Branch::FrobeniusUnconstrained => f.write_str("fne:d1<=kappa"),
            Branch::FrobeniusLowerEndpoint => f.write_str("fne:endpoint-1"),
            Branch::FrobeniusUpperEndpoint => f.write_str("fne:endpoint-d1"),
            Branch::FrobeniusIdentity => f.write_str("fne:case-3"),
            Branch::FrobeniusInterior { alpha, beta } => write!(f, "fne:interior(alpha={alpha},beta={beta})"),
            Branch::FrobeniusBisection => f.write_str("fne:interior-bisection"),
            Branch::Spectral(c) => {
                let name = match c {
                    SpectralCase::Case1 => "case-1",
                    SpectralCase::Case2 => "case-2",
                    SpectralCase::Case3 => "case-3",
                    SpectralCase::Case4Low => "case-4a",
                    SpectralCase::Case4High => "case-4b",
                    SpectralCase::Case5Crossing => "case-5a",
                    SpectralCase::Case5Identity => "case-5b",
                };
                write!(f, "sne:{name}")
            }
            Branch::Generic(GenericMethod::DerivativeBisection) => f.write_str("generic:derivative-bisection"),
            Branch::Generic(GenericMethod::GoldenSection) => f.write_str("generic:golden-section"),
        }
    }
}

impl Serialize for Branch {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn check_u(u: f64, kappa: f64) -> Result<()> {
    if !(kappa >= 1.0) || !kappa.is_finite() {
        return Err(Error::InvalidParameter(format!("kappa must be a finite value >= 1, got {kappa}")));
    }
    if !u.is_finite() || u < 1.0 / kappa {
        return Err(Error::InvalidParameter(format!("u = {u} is below 1/kappa = {}", 1.0 / kappa)));
    }
    Ok(())
}

#[inline]
pub(crate) fn lambda_one(d: f64, u: f64, kappa: f64) -> f64 {
    let floor = u.max(1.0);
    // kappa*u >= max(1, u) whenever u >= 1/kappa; the max only absorbs round-off at u = 1/kappa
    let cap = (kappa * u).max(floor);
    cap.min(d.max(floor))
}

pub(crate) fn lambda_unchecked(d: &[f64], u: f64, kappa: f64) -> Vec<f64> {
    d.iter().map(|&di| lambda_one(di, u, kappa)).collect()
}

/// Optimal eigenvalues for a fixed `u`: `min(kappa u, max(d_i, max(1, u)))`.
pub fn lambda_of_u(d: &[f64], u: f64, kappa: f64) -> Result<Vec<f64>> {
    check_u(u, kappa)?;
    Ok(lambda_unchecked(d, u, kappa))
}

/// `|lambda_i(u) - d_i|` from its piecewise closed form.
pub fn h_of_u(d_i: f64, u: f64, kappa: f64) -> Result<f64> {
    check_u(u, kappa)?;
    Ok(h_closed_form(d_i, u, kappa))
}

#[inline]
pub(crate) fn h_closed_form(d_i: f64, u: f64, kappa: f64) -> f64 {
    if d_i > 1.0 {
        if u < d_i / kappa {
            d_i - kappa * u
        } else if u < d_i {
            0.0
        } else {
            u - d_i
        }
    } else if u < 1.0 {
        1.0 - d_i
    } else {
        u - d_i
    }
}

/// Right derivative of `h_i` at `u`.
pub(crate) fn h_right_slope(d: f64, u: f64, kappa: f64) -> f64 {
    let floor = u.max(1.0);
    let floor_slope = if u >= 1.0 { 1.0 } else { 0.0 };
    let (mid, mid_slope) = if floor > d {
        (floor, floor_slope)
    } else if floor < d {
        (d, 0.0)
    } else {
        (d, floor_slope)
    };
    let cap = kappa * u;
    let (lambda, slope) = if cap < mid {
        (cap, kappa)
    } else if cap > mid {
        (mid, mid_slope)
    } else {
        (mid, kappa.min(mid_slope))
    };
    let r = lambda - d;
    if r < 0.0 {
        -slope
    } else if r > 0.0 {
        slope
    } else {
        slope.abs()
    }
}

/// Checks a descending eigenvalue vector and clamps round-off negatives to zero.
pub(crate) fn prepare_eigenvalues(d: &[f64], kappa: f64, tol: &Tolerances) -> Result<Vec<f64>> {
    if d.is_empty() {
        return Err(Error::EmptyData);
    }
    if !(kappa >= 1.0) || !kappa.is_finite() {
        return Err(Error::InvalidParameter(format!("kappa must be a finite value >= 1, got {kappa}")));
    }
    if d.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    if d.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::InvalidParameter("eigenvalues must be sorted in descending order".into()));
    }
    let floor = -tol.eig_clamp_rel * d[0].max(0.0);
    d.iter()
        .map(|&x| {
            if x >= 0.0 {
                Ok(x)
            } else if x >= floor {
                Ok(0.0)
            } else {
                Err(Error::Indefinite { min: x, norm: d[0].abs().max(x.abs()) })
            }
        })
        .collect()
}
