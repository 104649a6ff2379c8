//! Closed-form scalar solver for the Frobenius norm.
//!
//! Minimises `G1(u) = sum_i h_i(u)^2` over `u >= 1/kappa`. When `d1 > kappa > 1`
//! the minimiser lies in `[1, d1]`, where `G1` is convex and continuously
//! differentiable, and an interior minimiser solves a linear stationarity equation
//! once the active pieces (`alpha`, `beta`) are known.

use super::shrinkage::{lambda_one, prepare_eigenvalues, Branch, ShrinkageSolution};
use crate::error::Result;
use crate::tolerances::Tolerances;

const BISECTION_MAX_ITER: usize = 200;

/// `G1(u) = sum_i (lambda_i(u) - d_i)^2`.
pub fn g1(d: &[f64], u: f64, kappa: f64) -> f64 {
    d.iter().map(|&di| (lambda_one(di, u, kappa) - di).powi(2)).sum()
}

/// Derivative of `G1` for `u >= 1`. At `u = 1` this is the right derivative.
pub fn g1_derivative(d: &[f64], u: f64, kappa: f64) -> f64 {
    d.iter()
        .map(|&di| {
            let r = lambda_one(di, u, kappa) - di;
            if r > 0.0 {
                2.0 * r
            } else if r < 0.0 {
                2.0 * kappa * r
            } else {
                0.0
            }
        })
        .sum()
}

fn euclidean(h: &[f64]) -> f64 {
    h.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Lowest minimiser of `G1`. The reported objective is `sqrt(G1(u_star))`.
pub fn solve_u_frobenius(d: &[f64], kappa: f64) -> Result<ShrinkageSolution> {
    let d = prepare_eigenvalues(d, kappa, &Tolerances::default())?;
    let (u, branch) = frobenius_u(&d, kappa);
    Ok(ShrinkageSolution::at(&d, kappa, u, branch, euclidean))
}

pub(crate) fn frobenius_u(d: &[f64], kappa: f64) -> (f64, Branch) {
    let n = d.len();
    let d1 = d[0];
    let dn = d[n - 1];
    if d1 == 0.0 {
        return (1.0 / kappa, Branch::DegenerateZero);
    }
    if kappa == 1.0 {
        let mean = d.iter().sum::<f64>() / n as f64;
        return (mean.max(1.0), Branch::KappaOne);
    }
    if d1 <= kappa {
        return (d1.max(1.0) / kappa, Branch::FrobeniusUnconstrained);
    }
    if g1_derivative(d, 1.0, kappa) >= 0.0 {
        return (1.0, Branch::FrobeniusLowerEndpoint);
    }
    // with all d_i equal G1 vanishes on [d1/kappa, d1]; the next case returns its left end
    if d1 > dn && g1_derivative(d, d1, kappa) <= 0.0 {
        return (d1, Branch::FrobeniusUpperEndpoint);
    }
    if d1 / kappa <= dn {
        return (d1 / kappa, Branch::FrobeniusIdentity);
    }
    match alpha_beta_sweep(d, kappa) {
        Some((u, alpha, beta)) => (u, Branch::FrobeniusInterior { alpha, beta }),
        None => (derivative_root(d, kappa, 1.0, d1 / kappa), Branch::FrobeniusBisection),
    }
}

/// Walks the pieces of `[1, d1/kappa]` from the top down. Indices are 0-based here:
/// `v = [d_0, .., d_{nb-1}, 1]` holds the eigenvalues above one followed by one,
/// `a` is the first index with `v[a] < u`, and `b` the last with `v[b] / kappa > u`.
/// Returns `u` with the 1-based `(alpha, beta)` on success.
fn alpha_beta_sweep(d: &[f64], kappa: f64) -> Option<(f64, usize, usize)> {
    let n = d.len();
    let nb = d.iter().take_while(|&&x| x > 1.0).count();
    let v = |i: usize| if i < nb { d[i] } else { 1.0 };

    // suffix[i] = sum_{j >= i} d_j, prefix[i] = sum_{j < i} d_j
    let mut suffix = vec![0.0; n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] + d[i];
    }
    let mut prefix = vec![0.0; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + d[i];
    }

    let mut b = 0usize;
    let mut a = 1usize;
    while a <= nb && v(a) >= v(b) / kappa {
        a += 1;
    }
    while a <= nb && b < nb {
        let num = kappa * prefix[b + 1] + suffix[a];
        let den = (n - a) as f64 + (b + 1) as f64 * kappa * kappa;
        let u = num / den;
        let in_alpha = v(a) < u && u <= v(a - 1);
        let in_beta = v(b + 1) / kappa <= u && u < v(b) / kappa;
        if in_alpha && in_beta {
            return Some((u, a + 1, b + 1));
        }
        if v(b + 1) / kappa < v(a) {
            a += 1;
        } else {
            b += 1;
        }
    }
    None
}

/// Root of the nondecreasing `G1'` on `[lo, hi]` with `G1'(lo) < 0 < G1'(hi)`.
fn derivative_root(d: &[f64], kappa: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..BISECTION_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g1_derivative(d, mid, kappa) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
