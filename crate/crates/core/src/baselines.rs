//! Reference estimators: SCM, normalised SCM and the Tyler-type fixed-point estimator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cholesky, HermitianMatrix};
use crate::tolerances::DEGENERATE_DATUM;
use crate::{CMatrix, CVector};

/// Sample covariance. Singular when `K < n`; weight solves then use the pseudo-inverse.
pub fn scm(data: &[CVector]) -> Result<HermitianMatrix> {
    crate::linalg::sample_covariance(data)
}

fn dimension(data: &[CVector]) -> Result<usize> {
    let n = data.first().ok_or(Error::EmptyData)?.len();
    if let Some(r) = data.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: r.len() });
    }
    Ok(n)
}

fn check_nondegenerate(data: &[CVector]) -> Result<()> {
    for (index, r) in data.iter().enumerate() {
        let norm2 = r.norm_squared();
        if !(norm2 >= DEGENERATE_DATUM) {
            return Err(Error::DegenerateDatum { index, norm2 });
        }
    }
    Ok(())
}

/// `sum_i c_i r_i r_i^H`, lower triangle accumulated in index order.
fn weighted_outer_sum(data: &[CVector], weights: impl Iterator<Item = f64>) -> HermitianMatrix {
    let n = data[0].len();
    let mut acc = CMatrix::zeros(n, n);
    for (r, c) in data.iter().zip(weights) {
        for j in 0..n {
            let rj = r[j].conj() * c;
            for i in j..n {
                acc[(i, j)] += r[i] * rj;
            }
        }
    }
    HermitianMatrix::from_lower_fn(n, |i, j| acc[(i, j)])
}

/// `(n/K) sum_i r_i r_i^H / (r_i^H r_i)`; trace `n` by construction.
pub fn nscm(data: &[CVector]) -> Result<HermitianMatrix> {
    let n = dimension(data)?;
    check_nondegenerate(data)?;
    let scale = n as f64 / data.len() as f64;
    Ok(weighted_outer_sum(data, data.iter().map(|r| scale / r.norm_squared())))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FpeConfig {
    pub max_iter: usize,
    pub rel_tol: f64,
}

impl Default for FpeConfig {
    fn default() -> Self {
        Self { max_iter: 100, rel_tol: 1e-8 }
    }
}

#[derive(Debug, Clone)]
pub struct FpeOutcome {
    pub estimate: HermitianMatrix,
    /// Number of fixed-point map evaluations.
    pub iterations: usize,
    /// `||T(M_k) - M_k||_F / ||M_k||_F` for each evaluated iterate.
    pub residuals: Vec<f64>,
}

/// Fixed-point map `T(M) = (n/K) sum_i r_i r_i^H / (r_i^H M^{-1} r_i)`.
fn fixed_point_map(data: &[CVector], m: &HermitianMatrix) -> Result<HermitianMatrix> {
    let n = m.n();
    let chol = cholesky(m)?;
    let l = chol.l_dirty();
    let scale = n as f64 / data.len() as f64;
    let mut weights = Vec::with_capacity(data.len());
    for r in data {
        let y = l.solve_lower_triangular(r).ok_or(Error::Singular)?;
        let q = y.norm_squared();
        if !(q > 0.0) || !q.is_finite() {
            return Err(Error::Singular);
        }
        weights.push(scale / q);
    }
    Ok(weighted_outer_sum(data, weights.into_iter()))
}

/// Fixed-point estimator normalised to trace `n`, started from [`nscm`].
pub fn fpe(data: &[CVector], config: &FpeConfig) -> Result<HermitianMatrix> {
    fpe_detailed(data, config).map(|o| o.estimate)
}

pub fn fpe_detailed(data: &[CVector], config: &FpeConfig) -> Result<FpeOutcome> {
    if config.max_iter == 0 || !(config.rel_tol > 0.0) {
        return Err(Error::InvalidParameter("fpe needs max_iter >= 1 and rel_tol > 0".into()));
    }
    let n = dimension(data)?;
    if data.len() < n {
        return Err(Error::InsufficientSupport { k: data.len(), n });
    }
    let mut m = nscm(data)?;
    let mut residuals = Vec::new();
    for it in 1..=config.max_iter {
        let t = fixed_point_map(data, &m)?;
        let residual = t.distance(&m) / m.frobenius_norm();
        residuals.push(residual);
        if residual <= config.rel_tol {
            return Ok(FpeOutcome { estimate: m, iterations: it, residuals });
        }
        let tr = t.trace();
        m = t.scaled(n as f64 / tr);
    }
    Err(Error::NoConvergence(config.max_iter))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eig_hermitian;
    use crate::Complex64;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn v(x: &[(f64, f64)]) -> CVector {
        CVector::from_iterator(x.len(), x.iter().map(|&(a, b)| c(a, b)))
    }

    fn random_data(n: usize, k: usize, seed: u64) -> Vec<CVector> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..k)
            .map(|_| CVector::from_fn(n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))))
            .collect()
    }

    #[test]
    fn nscm_examples() {
        let m = nscm(&[v(&[(1.0, 0.0), (0.0, 0.0)])]).unwrap();
        assert!(m.distance(&HermitianMatrix::from_diagonal(&[2.0, 0.0])) < 1e-15);
        let m = nscm(&[v(&[(1.0, 0.0), (0.0, 0.0)]), v(&[(0.0, 0.0), (0.0, 1.0)])]).unwrap();
        assert!(m.distance(&HermitianMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn nscm_is_scale_invariant() {
        let data = random_data(5, 9, 1);
        let a = nscm(&data).unwrap();
        let scaled: Vec<CVector> = data.iter().enumerate().map(|(i, r)| r * c(10f64.powi(i as i32 - 4), 0.0)).collect();
        let b = nscm(&scaled).unwrap();
        assert!(a.distance(&b) < 1e-10 * a.frobenius_norm());
        assert!((a.trace() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn nscm_rejects_zero_datum() {
        let data = vec![v(&[(1.0, 0.0)]), v(&[(0.0, 0.0)])];
        assert!(matches!(nscm(&data), Err(Error::DegenerateDatum { index: 1, .. })));
        assert!(matches!(nscm(&[]), Err(Error::EmptyData)));
    }

    #[test]
    fn fpe_one_dimensional() {
        let data = random_data(1, 7, 3);
        let m = fpe(&data, &FpeConfig::default()).unwrap();
        assert!((m.get(0, 0).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fpe_satisfies_fixed_point_and_trace() {
        let data = random_data(4, 40, 11);
        let cfg = FpeConfig::default();
        let out = fpe_detailed(&data, &cfg).unwrap();
        let t = fixed_point_map(&data, &out.estimate).unwrap();
        assert!(t.distance(&out.estimate) <= cfg.rel_tol * out.estimate.frobenius_norm());
        assert!((out.estimate.trace() - 4.0).abs() < 1e-10);
        assert!(out.residuals.last().unwrap() <= &out.residuals[0]);
    }

    #[test]
    fn fpe_is_scale_invariant() {
        let data = random_data(3, 20, 17);
        let cfg = FpeConfig { max_iter: 500, rel_tol: 1e-12 };
        let a = fpe(&data, &cfg).unwrap();
        let scaled: Vec<CVector> = data.iter().enumerate().map(|(i, r)| r * c(0.1 + i as f64, 0.0)).collect();
        let b = fpe(&scaled, &cfg).unwrap();
        assert!(a.distance(&b) < 1e-10 * a.frobenius_norm());
    }

    #[test]
    fn fpe_errors() {
        let data = random_data(4, 3, 2);
        assert!(matches!(fpe(&data, &FpeConfig::default()), Err(Error::InsufficientSupport { k: 3, n: 4 })));
        let data = random_data(4, 40, 2);
        let cfg = FpeConfig { max_iter: 1, rel_tol: 1e-15 };
        assert!(matches!(fpe(&data, &cfg), Err(Error::NoConvergence(1))));
    }

    #[test]
    fn scm_full_support_is_positive_definite() {
        let data = random_data(6, 6, 8);
        let eig = eig_hermitian(&scm(&data).unwrap()).unwrap();
        assert!(*eig.values.last().unwrap() > 0.0);
    }
}
