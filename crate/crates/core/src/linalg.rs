//! Dense complex Hermitian linear algebra.
//!
//! Everything downstream works on [`HermitianMatrix`]. Symmetry is enforced when a
//! matrix is built: only the lower triangle and the real part of the diagonal are
//! read, the upper triangle is mirrored from it.

use nalgebra::Cholesky;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerances::{EIG_MAX_ITER, HERMITIAN_INGEST_TOL, INDEFINITE_REL, PINV_REL_PER_DIM};
use crate::{CMatrix, CVector, Complex64};

/// Complex `n x n` Hermitian matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    inner: CMatrix,
}

impl HermitianMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { inner: CMatrix::zeros(n, n) }
    }

    pub fn identity(n: usize) -> Self {
        Self { inner: CMatrix::identity(n, n) }
    }

    /// Real diagonal matrix. Panics on non-finite entries.
    pub fn from_diagonal(diag: &[f64]) -> Self {
        assert!(diag.iter().all(|x| x.is_finite()), "non-finite diagonal entry");
        let n = diag.len();
        Self::from_lower_fn(n, |i, j| if i == j { Complex64::new(diag[i], 0.0) } else { Complex64::new(0.0, 0.0) })
    }

    /// Builds a matrix from its lower triangle. `f(i, j)` is called for `i >= j` only;
    /// the imaginary part of diagonal values is discarded.
    pub fn from_lower_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for j in 0..n {
            m[(j, j)] = Complex64::new(f(j, j).re, 0.0);
            for i in j + 1..n {
                let v = f(i, j);
                m[(i, j)] = v;
                m[(j, i)] = v.conj();
            }
        }
        Self { inner: m }
    }

    /// Validates symmetry within `tol * max(1, max|a_ij|)` and returns `(A + A^H) / 2`.
    pub fn from_dense(m: CMatrix, tol: f64) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), got: m.ncols() });
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let n = m.nrows();
        let scale = m.iter().fold(1.0f64, |acc, z| acc.max(z.norm()));
        let mut asym = 0.0f64;
        for i in 0..n {
            for j in 0..=i {
                asym = asym.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        if asym > tol * scale {
            return Err(Error::NotHermitian(asym));
        }
        Ok(Self::from_lower_fn(n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5))
    }

    /// Mirrors the lower triangle of a matrix that is Hermitian up to round-off.
    pub(crate) fn hermitize(m: CMatrix) -> Self {
        let n = m.nrows();
        Self::from_lower_fn(n, |i, j| m[(i, j)])
    }

    pub fn n(&self) -> usize {
        self.inner.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.inner
    }

    pub fn into_matrix(self) -> CMatrix {
        self.inner
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.inner[(i, j)]
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { inner: self.inner.map(|z| z * c) }
    }

    /// `A + c I`.
    pub fn add_diagonal(&self, c: f64) -> Self {
        let mut m = self.inner.clone();
        for i in 0..self.n() {
            m[(i, i)] += Complex64::new(c, 0.0);
        }
        Self { inner: m }
    }

    pub fn trace(&self) -> f64 {
        (0..self.n()).map(|i| self.inner[(i, i)].re).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.inner.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    /// Frobenius norm of `A - B`.
    pub fn distance(&self, other: &Self) -> f64 {
        (&self.inner - &other.inner).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius norm of the commutator `AB - BA`.
    pub fn commutator_norm(&self, other: &Self) -> f64 {
        let ab = &self.inner * &other.inner;
        let ba = &other.inner * &self.inner;
        (ab - ba).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn mul_vec(&self, v: &CVector) -> CVector {
        &self.inner * v
    }

    /// Real quadratic form `v^H A v`.
    pub fn quad_form(&self, v: &CVector) -> f64 {
        v.dotc(&(&self.inner * v)).re
    }

    pub fn to_json(&self) -> MatrixJson {
        MatrixJson::from(self)
    }
}

/// Wire format: `{"n": int, "re": [row-major reals], "im": [row-major reals]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<&HermitianMatrix> for MatrixJson {
    fn from(m: &HermitianMatrix) -> Self {
        let n = m.n();
        let mut re = Vec::with_capacity(n * n);
        let mut im = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                re.push(m.get(i, j).re);
                im.push(m.get(i, j).im);
            }
        }
        Self { n, re, im }
    }
}

impl TryFrom<MatrixJson> for HermitianMatrix {
    type Error = Error;

    fn try_from(j: MatrixJson) -> Result<Self> {
        let nn = j.n * j.n;
        if j.re.len() != nn {
            return Err(Error::DimensionMismatch { expected: nn, got: j.re.len() });
        }
        if j.im.len() != nn {
            return Err(Error::DimensionMismatch { expected: nn, got: j.im.len() });
        }
        let m = CMatrix::from_fn(j.n, j.n, |r, c| Complex64::new(j.re[r * j.n + c], j.im[r * j.n + c]));
        HermitianMatrix::from_dense(m, HERMITIAN_INGEST_TOL)
    }
}

/// Eigenvectors (columns of `vectors`) with eigenvalues sorted in descending order.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub vectors: CMatrix,
    pub values: Vec<f64>,
}

impl SpectralDecomposition {
    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        self.reconstruct_with(&self.values)
    }

    /// `U diag(values) U^H` with this decomposition's eigenvectors.
    pub fn reconstruct_with(&self, values: &[f64]) -> HermitianMatrix {
        assert_eq!(values.len(), self.n());
        let mut scaled = self.vectors.clone();
        for (k, &v) in values.iter().enumerate() {
            scaled.column_mut(k).scale_mut(v);
        }
        HermitianMatrix::hermitize(scaled * self.vectors.adjoint())
    }

    /// Largest eigenvalue magnitude.
    pub fn spectral_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }
}

/// `(1/K) sum r_i r_i^H`, accumulated in datum-index order.
pub fn sample_covariance(data: &[CVector]) -> Result<HermitianMatrix> {
    let first = data.first().ok_or(Error::EmptyData)?;
    let n = first.len();
    let mut acc = CMatrix::zeros(n, n);
    for r in data {
        if r.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: r.len() });
        }
        for j in 0..n {
            let rj = r[j].conj();
            for i in j..n {
                acc[(i, j)] += r[i] * rj;
            }
        }
    }
    let inv_k = 1.0 / data.len() as f64;
    Ok(HermitianMatrix::from_lower_fn(n, |i, j| acc[(i, j)] * inv_k))
}

/// Hermitian eigendecomposition with eigenvalues in descending order.
pub fn eig_hermitian(a: &HermitianMatrix) -> Result<SpectralDecomposition> {
    let n = a.n();
    if n == 0 {
        return Ok(SpectralDecomposition { vectors: CMatrix::zeros(0, 0), values: Vec::new() });
    }
    let eig = a.as_matrix().clone().try_symmetric_eigen(f64::EPSILON, EIG_MAX_ITER).ok_or(Error::EigenNoConvergence)?;
    if eig.eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(Error::EigenNoConvergence);
    }
    let mut order: Vec<usize> = (0..n).collect();
    // stable sort: equal eigenvalues keep solver order
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, c| eig.eigenvectors[(i, order[c])]);
    Ok(SpectralDecomposition { vectors, values })
}

/// Factor `F` with `F F^H = A` for a PSD matrix; negative round-off eigenvalues are clamped.
pub fn psd_factor(a: &HermitianMatrix) -> Result<CMatrix> {
    let eig = eig_hermitian(a)?;
    psd_factor_from(&eig)
}

pub(crate) fn psd_factor_from(eig: &SpectralDecomposition) -> Result<CMatrix> {
    let norm = eig.spectral_norm();
    if let Some(&min) = eig.values.last() {
        if min < -INDEFINITE_REL * norm {
            return Err(Error::Indefinite { min, norm });
        }
    }
    let mut f = eig.vectors.clone();
    for (k, &v) in eig.values.iter().enumerate() {
        f.column_mut(k).scale_mut(v.max(0.0).sqrt());
    }
    Ok(f)
}

fn pinv_cutoff(eig: &SpectralDecomposition) -> f64 {
    eig.n() as f64 * PINV_REL_PER_DIM * eig.spectral_norm()
}

/// Moore-Penrose pseudo-inverse; eigenvalues with magnitude below `n * 1e-12 * |d|_max` count as zero.
pub fn pseudo_inverse(m: &HermitianMatrix) -> Result<HermitianMatrix> {
    let eig = eig_hermitian(m)?;
    let cutoff = pinv_cutoff(&eig);
    let inv: Vec<f64> = eig.values.iter().map(|&d| if d.abs() > cutoff { 1.0 / d } else { 0.0 }).collect();
    Ok(eig.reconstruct_with(&inv))
}

/// Solves `M w = s` through a spectral decomposition of `M`, falling back to the
/// pseudo-inverse when `M` is singular. Prepared once, reused for many right-hand sides.
#[derive(Debug, Clone)]
pub struct WeightSolver {
    vectors: CMatrix,
    inv_values: Vec<f64>,
    singular: bool,
}

impl WeightSolver {
    pub fn new(m: &HermitianMatrix) -> Result<Self> {
        Ok(Self::from_decomposition(eig_hermitian(m)?))
    }

    pub fn from_decomposition(eig: SpectralDecomposition) -> Self {
        let cutoff = pinv_cutoff(&eig);
        let mut singular = false;
        let inv_values = eig
            .values
            .iter()
            .map(|&d| {
                if d.abs() > cutoff {
                    1.0 / d
                } else {
                    singular = true;
                    0.0
                }
            })
            .collect();
        Self { vectors: eig.vectors, inv_values, singular }
    }

    /// True when the pseudo-inverse path is in use.
    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn solve(&self, s: &CVector) -> CVector {
        let mut coeffs = self.vectors.ad_mul(s);
        for (c, &inv) in coeffs.iter_mut().zip(&self.inv_values) {
            *c *= inv;
        }
        &self.vectors * coeffs
    }
}

/// `w = M^{-1} s`, or `M^+ s` when `M` is singular.
pub fn solve_weight(m: &HermitianMatrix, s: &CVector) -> Result<CVector> {
    if s.len() != m.n() {
        return Err(Error::DimensionMismatch { expected: m.n(), got: s.len() });
    }
    Ok(WeightSolver::new(m)?.solve(s))
}

/// Cholesky factor of a positive definite matrix.
pub fn cholesky(m: &HermitianMatrix) -> Result<Cholesky<Complex64, nalgebra::Dyn>> {
    Cholesky::new(m.as_matrix().clone()).ok_or(Error::Singular)
}

/// `s^H M^{-1} s` for positive definite `M`.
pub fn inverse_quad_form(m: &HermitianMatrix, s: &CVector) -> Result<f64> {
    let chol = cholesky(m)?;
    let y = chol.l_dirty().solve_lower_triangular(s).ok_or(Error::Singular)?;
    Ok(y.norm_squared())
}

/// `lambda_max / lambda_min` of a positive definite matrix.
pub fn condition_number(m: &HermitianMatrix) -> Result<f64> {
    let eig = eig_hermitian(m)?;
    let max = eig.values[0];
    let min = *eig.values.last().unwrap();
    if !(min > 0.0) {
        return Err(Error::Singular);
    }
    Ok(max / min)
}
