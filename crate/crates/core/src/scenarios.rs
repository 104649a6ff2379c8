//! Ground-truth interference models, steering vectors and secondary-data samplers.
//!
//! All powers are given in dB and converted as `10^(dB/10)`.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{condition_number, psd_factor, HermitianMatrix};
use crate::{db_to_linear, CMatrix, CVector, Complex64};

/// How `sinc` is read in the wideband jammer model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SincConvention {
    /// `sin(x) / x`
    #[default]
    Unnormalized,
    /// `sin(pi x) / (pi x)`
    Normalized,
}

pub const DEFAULT_SINC: SincConvention = SincConvention::Unnormalized;

impl SincConvention {
    pub fn eval(self, x: f64) -> f64 {
        let x = match self {
            SincConvention::Unnormalized => x,
            SincConvention::Normalized => PI * x,
        };
        if x == 0.0 {
            1.0
        } else {
            x.sin() / x
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jammer {
    pub power_db: f64,
    pub angle_deg: f64,
    pub fractional_bandwidth: f64,
}

/// Uniform linear array at half-wavelength spacing with wideband jammers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialScenario {
    pub n: usize,
    pub jammers: Vec<Jammer>,
    pub noise_power_db: f64,
    #[serde(default)]
    pub sinc: SincConvention,
}

/// Pulse train with bimodal (sea + ground) clutter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DopplerScenario {
    pub n: usize,
    pub cnr_s_db: f64,
    pub cnr_g_db: f64,
    pub rho_s: f64,
    pub rho_g: f64,
    pub f_s: f64,
    pub noise_power_db: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum TextureModel {
    #[default]
    Gaussian,
    /// `r = n + sqrt(tau) x` with `tau ~ Gamma(shape 1/mu_tau, scale mu_tau)`.
    Compound { mu_tau: f64 },
}

/// Scenario as it appears in experiment configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(flatten)]
    pub kind: ScenarioKind,
    #[serde(default)]
    pub texture: TextureModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ScenarioKind {
    Spatial(SpatialScenario),
    Doppler(DopplerScenario),
}

/// `s_k = exp(j pi sin(theta) k)`.
pub fn steering_spatial(theta_deg: f64, n: usize) -> CVector {
    let phi = PI * theta_deg.to_radians().sin();
    CVector::from_fn(n, |k, _| Complex64::from_polar(1.0, phi * k as f64))
}

/// `s_k = exp(j 2 pi nu k)`.
pub fn steering_doppler(nu: f64, n: usize) -> CVector {
    CVector::from_fn(n, |k, _| Complex64::from_polar(1.0, 2.0 * PI * nu * k as f64))
}

/// Coloured part of the spatial model:
/// `sum_i sigma_i^2 sinc(B_f (n - m) phi_i / 2) exp(j (n - m) phi_i)`, `phi_i = pi sin(theta_i)`.
pub fn jammer_covariance(s: &SpatialScenario) -> HermitianMatrix {
    HermitianMatrix::from_lower_fn(s.n, |i, j| {
        let lag = i as f64 - j as f64;
        s.jammers.iter().fold(Complex64::new(0.0, 0.0), |acc, jam| {
            let phi = PI * jam.angle_deg.to_radians().sin();
            let amp = db_to_linear(jam.power_db) * s.sinc.eval(0.5 * jam.fractional_bandwidth * lag * phi);
            acc + Complex64::from_polar(amp, lag * phi)
        })
    })
}

/// Coloured part of the Doppler model:
/// `CNR_S rho_S^((n-m)^2) exp(j 2 pi (n-m) f_S) + CNR_G rho_G^|n-m|`.
pub fn clutter_covariance(s: &DopplerScenario) -> HermitianMatrix {
    let cnr_s = db_to_linear(s.cnr_s_db);
    let cnr_g = db_to_linear(s.cnr_g_db);
    HermitianMatrix::from_lower_fn(s.n, |i, j| {
        let lag = i as f64 - j as f64;
        let sea = Complex64::from_polar(cnr_s * s.rho_s.powf(lag * lag), 2.0 * PI * lag * s.f_s);
        sea + cnr_g * s.rho_g.powf(lag.abs())
    })
}

/// `colored + 10^(dB/10) I`.
pub fn total_covariance(colored: &HermitianMatrix, noise_power_db: f64) -> HermitianMatrix {
    colored.add_diagonal(db_to_linear(noise_power_db))
}

/// `lambda_max / lambda_min`.
pub fn true_kappa(m: &HermitianMatrix) -> Result<f64> {
    condition_number(m)
}

impl SpatialScenario {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Config("spatial scenario needs n >= 1".into()));
        }
        for j in &self.jammers {
            if !(j.fractional_bandwidth >= 0.0) {
                return Err(Error::Config("fractional_bandwidth must be >= 0".into()));
            }
            if !(j.angle_deg > -90.0 && j.angle_deg < 90.0) {
                return Err(Error::Config(format!("jammer angle {} outside (-90, 90)", j.angle_deg)));
            }
            if !j.power_db.is_finite() {
                return Err(Error::Config("jammer power must be finite".into()));
            }
        }
        if !self.noise_power_db.is_finite() {
            return Err(Error::Config("noise_power_db must be finite".into()));
        }
        Ok(())
    }
}

impl DopplerScenario {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Config("doppler scenario needs n >= 1".into()));
        }
        for (name, rho) in [("rho_s", self.rho_s), ("rho_g", self.rho_g)] {
            if !(0.0..1.0).contains(&rho) {
                return Err(Error::Config(format!("{name} = {rho} outside [0, 1)")));
            }
        }
        if !(-0.5..0.5).contains(&self.f_s) {
            return Err(Error::Config(format!("f_s = {} outside [-1/2, 1/2)", self.f_s)));
        }
        if ![self.cnr_s_db, self.cnr_g_db, self.noise_power_db].iter().all(|x| x.is_finite()) {
            return Err(Error::Config("powers must be finite".into()));
        }
        Ok(())
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            ScenarioKind::Spatial(s) => s.validate()?,
            ScenarioKind::Doppler(s) => s.validate()?,
        }
        if let TextureModel::Compound { mu_tau } = self.texture {
            if !(mu_tau > 0.0) || !mu_tau.is_finite() {
                return Err(Error::Config(format!("mu_tau must be positive, got {mu_tau}")));
            }
        }
        Ok(())
    }

    pub fn type_name(&self) -> &'static str {
        match self.kind {
            ScenarioKind::Spatial(_) => "spatial",
            ScenarioKind::Doppler(_) => "doppler",
        }
    }

    pub fn n(&self) -> usize {
        match &self.kind {
            ScenarioKind::Spatial(s) => s.n,
            ScenarioKind::Doppler(s) => s.n,
        }
    }

    pub fn noise_power_db(&self) -> f64 {
        match &self.kind {
            ScenarioKind::Spatial(s) => s.noise_power_db,
            ScenarioKind::Doppler(s) => s.noise_power_db,
        }
    }

    pub fn colored(&self) -> HermitianMatrix {
        match &self.kind {
            ScenarioKind::Spatial(s) => jammer_covariance(s),
            ScenarioKind::Doppler(s) => clutter_covariance(s),
        }
    }

    /// Interference-plus-noise covariance. The compound texture has unit mean, so
    /// this is also the covariance of compound data.
    pub fn covariance(&self) -> HermitianMatrix {
        total_covariance(&self.colored(), self.noise_power_db())
    }

    /// Steering vector at a grid value: an angle in degrees (spatial) or a normalised Doppler (doppler).
    pub fn steering(&self, x: f64) -> CVector {
        match &self.kind {
            ScenarioKind::Spatial(s) => steering_spatial(x, s.n),
            ScenarioKind::Doppler(s) => steering_doppler(x, s.n),
        }
    }

    pub fn sampler(&self) -> Result<Sampler> {
        self.validate()?;
        match self.texture {
            TextureModel::Gaussian => Ok(Sampler::Gaussian(GaussianSampler::new(&self.covariance())?)),
            TextureModel::Compound { mu_tau } => {
                Ok(Sampler::Compound(CompoundSampler::new(&self.colored(), self.noise_power_db(), mu_tau)?))
            }
        }
    }
}

/// Standard circular complex Gaussian vector: real and imaginary parts `N(0, 1/2)`.
fn circular_gaussian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CVector::from_fn(n, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(s * re, s * im)
    })
}

/// Draws `F z` with `F F^H = M`; the factor is computed once.
#[derive(Debug, Clone)]
pub struct GaussianSampler {
    factor: CMatrix,
}

impl GaussianSampler {
    pub fn new(m: &HermitianMatrix) -> Result<Self> {
        Ok(Self { factor: psd_factor(m)? })
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> CVector {
        &self.factor * circular_gaussian(self.factor.ncols(), rng)
    }

    pub fn sample<R: Rng + ?Sized>(&self, k: usize, rng: &mut R) -> Vec<CVector> {
        (0..k).map(|_| self.draw(rng)).collect()
    }
}

/// Draws `n + sqrt(tau) x` with `n ~ CN(0, sigma_a^2 I)`, `x ~ CN(0, M_colored)`.
#[derive(Debug, Clone)]
pub struct CompoundSampler {
    colored: GaussianSampler,
    noise_std: f64,
    texture: Gamma<f64>,
    fixed_tau: Option<f64>,
}

impl CompoundSampler {
    pub fn new(colored: &HermitianMatrix, noise_power_db: f64, mu_tau: f64) -> Result<Self> {
        if !(mu_tau > 0.0) || !mu_tau.is_finite() {
            return Err(Error::InvalidParameter(format!("mu_tau must be positive, got {mu_tau}")));
        }
        let texture = Gamma::new(1.0 / mu_tau, mu_tau)
            .map_err(|e| Error::InvalidParameter(format!("texture distribution: {e}")))?;
        Ok(Self {
            colored: GaussianSampler::new(colored)?,
            noise_std: db_to_linear(noise_power_db).sqrt(),
            texture,
            fixed_tau: None,
        })
    }

    /// Pins the texture to a constant (testing aid).
    pub fn with_fixed_texture(mut self, tau: f64) -> Self {
        self.fixed_tau = Some(tau);
        self
    }

    pub fn draw_texture<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.fixed_tau.unwrap_or_else(|| self.texture.sample(rng))
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> CVector {
        let tau = self.draw_texture(rng);
        let n = self.colored.factor.nrows();
        let noise = circular_gaussian(n, rng) * Complex64::from(self.noise_std);
        let x = self.colored.draw(rng);
        noise + x * Complex64::from(tau.sqrt())
    }

    pub fn sample<R: Rng + ?Sized>(&self, k: usize, rng: &mut R) -> Vec<CVector> {
        (0..k).map(|_| self.draw(rng)).collect()
    }
}

#[derive(Debug, Clone)]
pub enum Sampler {
    Gaussian(GaussianSampler),
    Compound(CompoundSampler),
}

impl Sampler {
    pub fn sample<R: Rng + ?Sized>(&self, k: usize, rng: &mut R) -> Vec<CVector> {
        match self {
            Sampler::Gaussian(s) => s.sample(k, rng),
            Sampler::Compound(s) => s.sample(k, rng),
        }
    }
}

/// `K` draws from `CN(0, M)`.
pub fn sample_gaussian<R: Rng + ?Sized>(m: &HermitianMatrix, k: usize, rng: &mut R) -> Result<Vec<CVector>> {
    Ok(GaussianSampler::new(m)?.sample(k, rng))
}

/// `K` compound-Gaussian draws with unit-mean Gamma texture.
pub fn sample_compound<R: Rng + ?Sized>(
    colored: &HermitianMatrix,
    noise_power_db: f64,
    mu_tau: f64,
    k: usize,
    rng: &mut R,
) -> Result<Vec<CVector>> {
    Ok(CompoundSampler::new(colored, noise_power_db, mu_tau)?.sample(k, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eig_hermitian, sample_covariance};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    fn reference_spatial(noise_db: f64) -> SpatialScenario {
        SpatialScenario {
            n: 8,
            jammers: vec![Jammer { power_db: 30.0, angle_deg: 20.0, fractional_bandwidth: 0.3 }],
            noise_power_db: noise_db,
            sinc: DEFAULT_SINC,
        }
    }

    fn reference_doppler() -> DopplerScenario {
        DopplerScenario { n: 8, cnr_s_db: 10.0, cnr_g_db: 25.0, rho_s: 0.8, rho_g: 0.95, f_s: 0.2, noise_power_db: 0.0 }
    }

    #[test]
    fn spatial_steering() {
        assert!(steering_spatial(0.0, 4).iter().all(|z| close(*z, Complex64::new(1.0, 0.0))));
        let s = steering_spatial(90.0, 2);
        assert!(close(s[1], Complex64::new(-1.0, 0.0)));
        let s = steering_spatial(30.0, 2);
        assert!(close(s[1], Complex64::new(0.0, 1.0)));
    }

    #[test]
    fn doppler_steering() {
        assert!(steering_doppler(0.0, 3).iter().all(|z| close(*z, Complex64::new(1.0, 0.0))));
        let s = steering_doppler(0.25, 4);
        let want = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)];
        for (z, (re, im)) in s.iter().zip(want) {
            assert!(close(*z, Complex64::new(re, im)));
        }
        assert!(close(steering_doppler(-0.5, 2)[1], Complex64::new(-1.0, 0.0)));
    }

    #[test]
    fn jammer_model() {
        let mut s = reference_spatial(0.0);
        s.jammers[0].angle_deg = 0.0;
        s.jammers[0].power_db = 10.0;
        let m = jammer_covariance(&s);
        assert!(m.as_matrix().iter().all(|z| close(*z, Complex64::new(10.0, 0.0))));

        let m = jammer_covariance(&reference_spatial(0.0));
        for i in 0..8 {
            assert!((m.get(i, i).re - 1000.0).abs() < 1e-9);
        }
        let eig = eig_hermitian(&m).unwrap();
        assert!(*eig.values.last().unwrap() >= -1e-9 * m.trace());
    }

    #[test]
    fn sinc_conventions() {
        assert_eq!(SincConvention::Unnormalized.eval(0.0), 1.0);
        assert!((SincConvention::Unnormalized.eval(PI)).abs() < 1e-15);
        assert!((SincConvention::Normalized.eval(1.0)).abs() < 1e-15);
        assert!((SincConvention::Normalized.eval(0.5) - 2.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn clutter_model() {
        let m = clutter_covariance(&reference_doppler());
        assert!((m.get(0, 0).re - (10.0 + 316.227_766_016_837_9)).abs() < 1e-9);
        let g = db_to_linear(25.0);
        let want = Complex64::from_polar(10.0 * 0.8, -2.0 * PI * 0.2) + g * 0.95;
        // (0, 1) has lag -1
        assert!((m.get(0, 1) - want).norm() < 1e-10);
        // Toeplitz
        for i in 1..8 {
            for j in 1..8 {
                assert!((m.get(i, j) - m.get(i - 1, j - 1)).norm() < 1e-10);
            }
        }
        let eig = eig_hermitian(&m).unwrap();
        assert!(*eig.values.last().unwrap() >= -1e-9 * m.trace());

        let white = DopplerScenario { rho_s: 0.0, rho_g: 0.0, ..reference_doppler() };
        let m = clutter_covariance(&white);
        let c = 10.0 + g;
        assert!(m.distance(&HermitianMatrix::identity(8).scaled(c)) < 1e-9);
    }

    #[test]
    fn totals_and_kappa() {
        assert!(total_covariance(&HermitianMatrix::zeros(3), 0.0).distance(&HermitianMatrix::identity(3)) < 1e-15);
        let m = total_covariance(&HermitianMatrix::identity(2), 10.0);
        assert!(m.distance(&HermitianMatrix::identity(2).scaled(11.0)) < 1e-12);
        assert!((true_kappa(&HermitianMatrix::from_diagonal(&[4.0, 1.0])).unwrap() - 4.0).abs() < 1e-14);
        assert!(true_kappa(&HermitianMatrix::from_diagonal(&[1.0, 0.0])).is_err());
    }

    #[test]
    fn gaussian_sampler_statistics() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let m = HermitianMatrix::from_diagonal(&[2.0, 1.0]);
        let data = sample_gaussian(&m, 100_000, &mut rng).unwrap();
        let s = sample_covariance(&data).unwrap();
        assert!(s.distance(&m) < 0.03 * m.frobenius_norm());
        let zero = sample_gaussian(&HermitianMatrix::zeros(2), 3, &mut rng).unwrap();
        assert!(zero.iter().all(|r| r.norm() == 0.0));
    }

    #[test]
    fn samplers_are_deterministic() {
        let m = jammer_covariance(&reference_spatial(0.0));
        let a = sample_gaussian(&m, 5, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = sample_gaussian(&m, 5, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
        let a = sample_compound(&m, 0.0, 2.0, 5, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = sample_compound(&m, 0.0, 2.0, 5, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn texture_has_unit_mean() {
        let s = CompoundSampler::new(&HermitianMatrix::identity(1), 0.0, 2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mean = (0..100_000).map(|_| s.draw_texture(&mut rng)).sum::<f64>() / 100_000.0;
        assert!((mean - 1.0).abs() < 0.02, "{mean}");
    }

    #[test]
    fn compound_covariance() {
        let colored = HermitianMatrix::from_diagonal(&[3.0, 1.0]);
        let want = total_covariance(&colored, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let data = sample_compound(&colored, 0.0, 2.0, 100_000, &mut rng).unwrap();
        let s = sample_covariance(&data).unwrap();
        assert!(s.distance(&want) < 0.05 * want.frobenius_norm(), "{:?}", s);

        let fixed = CompoundSampler::new(&colored, 0.0, 2.0).unwrap().with_fixed_texture(1.0);
        let s = sample_covariance(&fixed.sample(100_000, &mut rng)).unwrap();
        assert!(s.distance(&want) < 0.03 * want.frobenius_norm());
    }

    #[test]
    fn scenario_json_round_trip() {
        let text = r#"{"type": "doppler", "n": 8, "cnr_s_db": 10, "cnr_g_db": 25, "rho_s": 0.8,
            "rho_g": 0.95, "f_s": 0.2, "noise_power_db": 0, "texture": {"model": "compound", "mu_tau": 2}}"#;
        let s: Scenario = serde_json::from_str(text).unwrap();
        assert_eq!(s.kind, ScenarioKind::Doppler(reference_doppler()));
        assert_eq!(s.texture, TextureModel::Compound { mu_tau: 2.0 });
        let back: Scenario = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);

        let text = r#"{"type": "spatial", "n": 8, "noise_power_db": 10,
            "jammers": [{"power_db": 30, "angle_deg": 20, "fractional_bandwidth": 0.3}]}"#;
        let s: Scenario = serde_json::from_str(text).unwrap();
        assert_eq!(s.texture, TextureModel::Gaussian);
        assert_eq!(s.kind, ScenarioKind::Spatial(reference_spatial(10.0)));
        s.validate().unwrap();
    }

    #[test]
    fn validation() {
        let mut d = reference_doppler();
        d.rho_g = 1.0;
        assert!(d.validate().is_err());
        let mut s = reference_spatial(0.0);
        s.jammers[0].angle_deg = 90.0;
        assert!(s.validate().is_err());
        let sc = Scenario {
            kind: ScenarioKind::Doppler(reference_doppler()),
            texture: TextureModel::Compound { mu_tau: 0.0 },
        };
        assert!(sc.validate().is_err());
    }
}
