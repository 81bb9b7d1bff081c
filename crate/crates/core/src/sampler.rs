//! Seeded random instances for every hypothesis class.
//!
//! The stream is xoshiro256++ seeded through SplitMix64 (the reference
//! seeding of its authors). Uniform reals take the top 53 bits of a draw,
//! Gaussians use Box-Muller with both outputs consumed in order. Reference
//! output for seed 42, first four `next_u64` draws:
//!
//! ```text
//! 0xd0764d4f4476689f 0x519e4174576f3791 0xfbe07cfb0c24ed8c 0xb37d9f600cd835b8
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;
use rand_core::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{psd_margin, Hermitian, Matrix};
use crate::repfun::Interval;

/// Per-trial stream seed, independent of execution order.
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    let mut z = seed ^ trial.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn default_margin() -> f64 {
    1e-2
}

fn default_scale() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub n: usize,
    pub seed: u64,
    /// Gap kept between sampled spectra and interval endpoints.
    #[serde(rename = "margin", default = "default_margin")]
    pub spectrum_margin: f64,
    /// Norm scale of sampled directions `B`.
    #[serde(default = "default_scale")]
    pub scale: f64,
}

impl SampleConfig {
    pub fn new(n: usize, seed: u64) -> Self {
        Self { n, seed, spectrum_margin: default_margin(), scale: default_scale() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Constraint { field: "n".into(), message: "dimension must be >= 1".into() });
        }
        if !(self.spectrum_margin >= 1e-4 && self.spectrum_margin < 0.5) {
            return Err(Error::Constraint {
                field: "margin".into(),
                message: format!("must lie in [1e-4, 0.5), got {}", self.spectrum_margin),
            });
        }
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(Error::Constraint { field: "scale".into(), message: "must be > 0".into() });
        }
        Ok(())
    }

    /// Same configuration, stream re-seeded for trial `t`.
    pub fn for_trial(&self, t: u64) -> Self {
        Self { seed: trial_seed(self.seed, t), ..self.clone() }
    }
}

/// Seeded source of matrices; every draw advances one stream.
pub struct Sampler {
    rng: Xoshiro256PlusPlus,
    cfg: SampleConfig,
}

impl Sampler {
    pub fn new(cfg: &SampleConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self { rng: Xoshiro256PlusPlus::seed_from_u64(cfg.seed), cfg: cfg.clone() })
    }

    pub fn config(&self) -> &SampleConfig {
        &self.cfg
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn log_uniform(&mut self, lo: f64, hi: f64) -> f64 {
        (lo.ln() + (hi.ln() - lo.ln()) * self.uniform()).exp()
    }

    /// Standard normal pair by Box-Muller.
    pub fn normal_pair(&mut self) -> (f64, f64) {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        (r * (2.0 * PI * u2).cos(), r * (2.0 * PI * u2).sin())
    }

    pub fn normal(&mut self) -> f64 {
        self.normal_pair().0
    }

    /// Complex Gaussian matrix with i.i.d. entries `N(0,1/2) + i N(0,1/2)`.
    pub fn ginibre(&mut self, n: usize) -> Matrix<f64> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Matrix::from_fn(n, |_, _| {
            let (x, y) = self.normal_pair();
            Complex64::new(s * x, s * y)
        })
    }

    /// Haar unitary: Gram-Schmidt on Ginibre columns (phases of `R` absorbed).
    pub fn haar_unitary(&mut self, n: usize) -> Matrix<f64> {
        let g = self.ginibre(n);
        let mut q = Matrix::zeros(n);
        for j in 0..n {
            let mut v: Vec<Complex64> = (0..n).map(|i| g[(i, j)]).collect();
            for _pass in 0..2 {
                for k in 0..j {
                    let dot: Complex64 = (0..n).map(|i| q[(i, k)].conj() * v[i]).sum();
                    for (i, vi) in v.iter_mut().enumerate() {
                        *vi -= dot * q[(i, k)];
                    }
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for (i, vi) in v.iter().enumerate() {
                q[(i, j)] = vi / norm;
            }
        }
        q
    }

    fn conjugate_diag(&mut self, values: &[f64]) -> Hermitian<f64> {
        let u = self.haar_unitary(values.len());
        crate::matcore::spectral_map(&u, values)
    }

    /// `U diag(lambda) U*` with spectrum kept `margin` inside `interval`.
    pub fn hermitian_in(&mut self, interval: &Interval) -> Result<Hermitian<f64>> {
        let m = self.cfg.spectrum_margin;
        let n = self.cfg.n;
        let Interval { a, b } = *interval;
        let values: Vec<f64> = match (a.is_finite(), b.is_finite()) {
            (true, true) => {
                if !(m < (b - a) / 2.0) {
                    return Err(Error::Sampler(format!("margin {m} too large for {interval}")));
                }
                (0..n).map(|_| self.uniform_in(a + m, b - m)).collect()
            }
            (true, false) => (0..n).map(|_| a + self.log_uniform(m, 1.0 / m)).collect(),
            (false, true) => (0..n).map(|_| b - self.log_uniform(m, 1.0 / m)).collect(),
            (false, false) => (0..n).map(|_| self.uniform_in(-1.0, 1.0)).collect(),
        };
        let h = self.conjugate_diag(&values);
        let ev = crate::matcore::hermitian_eigenvalues(&h)?;
        if ev.iter().any(|&v| !interval.contains(v)) {
            return Err(Error::Sampler(format!("sampled spectrum left {interval}")));
        }
        Ok(h)
    }

    /// `G* G` scaled to Frobenius norm `scale`.
    pub fn psd(&mut self) -> Hermitian<f64> {
        let g = self.ginibre(self.cfg.n);
        let p = Hermitian::symmetrize(&g.adjoint().matmul(&g));
        let nrm = p.norm_fro();
        p.scale(self.cfg.scale / nrm)
    }

    /// `psd + margin I`.
    pub fn pd(&mut self) -> Hermitian<f64> {
        let m = self.cfg.spectrum_margin;
        self.psd().add_identity(m)
    }

    /// `(G + G*)/2` scaled to Frobenius norm `scale`.
    pub fn hermitian(&mut self) -> Hermitian<f64> {
        let g = self.ginibre(self.cfg.n);
        let h = Hermitian::symmetrize(&g);
        let nrm = h.norm_fro();
        h.scale(self.cfg.scale / nrm)
    }

    /// Element of the sector cone `V_{p pi} = {Im X > 0, Im(e^{-i p pi} X) < 0}`.
    pub fn sector(&mut self, p: f64) -> Result<Matrix<f64>> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::Constraint { field: "p".into(), message: format!("need 0 < p <= 1, got {p}") });
        }
        let n = self.cfg.n;
        let u = self.haar_unitary(n);
        let diag: Vec<Complex64> = (0..n)
            .map(|_| {
                let theta = self.uniform_in(0.05 * p * PI, 0.95 * p * PI);
                let w = self.log_uniform(0.1, 10.0);
                Complex64::from_polar(w, theta)
            })
            .collect();
        let normal = u.matmul(&Matrix::from_diag(&diag)).matmul(&u.adjoint());
        let mut eps = 0.1 * self.cfg.scale;
        for _ in 0..100 {
            let e = self.ginibre(n);
            let mut x = normal.clone();
            x.axpy(Complex64::new(eps / e.norm_fro(), 0.0), &e);
            let (m1, m2) = sector_margins(&x, p)?;
            if m1 > 0.0 && m2 > 0.0 {
                return Ok(x);
            }
            eps *= 0.5;
        }
        Err(Error::Sampler("sector rejection cap exceeded".into()))
    }
}

/// `(psd_margin(Im X), psd_margin(-Im(e^{-i p pi} X)))`.
pub fn sector_margins(x: &Matrix<f64>, p: f64) -> Result<(f64, f64)> {
    let (_, im) = x.re_im_parts();
    let rot = x.scale(Complex64::from_polar(1.0, -p * PI));
    let (_, im_rot) = rot.re_im_parts();
    Ok((psd_margin(&im)?, psd_margin(&im_rot.neg())?))
}

pub fn rand_hermitian_in(cfg: &SampleConfig, interval: &Interval) -> Result<Hermitian<f64>> {
    Sampler::new(cfg)?.hermitian_in(interval)
}

pub fn rand_psd(cfg: &SampleConfig) -> Result<Hermitian<f64>> {
    Ok(Sampler::new(cfg)?.psd())
}

pub fn rand_pd(cfg: &SampleConfig) -> Result<Hermitian<f64>> {
    Ok(Sampler::new(cfg)?.pd())
}

pub fn rand_hermitian(cfg: &SampleConfig) -> Result<Hermitian<f64>> {
    Ok(Sampler::new(cfg)?.hermitian())
}

pub fn rand_sector(cfg: &SampleConfig, p: f64) -> Result<Matrix<f64>> {
    Sampler::new(cfg)?.sector(p)
}
