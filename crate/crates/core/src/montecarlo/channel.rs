use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{DmtError, Result};
use crate::model::{AntennaConfig, ScalingExponents};

pub type CMatrix = DMatrix<Complex64>;

/// One draw of the three channel matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// `N1 x M1`, transmitter 1 to receiver 1.
    pub h11: CMatrix,
    /// `N1 x M2`, transmitter 2 to receiver 1 (interference).
    pub h21: CMatrix,
    /// `N2 x M2`, transmitter 2 to receiver 2.
    pub h22: CMatrix,
}

/// A CN(0, 1) sample: independent real and imaginary parts of variance 1/2.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

impl ChannelRealization {
    /// Draws i.i.d. Rayleigh matrices; entries are filled column by column.
    pub fn sample<R: Rng + ?Sized>(cfg: &AntennaConfig, rng: &mut R) -> Self {
        Self {
            h11: gaussian_matrix(cfg.n1, cfg.m1, rng),
            h21: gaussian_matrix(cfg.n1, cfg.m2, rng),
            h22: gaussian_matrix(cfg.n2, cfg.m2, rng),
        }
    }

    pub fn zeros(cfg: &AntennaConfig) -> Self {
        Self {
            h11: CMatrix::zeros(cfg.n1, cfg.m1),
            h21: CMatrix::zeros(cfg.n1, cfg.m2),
            h22: CMatrix::zeros(cfg.n2, cfg.m2),
        }
    }

    /// Builds a realization from explicit matrices, checking their shapes.
    pub fn from_matrices(
        cfg: &AntennaConfig,
        h11: CMatrix,
        h21: CMatrix,
        h22: CMatrix,
    ) -> Result<Self> {
        let want = [
            ("H11", h11.shape(), (cfg.n1, cfg.m1)),
            ("H21", h21.shape(), (cfg.n1, cfg.m2)),
            ("H22", h22.shape(), (cfg.n2, cfg.m2)),
        ];
        for (name, got, expected) in want {
            if got != expected {
                return Err(DmtError::InvalidConfig(format!(
                    "{name} is {got:?}, expected {expected:?} for {cfg}"
                )));
            }
        }
        let real = Self { h11, h21, h22 };
        if !real.is_finite() {
            return Err(DmtError::InvalidConfig(
                "channel entries must be finite".into(),
            ));
        }
        Ok(real)
    }

    pub fn is_finite(&self) -> bool {
        [&self.h11, &self.h21, &self.h22]
            .iter()
            .all(|m| m.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
    }

    /// `W3 = H21 H21†`.
    pub fn w3(&self) -> CMatrix {
        &self.h21 * self.h21.adjoint()
    }
}

/// Nominal SNR in dB and the derived link gains.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnrPoint {
    pub rho_db: f64,
}

/// Per-link gains `rho^alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGains {
    pub rho: f64,
    pub rho11: f64,
    pub rho21: f64,
    pub rho22: f64,
}

impl SnrPoint {
    pub fn new(rho_db: f64) -> Result<Self> {
        if !rho_db.is_finite() {
            return Err(DmtError::InvalidConfig(format!(
                "SNR must be finite, got {rho_db} dB"
            )));
        }
        Ok(Self { rho_db })
    }

    /// Linear nominal SNR.
    pub fn rho(&self) -> f64 {
        10f64.powf(self.rho_db / 10.0)
    }

    pub fn gains(&self, alphas: &ScalingExponents) -> LinkGains {
        let rho = self.rho();
        LinkGains {
            rho,
            rho11: rho.powf(alphas.alpha11),
            rho21: rho.powf(alphas.alpha21),
            rho22: rho.powf(alphas.alpha22),
        }
    }
}
