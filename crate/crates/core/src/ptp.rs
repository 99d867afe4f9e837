//! Point-to-point MIMO tradeoff curves.
//!
//! `d_{M,N}(r)` is the piecewise-linear curve through `(k, (M-k)(N-k))` for
//! `k = 0..=min(M, N)`. Every closed form in this crate is assembled from it,
//! usually in the scaled form `alpha * d_{M,N}(r / alpha)`.

use serde::{Deserialize, Serialize};

use crate::error::{DmtError, Result};

/// Grid arithmetic (`0.1 * k`, `r / alpha * alpha`) can overshoot a domain
/// end by a few ulps. Overshoots up to this size are snapped back.
pub(crate) const DOMAIN_SLACK: f64 = 1e-12;

pub(crate) fn check_range(what: &'static str, value: f64, lo: f64, hi: f64) -> Result<f64> {
    let err = DmtError::Domain {
        what,
        value,
        lo,
        hi,
    };
    if !value.is_finite() {
        return Err(err);
    }
    if value < lo - DOMAIN_SLACK || value > hi + DOMAIN_SLACK {
        return Err(err);
    }
    Ok(value.clamp(lo, hi))
}

/// The optimal point-to-point tradeoff of an `M x N` channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PtpDmt {
    pub tx_antennas: usize,
    pub rx_antennas: usize,
    /// `(k, (M-k)(N-k))` for `k = 0..=min(M, N)`.
    pub breakpoints: Vec<(f64, f64)>,
}

impl PtpDmt {
    pub fn new(tx_antennas: usize, rx_antennas: usize) -> Result<Self> {
        if tx_antennas == 0 || rx_antennas == 0 {
            return Err(DmtError::InvalidConfig(format!(
                "point-to-point link needs >= 1 antenna per side, got {tx_antennas}x{rx_antennas}"
            )));
        }
        let m = tx_antennas.min(rx_antennas);
        let breakpoints = (0..=m)
            .map(|k| (k as f64, ((tx_antennas - k) * (rx_antennas - k)) as f64))
            .collect();
        Ok(Self {
            tx_antennas,
            rx_antennas,
            breakpoints,
        })
    }

    /// Maximum multiplexing gain `min(M, N)`.
    pub fn max_gain(&self) -> f64 {
        self.tx_antennas.min(self.rx_antennas) as f64
    }

    /// Linear interpolation between breakpoints.
    pub fn eval(&self, r: f64) -> Result<f64> {
        let r = check_range("r", r, 0.0, self.max_gain())?;
        // first breakpoint strictly to the right of r
        let idx = self.breakpoints.partition_point(|&(k, _)| k <= r);
        if idx == self.breakpoints.len() {
            return Ok(self.breakpoints[idx - 1].1);
        }
        let (r0, d0) = self.breakpoints[idx - 1];
        let (r1, d1) = self.breakpoints[idx];
        Ok(d0 + (d1 - d0) * (r - r0) / (r1 - r0))
    }

    /// Samples the curve at every breakpoint.
    pub fn to_curve(&self) -> DmtCurve {
        DmtCurve {
            label: format!("d_{{{},{}}}", self.tx_antennas, self.rx_antennas),
            samples: self.breakpoints.clone(),
        }
    }
}

/// `d_{M,N}(r)`.
pub fn ptp_dmt(m: usize, n: usize, r: f64) -> Result<f64> {
    PtpDmt::new(m, n)?.eval(r)
}

/// `alpha * d_{M,N}(r / alpha)`, defined on `[0, min(M, N) * alpha]`.
pub fn scaled_ptp_dmt(m: usize, n: usize, alpha: f64, r: f64) -> Result<f64> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(DmtError::InvalidConfig(format!(
            "scaling exponent must be positive, got {alpha}"
        )));
    }
    let curve = PtpDmt::new(m, n)?;
    let r = check_range("r", r, 0.0, curve.max_gain() * alpha)?;
    Ok(alpha * curve.eval((r / alpha).min(curve.max_gain()))?)
}

/// Outage exponent of the single-user event of link `i`,
/// `alpha_ii * d_{M_i,N_i}(r_i / alpha_ii)`.
pub fn single_user_exponent(m: usize, n: usize, alpha_ii: f64, r_i: f64) -> Result<f64> {
    scaled_ptp_dmt(m, n, alpha_ii, r_i)
}

/// A sampled tradeoff curve, `d` as a function of `r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DmtCurve {
    pub label: String,
    pub samples: Vec<(f64, f64)>,
}

impl DmtCurve {
    /// Rejects samples whose `r` values are not strictly increasing.
    pub fn new(label: impl Into<String>, samples: Vec<(f64, f64)>) -> Result<Self> {
        if let Some(w) = samples.windows(2).find(|w| w[0].0 >= w[1].0) {
            return Err(DmtError::InvalidConfig(format!(
                "curve samples must have strictly increasing r, got {} then {}",
                w[0].0, w[1].0
            )));
        }
        Ok(Self {
            label: label.into(),
            samples,
        })
    }

    pub fn is_nonincreasing(&self, tol: f64) -> bool {
        self.samples.windows(2).all(|w| w[1].1 <= w[0].1 + tol)
    }
}
