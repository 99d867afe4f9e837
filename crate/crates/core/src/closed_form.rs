//! Closed-form sum exponents for the channel classes where the program has
//! an explicit solution, the composition rule, the No-CSIT optimality
//! thresholds, and a dispatcher that falls back to the LP elsewhere.

use serde::{Deserialize, Serialize};

use crate::error::{DmtError, Result};
use crate::exponents::{fcsit_sum_exponent, iml_sum_exponent};
use crate::model::{AntennaConfig, Csit, MultiplexingGainPair, ScalingExponents};
use crate::ptp::{check_range, ptp_dmt, single_user_exponent};

/// DMT of the channel from its three outage exponents: the smallest wins.
pub fn compose_dmt(d1: f64, d2: f64, ds: f64) -> f64 {
    d1.min(d2).min(ds)
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(DmtError::InvalidConfig("antenna count must be >= 1".into()));
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(DmtError::InvalidConfig(format!(
            "alpha must be positive and finite, got {alpha}"
        )));
    }
    Ok(())
}

fn check_at_least_one(alpha: f64) -> Result<()> {
    check_alpha(alpha)?;
    if alpha < 1.0 {
        return Err(DmtError::Hypothesis(format!(
            "alpha must be >= 1, got {alpha}"
        )));
    }
    Ok(())
}

fn check_asymmetric(m: usize, n1: usize, n2: usize) -> Result<()> {
    check_n(m)?;
    check_n(n1)?;
    check_n(n2)?;
    if m > n1.min(n2) {
        return Err(DmtError::Hypothesis(format!(
            "needs M <= min(N1, N2), got M={m}, N1={n1}, N2={n2}"
        )));
    }
    Ok(())
}

/// `(alpha - 1) d_{n,n}((r_s - n) / (alpha - 1))` for `n <= r_s <= n alpha`.
/// The argument is clamped to `n` so that `alpha` close to 1 cannot push it
/// past the end of the curve through rounding.
fn strong_interference_tail(n: usize, alpha: f64, r_s: f64) -> Result<f64> {
    let nf = n as f64;
    if alpha - 1.0 <= 0.0 || r_s >= nf * alpha {
        return Ok(0.0);
    }
    let arg = ((r_s - nf) / (alpha - 1.0)).clamp(0.0, nf);
    Ok((alpha - 1.0) * ptp_dmt(n, n, arg)?)
}

/// Largest `r_s` covered by [`fcsit_symmetric_sum`].
pub fn fcsit_symmetric_top(n: usize, alpha: f64) -> f64 {
    let nf = n as f64;
    if alpha <= 1.0 {
        nf * (2.0 - alpha)
    } else {
        nf * alpha
    }
}

/// F-CSIT sum exponent of the symmetric `(n, n, n, n)` channel with
/// `alpha11 = alpha22 = 1` and interference exponent `alpha`.
pub fn fcsit_symmetric_sum(n: usize, alpha: f64, r_s: f64) -> Result<f64> {
    check_n(n)?;
    check_alpha(alpha)?;
    let nf = n as f64;
    let r_s = check_range("r_s", r_s, 0.0, fcsit_symmetric_top(n, alpha))?;
    if alpha <= 1.0 {
        if r_s <= nf * alpha {
            let arg = (r_s / alpha).min(nf);
            return Ok(alpha * ptp_dmt(n, 3 * n, arg)? + 2.0 * nf * nf * (1.0 - alpha));
        }
        let width = 2.0 * (1.0 - alpha);
        let arg = ((r_s - nf * alpha) / width).clamp(0.0, nf);
        return Ok(width * ptp_dmt(n, n, arg)?);
    }
    if r_s <= nf {
        return Ok(ptp_dmt(n, 3 * n, r_s)? + nf * nf * (alpha - 1.0));
    }
    strong_interference_tail(n, alpha, r_s)
}

/// F-CSIT sum exponent of the symmetric channel with `alpha11 = alpha21 = 1`
/// and a stronger second link, `alpha22 = alpha >= 1`.
pub fn fcsit_femto_sum(n: usize, alpha: f64, r_s: f64) -> Result<f64> {
    check_n(n)?;
    check_at_least_one(alpha)?;
    let nf = n as f64;
    let r_s = check_range("r_s", r_s, 0.0, nf * alpha)?;
    if r_s <= nf {
        return Ok(ptp_dmt(n, 3 * n, r_s)? + nf * nf * (alpha - 1.0));
    }
    strong_interference_tail(n, alpha, r_s)
}

/// Largest `r_s` covered by the `(M, N1, M, N2)` closed forms.
pub fn asymmetric_top(m: usize, n1: usize) -> f64 {
    n1.min(2 * m) as f64
}

/// F-CSIT sum exponent of the `(M, N1, M, N2)` channel with `M <= min(N1, N2)`
/// and all exponents 1.
pub fn fcsit_asymmetric_sum(m: usize, n1: usize, n2: usize, r_s: f64) -> Result<f64> {
    check_asymmetric(m, n1, n2)?;
    let r_s = check_range("r_s", r_s, 0.0, asymmetric_top(m, n1))?;
    if r_s <= m as f64 {
        return Ok(ptp_dmt(m, m + n1 + n2, r_s)? + (m * (n1 - m)) as f64);
    }
    ptp_dmt(2 * m, n1, r_s)
}

/// IML sum exponent of the symmetric channel with `alpha11 = alpha22 = 1`
/// and `alpha21 = alpha >= 1`.
pub fn iml_symmetric_sum(n: usize, alpha: f64, r_s: f64) -> Result<f64> {
    check_n(n)?;
    check_at_least_one(alpha)?;
    let nf = n as f64;
    let r_s = check_range("r_s", r_s, 0.0, nf * alpha)?;
    if r_s <= nf {
        return Ok(ptp_dmt(n, 2 * n, r_s)? + nf * nf * (alpha - 1.0));
    }
    strong_interference_tail(n, alpha, r_s)
}

/// IML sum exponent of the `(M, N1, M, N2)` channel with `M <= min(N1, N2)`
/// and all exponents 1: `d_{2M,N1}(r_s)`.
pub fn iml_asymmetric_sum(m: usize, n1: usize, n2: usize, r_s: f64) -> Result<f64> {
    check_asymmetric(m, n1, n2)?;
    let r_s = check_range("r_s", r_s, 0.0, asymmetric_top(m, n1))?;
    ptp_dmt(2 * m, n1, r_s)
}

/// Interference exponent above which the symmetric `(n, n, n, n)` channel
/// loses nothing without CSIT: `1 + d_{n,n}(n/2) / n^2`.
pub fn nocsit_threshold_symmetric(n: usize) -> Result<f64> {
    check_n(n)?;
    let nf = n as f64;
    Ok(1.0 + ptp_dmt(n, n, nf / 2.0)? / (nf * nf))
}

/// Receiver-antenna threshold for the `(M, N1, M, N2)` channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AntennaThreshold {
    /// `M + d_{M,min(N1,N2)}(M/2) / M`.
    pub threshold: f64,
    /// `N1 >= threshold`: the No-CSIT DMT equals the F-CSIT DMT.
    pub met: bool,
}

pub fn nocsit_threshold_antennas(m: usize, n1: usize, n2: usize) -> Result<AntennaThreshold> {
    check_asymmetric(m, n1, n2)?;
    let mf = m as f64;
    let threshold = mf + ptp_dmt(m, n1.min(n2), mf / 2.0)? / mf;
    Ok(AntennaThreshold {
        threshold,
        met: n1 as f64 >= threshold,
    })
}

/// One point of a DMT curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DmtQuery {
    pub cfg: AntennaConfig,
    pub alphas: ScalingExponents,
    pub gains: MultiplexingGainPair,
    pub csit: Csit,
}

impl DmtQuery {
    pub fn validate(&self) -> Result<()> {
        self.cfg.validate()?;
        self.alphas.validate()?;
        let max1 = self.cfg.q1() as f64 * self.alphas.alpha11;
        let max2 = self.cfg.q2() as f64 * self.alphas.alpha22;
        check_range("r1", self.gains.r1, 0.0, max1)?;
        check_range("r2", self.gains.r2, 0.0, max2)?;
        Ok(())
    }
}

/// How the sum exponent was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SumSource {
    Symmetric,
    Femto,
    Asymmetric,
    ImlSymmetric,
    ImlAsymmetric,
    Lp,
    /// `r_s` beyond the range where the sum exponent is positive.
    Saturated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Dispatch {
    /// Closed form when the hypotheses hold, LP otherwise.
    #[default]
    Auto,
    ForceLp,
}

/// The three outage exponents at one gain pair and their minimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DmtPoint {
    pub d1: f64,
    pub d2: f64,
    pub ds: f64,
    pub value: f64,
    pub source: SumSource,
}

fn unit_alphas(a: &ScalingExponents) -> bool {
    a.alpha11 == 1.0 && a.alpha21 == 1.0 && a.alpha22 == 1.0
}

/// `(M, N1, M, N2)` with `M <= min(N1, N2)`.
fn asymmetric_shape(cfg: &AntennaConfig) -> Option<(usize, usize, usize)> {
    (cfg.m1 == cfg.m2 && cfg.m1 <= cfg.n1.min(cfg.n2)).then_some((cfg.m1, cfg.n1, cfg.n2))
}

/// Largest symmetric size for which the IML symmetric formula matches the
/// program. At `n = 3` with `alpha > 1` the program is lower for
/// `r_s > 2`, so larger channels go to the LP.
const IML_SYMMETRIC_MAX_N: usize = 2;

/// Picks a closed form, returning the source and the formula's domain top.
fn closed_form_sum(q: &DmtQuery, r_s: f64) -> Option<Result<(SumSource, f64)>> {
    let cfg = &q.cfg;
    let a = &q.alphas;
    let n = cfg.m1;
    let sat = |top: f64| r_s > top;
    let eval = |source: SumSource, top: f64, f: &dyn Fn(f64) -> Result<f64>| {
        Some(if sat(top) {
            Ok((SumSource::Saturated, 0.0))
        } else {
            f(r_s).map(|v| (source, v))
        })
    };
    match q.csit {
        Csit::Full => {
            if cfg.is_symmetric() && a.alpha11 == 1.0 && a.alpha22 == 1.0 {
                let top = fcsit_symmetric_top(n, a.alpha21);
                return eval(SumSource::Symmetric, top, &|r| {
                    fcsit_symmetric_sum(n, a.alpha21, r)
                });
            }
            if cfg.is_symmetric() && a.alpha11 == 1.0 && a.alpha21 == 1.0 && a.alpha22 >= 1.0 {
                let top = n as f64 * a.alpha22;
                return eval(SumSource::Femto, top, &|r| fcsit_femto_sum(n, a.alpha22, r));
            }
            if let (Some((m, n1, n2)), true) = (asymmetric_shape(cfg), unit_alphas(a)) {
                let top = asymmetric_top(m, n1);
                return eval(SumSource::Asymmetric, top, &|r| {
                    fcsit_asymmetric_sum(m, n1, n2, r)
                });
            }
            None
        }
        Csit::None => {
            if cfg.is_symmetric()
                && n <= IML_SYMMETRIC_MAX_N
                && a.alpha11 == 1.0
                && a.alpha22 == 1.0
                && a.alpha21 >= 1.0
            {
                let top = n as f64 * a.alpha21;
                return eval(SumSource::ImlSymmetric, top, &|r| {
                    iml_symmetric_sum(n, a.alpha21, r)
                });
            }
            if let (Some((m, n1, n2)), true) = (asymmetric_shape(cfg), unit_alphas(a)) {
                let top = asymmetric_top(m, n1);
                return eval(SumSource::ImlAsymmetric, top, &|r| {
                    iml_asymmetric_sum(m, n1, n2, r)
                });
            }
            None
        }
    }
}

/// Sum exponent for the query's CSIT mode.
pub fn sum_exponent(q: &DmtQuery, dispatch: Dispatch) -> Result<(f64, SumSource)> {
    let r_s = q.gains.sum();
    if dispatch == Dispatch::Auto {
        if let Some(res) = closed_form_sum(q, r_s) {
            let (source, value) = res?;
            return Ok((value, source));
        }
    }
    let s = match q.csit {
        Csit::Full => fcsit_sum_exponent(&q.cfg, &q.alphas, r_s)?,
        Csit::None => iml_sum_exponent(&q.cfg, &q.alphas, r_s)?,
    };
    let source = if s.saturated {
        SumSource::Saturated
    } else {
        SumSource::Lp
    };
    Ok((s.value, source))
}

/// DMT at one gain pair, using closed forms where they apply.
pub fn full_dmt(q: &DmtQuery) -> Result<DmtPoint> {
    full_dmt_with(q, Dispatch::Auto)
}

/// DMT at one gain pair with an explicit dispatch policy.
///
/// The single-user exponents are `alpha_ii d_{M_i,N_i}(r_i / alpha_ii)` in
/// both CSIT modes.
pub fn full_dmt_with(q: &DmtQuery, dispatch: Dispatch) -> Result<DmtPoint> {
    q.validate()?;
    let c = &q.cfg;
    let d1 = single_user_exponent(c.m1, c.n1, q.alphas.alpha11, q.gains.r1)?;
    let d2 = single_user_exponent(c.m2, c.n2, q.alphas.alpha22, q.gains.r2)?;
    let (ds, source) = sum_exponent(q, dispatch)?;
    Ok(DmtPoint {
        d1,
        d2,
        ds,
        value: compose_dmt(d1, d2, ds),
        source,
    })
}
