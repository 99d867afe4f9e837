//! Log-det mutual-information bounds in bits per channel use.

use nalgebra::Cholesky;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::channel::{CMatrix, ChannelRealization, LinkGains};

/// A matrix that should be Hermitian positive definite failed to factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NumericalFailure;

fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

fn scaled(m: &CMatrix, s: f64) -> CMatrix {
    m * Complex64::new(s, 0.0)
}

/// `H H†`.
fn gram(h: &CMatrix) -> CMatrix {
    h * h.adjoint()
}

/// `H† H`.
fn gram_t(h: &CMatrix) -> CMatrix {
    h.adjoint() * h
}

fn hermitize(m: CMatrix) -> CMatrix {
    let adj = m.adjoint();
    (m + adj) * Complex64::new(0.5, 0.0)
}

fn cholesky(m: CMatrix) -> Result<Cholesky<Complex64, nalgebra::Dyn>, NumericalFailure> {
    Cholesky::new(hermitize(m)).ok_or(NumericalFailure)
}

/// `log2 det A` for Hermitian positive definite `A`.
pub fn log2_det_hpd(a: CMatrix) -> Result<f64, NumericalFailure> {
    let l = cholesky(a)?;
    let v: f64 = l
        .l_dirty()
        .diagonal()
        .iter()
        .map(|d| d.re.ln())
        .sum::<f64>()
        * 2.0
        / std::f64::consts::LN_2;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(NumericalFailure)
    }
}

/// `log2 det(I + s H H†)`.
fn log2_det_gram(h: &CMatrix, s: f64) -> Result<f64, NumericalFailure> {
    log2_det_hpd(identity(h.nrows()) + scaled(&gram(h), s))
}

/// `H22 (I + rho21 H21† H21)^-1 H22†`, whose eigenvalues are the `W2` spectrum.
fn w2(real: &ChannelRealization, g: &LinkGains) -> Result<CMatrix, NumericalFailure> {
    let a = identity(real.h21.ncols()) + scaled(&gram_t(&real.h21), g.rho21);
    let x = cholesky(a)?.solve(&real.h22.adjoint());
    Ok(&real.h22 * x)
}

/// Upper bounds on the mutual informations of the F-CSIT region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpperBounds {
    pub i_b1: f64,
    pub i_b2: f64,
    pub i_bs: f64,
}

/// Lower bounds achieved by the superposition scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBounds {
    pub i_l1: f64,
    pub i_l2: f64,
    pub i_ls: f64,
}

/// Rate bounds of individual ML decoding, plus the unscaled sum `I_cs'`
/// that brackets `I_cs` within `N1 log2 max(M1, M2)` bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImlBounds {
    pub i_c1: f64,
    pub i_c2: f64,
    pub i_cs: f64,
    pub i_cs_prime: f64,
}

pub fn mutual_info_upper(
    real: &ChannelRealization,
    g: &LinkGains,
) -> Result<UpperBounds, NumericalFailure> {
    let i_b1 = log2_det_gram(&real.h11, g.rho11)?;
    let i_b2 = log2_det_gram(&real.h22, g.rho22)?;
    let n1 = real.h11.nrows();
    let rx1 = identity(n1) + scaled(&gram(&real.h21), g.rho21) + scaled(&gram(&real.h11), g.rho11);
    let rx2 = identity(real.h22.nrows()) + scaled(&w2(real, g)?, g.rho22);
    let i_bs = log2_det_hpd(rx1)? + log2_det_hpd(rx2)?;
    Ok(UpperBounds { i_b1, i_b2, i_bs })
}

/// `I_bs` written as the sum of the three eigenvalue log-dets of `W1`, `W2`
/// and `W3`. Equal to [`UpperBounds::i_bs`] up to rounding.
pub fn sum_bound_decomposition(
    real: &ChannelRealization,
    g: &LinkGains,
) -> Result<f64, NumericalFailure> {
    let n1 = real.h11.nrows();
    let interf = identity(n1) + scaled(&real.w3(), g.rho21);
    let w1 = real.h11.adjoint() * cholesky(interf.clone())?.solve(&real.h11);
    let t1 = log2_det_hpd(identity(real.h11.ncols()) + scaled(&w1, g.rho11))?;
    let t2 = log2_det_hpd(identity(real.h22.nrows()) + scaled(&w2(real, g)?, g.rho22))?;
    let t3 = log2_det_hpd(interf)?;
    Ok(t1 + t2 + t3)
}

/// The upper bounds minus the constant gaps `2 N_i` and `2 (N1 + N2)`.
pub fn lower_from_upper(up: &UpperBounds, n1: usize, n2: usize) -> LowerBounds {
    LowerBounds {
        i_l1: up.i_b1 - 2.0 * n1 as f64,
        i_l2: up.i_b2 - 2.0 * n2 as f64,
        i_ls: up.i_bs - 2.0 * (n1 + n2) as f64,
    }
}

pub fn mutual_info_lower(
    real: &ChannelRealization,
    g: &LinkGains,
) -> Result<LowerBounds, NumericalFailure> {
    let up = mutual_info_upper(real, g)?;
    Ok(lower_from_upper(&up, real.h11.nrows(), real.h22.nrows()))
}

/// IML bounds. Each transmitter spreads its power evenly, so the gains are
/// divided by the transmit antenna count.
pub fn mutual_info_iml(
    real: &ChannelRealization,
    g: &LinkGains,
) -> Result<ImlBounds, NumericalFailure> {
    let m1 = real.h11.ncols() as f64;
    let m2 = real.h21.ncols() as f64;
    let n1 = real.h11.nrows();
    let g11 = gram(&real.h11);
    let g21 = gram(&real.h21);
    let i_c1 = log2_det_hpd(identity(n1) + scaled(&g11, g.rho11 / m1))?;
    let i_c2 = log2_det_gram(&real.h22, g.rho22 / m2)?;
    let i_cs =
        log2_det_hpd(identity(n1) + scaled(&g11, g.rho11 / m1) + scaled(&g21, g.rho21 / m2))?;
    let i_cs_prime = log2_det_hpd(identity(n1) + scaled(&g11, g.rho11) + scaled(&g21, g.rho21))?;
    Ok(ImlBounds {
        i_c1,
        i_c2,
        i_cs,
        i_cs_prime,
    })
}

/// `N1 log2 max(M1, M2)`, the most `I_cs'` can exceed `I_cs` by.
pub fn iml_bracket_constant(n1: usize, m1: usize, m2: usize) -> f64 {
    n1 as f64 * (m1.max(m2) as f64).log2()
}
