//! Sum-rate outage exponents as piecewise-linear programs.
//!
//! Variables are the negative SNR exponents of the ordered nonzero
//! eigenvalues of `W3 = H21 H21†` (`upsilon`, `p` of them), `W1 = H11† (I +
//! rho21 W3)^-1 H11` (`beta`, `q1`) and `W2` (`gamma`, `q2`). In every program
//! they are laid out as `upsilon_1..upsilon_p, beta_1..beta_q1,
//! gamma_1..gamma_q2`; documentation indexes from 1, vectors from 0.
//!
//! Plus terms `(alpha21 - upsilon_i - x)^+` whose `i` exceeds `p` are dropped:
//! `W3` has only `p` nonzero eigenvalues, the rest sit at exponent infinity
//! and the term vanishes.

use serde::{Deserialize, Serialize};

use crate::error::{DmtError, Result};
use crate::lp::{solve_lp, BudgetTerm, ConcaveTerm, Coupling, PlProgram, PlSolution, PlusTerm};
use crate::model::{AntennaConfig, ExponentVariables, ScalingExponents};

/// Largest `r_s` at which the F-CSIT sum budget can still bind.
pub fn fcsit_budget_capacity(cfg: &AntennaConfig, alphas: &ScalingExponents) -> f64 {
    cfg.p() as f64 * alphas.alpha21
        + cfg.q1() as f64 * alphas.alpha11
        + cfg.q2() as f64 * alphas.alpha22
}

/// Largest `r_s` at which the IML sum budget can still bind.
pub fn iml_budget_capacity(cfg: &AntennaConfig, alphas: &ScalingExponents) -> f64 {
    cfg.p() as f64 * alphas.alpha21 + cfg.q1() as f64 * alphas.alpha11
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Form {
    /// `(alpha21 - upsilon)^+` folded into the linear weights.
    Simplified,
    /// Objective assembled from `E1 + E2 + f_W3` with the concave terms kept.
    Presimplified,
    /// Individual ML decoding at receiver 1: no `W2` block.
    Iml,
}

struct Layout {
    p: usize,
    q1: usize,
    q2: usize,
}

impl Layout {
    fn upsilon(&self, i: usize) -> usize {
        i - 1
    }
    fn beta(&self, j: usize) -> usize {
        self.p + j - 1
    }
    fn gamma(&self, k: usize) -> usize {
        self.p + self.q1 + k - 1
    }
}

fn check_inputs(cfg: &AntennaConfig, alphas: &ScalingExponents, r_s: f64) -> Result<()> {
    cfg.validate()?;
    alphas.validate()?;
    if !(r_s.is_finite() && r_s >= 0.0) {
        return Err(DmtError::InvalidConfig(format!(
            "sum multiplexing gain must be nonnegative and finite, got {r_s}"
        )));
    }
    Ok(())
}

fn build(
    cfg: &AntennaConfig,
    alphas: &ScalingExponents,
    r_s: f64,
    form: Form,
) -> Result<PlProgram> {
    check_inputs(cfg, alphas, r_s)?;
    let (m1, n1, m2, n2) = (cfg.m1, cfg.n1, cfg.m2, cfg.n2);
    let a21 = alphas.alpha21;
    let with_w2 = form != Form::Iml;
    let l = Layout {
        p: cfg.p(),
        q1: cfg.q1(),
        q2: if with_w2 { cfg.q2() } else { 0 },
    };

    let mut variables = Vec::new();
    let mut linear_weights = Vec::new();
    for i in 1..=l.p {
        variables.push(format!("upsilon_{i}"));
        let w = match form {
            Form::Simplified => m2 + n1 + m1 + n2 + 1 - 2 * i,
            Form::Presimplified => m2 + n1 + 1 - 2 * i,
            Form::Iml => m2 + n1 + m1 + 1 - 2 * i,
        };
        linear_weights.push(w as f64);
    }
    for j in 1..=l.q1 {
        variables.push(format!("beta_{j}"));
        linear_weights.push((m1 + n1 + 1 - 2 * j) as f64);
    }
    for k in 1..=l.q2 {
        variables.push(format!("gamma_{k}"));
        linear_weights.push((m2 + n2 + 1 - 2 * k) as f64);
    }

    let p = l.p as f64;
    let (constant_offset, concave_weight) = match form {
        Form::Simplified => (-((m1 + n2) as f64) * p * a21, 0.0),
        Form::Presimplified => (0.0, (m1 + n2) as f64),
        Form::Iml => (-(m1 as f64) * p * a21, 0.0),
    };
    let concave_objective_terms = if concave_weight > 0.0 {
        (1..=l.p)
            .map(|i| ConcaveTerm {
                weight: concave_weight,
                threshold: a21,
                var: l.upsilon(i),
            })
            .collect()
    } else {
        Vec::new()
    };

    let mut plus_objective_terms = Vec::new();
    for k in 1..=l.q2 {
        for i in 1..=(m2 - k).min(n2).min(l.p) {
            plus_objective_terms.push(PlusTerm {
                threshold: a21,
                vars: vec![l.upsilon(i), l.gamma(k)],
            });
        }
    }
    for j in 1..=l.q1 {
        for i in 1..=(n1 - j).min(m1).min(l.p) {
            plus_objective_terms.push(PlusTerm {
                threshold: a21,
                vars: vec![l.upsilon(i), l.beta(j)],
            });
        }
    }

    let mut budget_terms = Vec::new();
    for i in 1..=l.p {
        budget_terms.push(BudgetTerm {
            threshold: a21,
            var: l.upsilon(i),
        });
    }
    for j in 1..=l.q1 {
        budget_terms.push(BudgetTerm {
            threshold: alphas.alpha11,
            var: l.beta(j),
        });
    }
    for k in 1..=l.q2 {
        budget_terms.push(BudgetTerm {
            threshold: alphas.alpha22,
            var: l.gamma(k),
        });
    }

    let chain = |range: std::ops::Range<usize>| -> Vec<usize> { range.collect() };
    let mut ordering_chains = vec![chain(0..l.p), chain(l.p..l.p + l.q1)];
    if l.q2 > 0 {
        ordering_chains.push(chain(l.p + l.q1..l.p + l.q1 + l.q2));
    }
    ordering_chains.retain(|c| c.len() > 1);

    let mut coupling_bounds = Vec::new();
    for i in 1..=l.p {
        for j in 1..=l.q1 {
            if i + j > n1 {
                coupling_bounds.push(Coupling {
                    a: l.upsilon(i),
                    b: l.beta(j),
                    lower: a21,
                });
            }
        }
        for k in 1..=l.q2 {
            if i + k > m2 {
                coupling_bounds.push(Coupling {
                    a: l.upsilon(i),
                    b: l.gamma(k),
                    lower: a21,
                });
            }
        }
    }

    let program = PlProgram {
        variables,
        linear_weights,
        constant_offset,
        plus_objective_terms,
        concave_objective_terms,
        budget_terms,
        budget_limit: r_s,
        ordering_chains,
        coupling_bounds,
        // Every threshold is at most max(alpha). At that value all plus terms
        // vanish and the objective only grows, so the cap never binds.
        box_upper_bound: alphas.max(),
    };
    program.validate()?;
    Ok(program)
}

/// Program whose minimum is the F-CSIT sum-rate outage exponent `d_Os(r_s)`.
///
/// For `r_s` above [`fcsit_budget_capacity`] the budget never binds and the
/// optimum is 0.
pub fn build_fcsit_sum_program(
    cfg: &AntennaConfig,
    alphas: &ScalingExponents,
    r_s: f64,
) -> Result<PlProgram> {
    build(cfg, alphas, r_s, Form::Simplified)
}

/// The same exponent before the `(alpha21 - upsilon)^+` terms are folded into
/// the weights: objective `f_W3 + E1 + E2`, with the negative
/// `-(M1 + N2) (alpha21 - upsilon_i)^+` pieces kept as concave terms.
pub fn build_fcsit_presimplified_program(
    cfg: &AntennaConfig,
    alphas: &ScalingExponents,
    r_s: f64,
) -> Result<PlProgram> {
    build(cfg, alphas, r_s, Form::Presimplified)
}

/// Program whose minimum is the sum exponent of individual ML decoding at
/// receiver 1, the No-CSIT achievable scheme.
pub fn build_iml_sum_program(
    cfg: &AntennaConfig,
    alphas: &ScalingExponents,
    r_s: f64,
) -> Result<PlProgram> {
    build(cfg, alphas, r_s, Form::Iml)
}

/// Round-off allowed when checking the coupling constraints of a point.
const SUPPORT_SLACK: f64 = 1e-12;

fn check_ordered(name: &str, v: &[f64]) -> Result<()> {
    if v.iter().any(|x| !(x.is_finite() && *x >= 0.0)) || v.windows(2).any(|w| w[0] > w[1]) {
        return Err(DmtError::OutsideSupport(format!(
            "{name} must be nonnegative and nondecreasing, got {v:?}"
        )));
    }
    Ok(())
}

fn check_len(name: &str, v: &[f64], want: usize) -> Result<()> {
    if v.len() != want {
        return Err(DmtError::InvalidConfig(format!(
            "{name} has length {}, expected {want}",
            v.len()
        )));
    }
    Ok(())
}

fn pos(x: f64) -> f64 {
    x.max(0.0)
}

/// Shared shape of `E1` and `E2`: `x` couples to `upsilon` through
/// `inner(j) = number of plus terms of x_j` and the support coupling
/// `upsilon_i + x_j >= alpha21` for `i + j > coupling_from`.
#[allow(clippy::too_many_arguments)]
fn conditional_exponent(
    name: &str,
    x: &[f64],
    upsilon: &[f64],
    weight: impl Fn(usize) -> usize,
    inner: impl Fn(usize) -> usize,
    coupling_from: usize,
    correction: usize,
    a21: f64,
) -> Result<f64> {
    check_ordered("upsilon", upsilon)?;
    check_ordered(name, x)?;
    let p = upsilon.len();
    for (i, u) in upsilon.iter().enumerate() {
        for (j, xj) in x.iter().enumerate() {
            if (i + 1) + (j + 1) > coupling_from && u + xj < a21 - SUPPORT_SLACK {
                return Err(DmtError::OutsideSupport(format!(
                    "upsilon_{} + {name}_{} = {} < alpha21 = {a21}",
                    i + 1,
                    j + 1,
                    u + xj
                )));
            }
        }
    }
    let mut e = 0.0;
    for (j0, xj) in x.iter().enumerate() {
        let j = j0 + 1;
        e += weight(j) as f64 * xj;
        for u in upsilon.iter().take(inner(j).min(p)) {
            e += pos(a21 - u - xj);
        }
    }
    e -= correction as f64 * upsilon.iter().map(|u| pos(a21 - u)).sum::<f64>();
    Ok(e)
}

/// Exponent `E1(beta, upsilon)` of the conditional density of the `W1`
/// eigenvalues given those of `W3`.
pub fn eval_e1(
    cfg: &AntennaConfig,
    alphas: &ScalingExponents,
    beta: &[f64],
    upsilon: &[f64],
) -> Result<f64> {
    cfg.validate()?;
    check_len("beta", beta, cfg.q1())?;
    check_len("upsilon", upsilon, cfg.p())?;
    let (m1, n1) = (cfg.m1, cfg.n1);
    conditional_exponent(
        "beta",
        beta,
        upsilon,
        |j| m1 + n1 + 1 - 2 * j,
        |j| (n1 - j).min(m1),
        n1,
        m1,
        alphas.alpha21,
    )
}

/// Exponent `E2(gamma, upsilon)` of the conditional density of the `W2`
/// eigenvalues given those of `W3`.
pub fn eval_e2(
    cfg: &AntennaConfig,
    alphas: &ScalingExponents,
    gamma: &[f64],
    upsilon: &[f64],
) -> Result<f64> {
    cfg.validate()?;
    check_len("gamma", gamma, cfg.q2())?;
    check_len("upsilon", upsilon, cfg.p())?;
    let (m2, n2) = (cfg.m2, cfg.n2);
    conditional_exponent(
        "gamma",
        gamma,
        upsilon,
        |k| m2 + n2 + 1 - 2 * k,
        |k| (m2 - k).min(n2),
        m2,
        n2,
        alphas.alpha21,
    )
}

/// Exponent of the `W3` eigenvalue density, `sum_i (M2 + N1 + 1 - 2i) upsilon_i`.
pub fn eval_w3_exponent(cfg: &AntennaConfig, upsilon: &[f64]) -> Result<f64> {
    cfg.validate()?;
    check_len("upsilon", upsilon, cfg.p())?;
    check_ordered("upsilon", upsilon)?;
    Ok(upsilon
        .iter()
        .enumerate()
        .map(|(i0, u)| (cfg.m2 + cfg.n1 - 1 - 2 * i0) as f64 * u)
        .sum())
}

/// Splits a program assignment back into the three eigen-exponent vectors.
pub fn split_assignment(cfg: &AntennaConfig, assignment: &[f64]) -> ExponentVariables {
    let (p, q1) = (cfg.p(), cfg.q1());
    let upsilon = assignment[..p].to_vec();
    let beta = assignment[p..p + q1].to_vec();
    let gamma = assignment
        .get(p + q1..)
        .map(<[f64]>::to_vec)
        .unwrap_or_default();
    ExponentVariables {
        upsilon,
        beta,
        gamma,
    }
}

/// A solved sum exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumExponent {
    pub value: f64,
    /// `r_s` reached the budget capacity, so every eigenvalue may sit in
    /// outage and the exponent is 0 without solving.
    pub saturated: bool,
    /// Optimal eigen-exponents, absent when saturated.
    pub solution: Option<PlSolution>,
}

fn solve_sum(program: PlProgram, r_s: f64, capacity: f64) -> Result<SumExponent> {
    if r_s >= capacity {
        return Ok(SumExponent {
            value: 0.0,
            saturated: true,
            solution: None,
        });
    }
    let sol = solve_lp(&program)?;
    if !sol.is_optimal() {
        return Err(DmtError::Infeasible);
    }
    // the couplings keep the exponent nonnegative; clear round-off below 0
    Ok(SumExponent {
        value: sol.optimal_value.max(0.0),
        saturated: false,
        solution: Some(sol),
    })
}

/// F-CSIT sum-rate outage exponent `d_Os(r_s)` from the LP.
pub fn fcsit_sum_exponent(
    cfg: &AntennaConfig,
    alphas: &ScalingExponents,
    r_s: f64,
) -> Result<SumExponent> {
    let program = build_fcsit_sum_program(cfg, alphas, r_s)?;
    solve_sum(program, r_s, fcsit_budget_capacity(cfg, alphas))
}

/// IML sum exponent from the LP.
pub fn iml_sum_exponent(
    cfg: &AntennaConfig,
    alphas: &ScalingExponents,
    r_s: f64,
) -> Result<SumExponent> {
    let program = build_iml_sum_program(cfg, alphas, r_s)?;
    solve_sum(program, r_s, iml_budget_capacity(cfg, alphas))
}
