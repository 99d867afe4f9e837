//! Self-check suites: closed forms against the LP, the two F-CSIT program
//! forms against each other, the LP against the lattice oracle, and the
//! Monte-Carlo slope against theory.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::closed_form::{
    asymmetric_top, fcsit_asymmetric_sum, fcsit_femto_sum, fcsit_symmetric_sum,
    fcsit_symmetric_top, full_dmt, iml_asymmetric_sum, iml_symmetric_sum, DmtQuery,
};
use crate::error::{DmtError, Result};
use crate::exponents::{
    build_fcsit_presimplified_program, build_fcsit_sum_program, build_iml_sum_program,
    fcsit_budget_capacity,
};
use crate::lp::{solve_grid_oracle, solve_lp, PlProgram, ORACLE_MAX_VARS};
use crate::model::{AntennaConfig, Csit, MultiplexingGainPair, ScalingExponents};
use crate::montecarlo::{estimate_outage_slope, McConfig, DEFAULT_MIN_HITS};

type Formula = Box<dyn Fn(f64) -> Result<f64> + Send + Sync>;

/// A channel class with a closed-form sum exponent.
pub struct ClosedFormCase {
    pub label: String,
    pub cfg: AntennaConfig,
    pub alphas: ScalingExponents,
    pub csit: Csit,
    /// Largest `r_s` the formula covers.
    pub top: f64,
    pub formula: Formula,
}

impl ClosedFormCase {
    pub fn program(&self, r_s: f64) -> Result<PlProgram> {
        match self.csit {
            Csit::Full => build_fcsit_sum_program(&self.cfg, &self.alphas, r_s),
            Csit::None => build_iml_sum_program(&self.cfg, &self.alphas, r_s),
        }
    }

    /// `0, step, 2 step, ...` up to `top`.
    pub fn grid(&self, step: f64) -> Vec<f64> {
        let n = (self.top / step + 1e-9).floor() as usize;
        (0..=n).map(|k| (k as f64 * step).min(self.top)).collect()
    }
}

fn alphas(a11: f64, a21: f64, a22: f64) -> ScalingExponents {
    ScalingExponents::new(a11, a21, a22).expect("positive constants")
}

fn sym(n: usize) -> AntennaConfig {
    AntennaConfig::symmetric(n).expect("n >= 1")
}

fn asym(m: usize, n1: usize, n2: usize) -> AntennaConfig {
    AntennaConfig::new(m, n1, m, n2).expect("counts >= 1")
}

/// Symmetric channels, `n` in 1..=2, interference exponent in {0.5, 1, 1.5, 2}.
pub fn symmetric_cases() -> Vec<ClosedFormCase> {
    let mut out = Vec::new();
    for n in 1..=2 {
        for a in [0.5, 1.0, 1.5, 2.0] {
            out.push(ClosedFormCase {
                label: format!("symmetric n={n} alpha={a}"),
                cfg: sym(n),
                alphas: alphas(1.0, a, 1.0),
                csit: Csit::Full,
                top: fcsit_symmetric_top(n, a),
                formula: Box::new(move |r| fcsit_symmetric_sum(n, a, r)),
            });
        }
    }
    out
}

/// Stronger second link, `alpha22` in {1, 1.5, 2}.
pub fn femto_cases() -> Vec<ClosedFormCase> {
    let mut out = Vec::new();
    for n in 1..=2 {
        for a in [1.0, 1.5, 2.0] {
            out.push(ClosedFormCase {
                label: format!("femto n={n} alpha={a}"),
                cfg: sym(n),
                alphas: alphas(1.0, 1.0, a),
                csit: Csit::Full,
                top: n as f64 * a,
                formula: Box::new(move |r| fcsit_femto_sum(n, a, r)),
            });
        }
    }
    out
}

pub fn asymmetric_cases() -> Vec<ClosedFormCase> {
    [(1, 2, 2), (2, 3, 3), (3, 4, 3)]
        .into_iter()
        .map(|(m, n1, n2)| ClosedFormCase {
            label: format!("asymmetric ({m},{n1},{m},{n2})"),
            cfg: asym(m, n1, n2),
            alphas: ScalingExponents::unit(),
            csit: Csit::Full,
            top: asymmetric_top(m, n1),
            formula: Box::new(move |r| fcsit_asymmetric_sum(m, n1, n2, r)),
        })
        .collect()
}

pub fn iml_cases() -> Vec<ClosedFormCase> {
    let mut out = Vec::new();
    for n in 1..=2 {
        for a in [1.0, 1.5, 2.0] {
            out.push(ClosedFormCase {
                label: format!("iml symmetric n={n} alpha={a}"),
                cfg: sym(n),
                alphas: alphas(1.0, a, 1.0),
                csit: Csit::None,
                top: n as f64 * a,
                formula: Box::new(move |r| iml_symmetric_sum(n, a, r)),
            });
        }
    }
    for (m, n1, n2) in [(1, 2, 2), (3, 4, 3)] {
        out.push(ClosedFormCase {
            label: format!("iml asymmetric ({m},{n1},{m},{n2})"),
            cfg: asym(m, n1, n2),
            alphas: ScalingExponents::unit(),
            csit: Csit::None,
            top: asymmetric_top(m, n1),
            formula: Box::new(move |r| iml_asymmetric_sum(m, n1, n2, r)),
        });
    }
    out
}

pub fn all_closed_form_cases() -> Vec<ClosedFormCase> {
    let mut v = symmetric_cases();
    v.extend(femto_cases());
    v.extend(asymmetric_cases());
    v.extend(iml_cases());
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Not enough data to decide, e.g. too few Monte-Carlo outages.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub status: Status,
    pub checked: usize,
    pub failures: usize,
    pub max_error: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub verdicts: Vec<Verdict>,
}

impl Report {
    pub fn any_failed(&self) -> bool {
        self.verdicts.iter().any(|v| v.status == Status::Fail)
    }

    pub fn any_inconclusive(&self) -> bool {
        self.verdicts
            .iter()
            .any(|v| v.status == Status::Inconclusive)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidateOptions {
    /// Randomized instances for the program-equivalence suite.
    pub random_instances: usize,
    pub seed: u64,
    pub oracle_step: f64,
    /// Spacing of the `r_s` points handed to the oracle.
    pub oracle_r_step: f64,
    pub run_monte_carlo: bool,
    pub mc_samples: u64,
    pub mc_seed: u64,
    pub mc_snr_grid_db: Vec<f64>,
    /// Added to every linear weight of the LP in the closed-form suite.
    /// Nonzero values are a negative control: the suite must then fail.
    pub weight_perturbation: f64,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self {
            random_instances: 200,
            seed: 1,
            oracle_step: 0.05,
            oracle_r_step: 0.5,
            run_monte_carlo: true,
            mc_samples: 500_000,
            mc_seed: 1,
            mc_snr_grid_db: vec![15.0, 20.0, 25.0, 30.0, 35.0, 40.0],
            weight_perturbation: 0.0,
        }
    }
}

struct Tally {
    name: &'static str,
    checked: usize,
    failures: usize,
    max_error: f64,
    first_failure: Option<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            checked: 0,
            failures: 0,
            max_error: 0.0,
            first_failure: None,
        }
    }

    fn record(&mut self, error: f64, tol: f64, context: impl FnOnce() -> String) {
        self.checked += 1;
        self.max_error = self.max_error.max(error);
        // NaN errors count as failures
        if error.is_nan() || error > tol {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(context());
            }
        }
    }

    fn finish(self, note: &str) -> Verdict {
        let status = if self.failures == 0 {
            Status::Pass
        } else {
            Status::Fail
        };
        let detail = match self.first_failure {
            Some(f) => format!("{note}; first failure: {f}"),
            None => note.to_string(),
        };
        Verdict {
            name: self.name.into(),
            status,
            checked: self.checked,
            failures: self.failures,
            max_error: self.max_error,
            detail,
        }
    }
}

fn lp_value(program: &PlProgram) -> Result<f64> {
    let sol = solve_lp(program)?;
    if !sol.is_optimal() {
        return Err(DmtError::Infeasible);
    }
    Ok(sol.optimal_value)
}

/// Closed forms against the LP on an `r_s` grid of step 0.1.
pub fn closed_form_vs_lp(perturbation: f64) -> Result<Verdict> {
    const TOL: f64 = 1e-6;
    let mut t = Tally::new("closed_form_vs_lp");
    for case in all_closed_form_cases() {
        for r_s in case.grid(0.1) {
            let mut program = case.program(r_s)?;
            for w in &mut program.linear_weights {
                *w += perturbation;
            }
            let lp = lp_value(&program)?;
            let cf = (case.formula)(r_s)?;
            t.record((lp - cf).abs(), TOL, || {
                format!("{} r_s={r_s}: lp {lp} vs closed form {cf}", case.label)
            });
        }
    }
    Ok(t.finish(&format!("tolerance {TOL:e}")))
}

/// A random F-CSIT instance with antennas in `1..=2` and exponents in
/// `[0.25, 2.5]`, with `r_s` uniform on the budget capacity.
pub fn random_instance<R: Rng>(rng: &mut R) -> (AntennaConfig, ScalingExponents, f64) {
    let mut count = || rng.random_range(1..=2usize);
    let cfg = AntennaConfig::new(count(), count(), count(), count()).expect("counts >= 1");
    let mut alpha = || rng.random_range(0.25..=2.5);
    let a = alphas(alpha(), alpha(), alpha());
    let r_s = rng.random_range(0.0..=fcsit_budget_capacity(&cfg, &a));
    (cfg, a, r_s)
}

/// The pre-simplified program against the simplified one.
pub fn presimplified_vs_simplified(instances: usize, seed: u64) -> Result<Verdict> {
    const TOL: f64 = 1e-7;
    let mut t = Tally::new("presimplified_vs_simplified");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..instances {
        let (cfg, a, r_s) = random_instance(&mut rng);
        let simple = lp_value(&build_fcsit_sum_program(&cfg, &a, r_s)?)?;
        let pre = lp_value(&build_fcsit_presimplified_program(&cfg, &a, r_s)?)?;
        t.record((simple - pre).abs(), TOL, || {
            format!("{cfg} {a:?} r_s={r_s}: {simple} vs {pre}")
        });
    }
    Ok(t.finish(&format!("tolerance {TOL:e}")))
}

/// Bound on how far the lattice minimum can sit above the LP minimum.
pub fn oracle_error_bound(program: &PlProgram, step: f64) -> f64 {
    (program.total_linear_weight()
        + program.plus_objective_terms.len() as f64
        + program.total_concave_weight())
        * step
}

/// LP against the lattice oracle on the closed-form instances that fit the
/// oracle's dimension guard.
pub fn lp_vs_oracle(step: f64, r_step: f64) -> Result<Verdict> {
    let mut t = Tally::new("lp_vs_oracle");
    for case in all_closed_form_cases() {
        for r_s in case.grid(r_step) {
            let program = case.program(r_s)?;
            if program.num_vars() > ORACLE_MAX_VARS {
                continue;
            }
            let lp = lp_value(&program)?;
            let oracle = solve_grid_oracle(&program, step)?.optimal_value;
            let bound = oracle_error_bound(&program, step);
            // the lattice is a subset of the feasible set
            let gap = if oracle < lp - 1e-7 {
                f64::INFINITY
            } else {
                oracle - lp
            };
            t.record(gap, bound, || {
                format!(
                    "{} r_s={r_s}: lp {lp}, oracle {oracle}, bound {bound}",
                    case.label
                )
            });
        }
    }
    Ok(t.finish("gap within (total weight + plus terms) * step"))
}

/// Monte-Carlo slope of the single-antenna channel at `r1 = r2 = 0.25`
/// against its DMT of 0.75, tolerance 0.15.
pub fn monte_carlo_slope(samples: u64, seed: u64, snr_grid_db: Vec<f64>) -> Result<Verdict> {
    const TOL: f64 = 0.15;
    let cfg = sym(1);
    let gains = MultiplexingGainPair::symmetric(0.25)?;
    let theory = full_dmt(&DmtQuery {
        cfg,
        alphas: ScalingExponents::unit(),
        gains,
        csit: Csit::Full,
    })?
    .value;
    let mc = McConfig {
        cfg,
        alphas: ScalingExponents::unit(),
        gains,
        csit: Csit::Full,
        snr_grid_db,
        samples_per_point: samples,
        seed,
        min_hits: DEFAULT_MIN_HITS,
    };
    let name = "monte_carlo_slope".to_string();
    match estimate_outage_slope(&mc) {
        Ok(est) => {
            let err = (est.composed.slope - theory).abs();
            let pass = err <= TOL;
            Ok(Verdict {
                name,
                status: if pass { Status::Pass } else { Status::Fail },
                checked: 1,
                failures: usize::from(!pass),
                max_error: err,
                detail: format!(
                    "slope {:.4} +/- {:.4} vs theory {theory}, tolerance {TOL}",
                    est.composed.slope, est.composed.half_width
                ),
            })
        }
        Err(e @ DmtError::InsufficientOutageEvents { .. }) => Ok(Verdict {
            name,
            status: Status::Inconclusive,
            checked: 0,
            failures: 0,
            max_error: 0.0,
            detail: e.to_string(),
        }),
        Err(e) => Err(e),
    }
}

/// Runs every suite.
pub fn run_all(opts: &ValidateOptions) -> Result<Report> {
    let mut verdicts = vec![
        closed_form_vs_lp(opts.weight_perturbation)?,
        presimplified_vs_simplified(opts.random_instances, opts.seed)?,
        lp_vs_oracle(opts.oracle_step, opts.oracle_r_step)?,
    ];
    if opts.run_monte_carlo {
        verdicts.push(monte_carlo_slope(
            opts.mc_samples,
            opts.mc_seed,
            opts.mc_snr_grid_db.clone(),
        )?);
    }
    Ok(Report { verdicts })
}
