//! Exact solver for the piecewise-linear programs behind the sum-rate outage
//! exponents, plus an exhaustive lattice oracle used to cross-check it.
//!
//! [`solve_lp`] linearizes the program (epigraph variables for the plus
//! terms, slack variables for the budget) and hands it to a dense simplex.
//! Concave terms are handled by enumerating which side of each kink a
//! variable sits on; within one side the term is linear.

mod oracle;
mod program;
mod simplex;

use serde::{Deserialize, Serialize};

pub use oracle::{solve_grid_oracle, ORACLE_MAX_VARS};
pub use program::{BudgetTerm, ConcaveTerm, Coupling, PlProgram, PlusTerm, Violation};

use crate::error::{DmtError, Result};
use simplex::{LinearProgram, Outcome, RowKind};

/// Feasibility tolerance for returned assignments.
pub const FEASIBILITY_TOL: f64 = 1e-8;

/// Upper limit on distinct concave kinks; each doubles the number of LPs.
const MAX_KINKS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlSolution {
    pub optimal_value: f64,
    pub assignment: Vec<f64>,
    pub status: SolveStatus,
}

impl PlSolution {
    pub(crate) fn infeasible() -> Self {
        Self {
            optimal_value: f64::INFINITY,
            assignment: Vec::new(),
            status: SolveStatus::Infeasible,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }
}

/// Distinct `(var, threshold)` kinks of the concave terms, with the summed
/// weight of all terms sharing the kink.
fn concave_kinks(program: &PlProgram) -> Vec<(usize, f64, f64)> {
    let mut kinks: Vec<(usize, f64, f64)> = Vec::new();
    for c in &program.concave_objective_terms {
        match kinks
            .iter_mut()
            .find(|(v, t, _)| *v == c.var && *t == c.threshold)
        {
            Some(k) => k.2 += c.weight,
            None => kinks.push((c.var, c.threshold, c.weight)),
        }
    }
    kinks
}

/// Builds the linearized LP. Columns: program variables, then one epigraph
/// variable per plus term, then one slack per budget term. Returns the LP and
/// the constant to add to its objective.
fn linearize(
    program: &PlProgram,
    kinks: &[(usize, f64, f64)],
    pattern: u32,
) -> (LinearProgram, f64) {
    let n = program.num_vars();
    let n_plus = program.plus_objective_terms.len();
    let n_budget = program.budget_terms.len();
    let mut lp = LinearProgram::new(n + n_plus + n_budget);
    let mut constant = program.constant_offset;

    lp.costs[..n].copy_from_slice(&program.linear_weights);

    // (T - sum x)^+  ->  t >= T - sum x, t >= 0; weight +1 keeps t tight.
    for (k, term) in program.plus_objective_terms.iter().enumerate() {
        let t = n + k;
        lp.costs[t] = 1.0;
        let mut row: Vec<(usize, f64)> = term.vars.iter().map(|&v| (v, 1.0)).collect();
        row.push((t, 1.0));
        lp.push(&row, RowKind::Ge, term.threshold);
    }

    // (T - x)^+ in the budget  ->  s >= T - x, s >= 0, sum s <= limit.
    // Any s above the positive part only wastes budget, so the relaxation is exact.
    let first_slack = n + n_plus;
    for (k, b) in program.budget_terms.iter().enumerate() {
        lp.push(
            &[(b.var, 1.0), (first_slack + k, 1.0)],
            RowKind::Ge,
            b.threshold,
        );
    }
    if n_budget > 0 {
        let row: Vec<(usize, f64)> = (0..n_budget).map(|k| (first_slack + k, 1.0)).collect();
        lp.push(&row, RowKind::Le, program.budget_limit);
    }

    for chain in &program.ordering_chains {
        for w in chain.windows(2) {
            lp.push(&[(w[0], 1.0), (w[1], -1.0)], RowKind::Le, 0.0);
        }
    }
    for c in &program.coupling_bounds {
        lp.push(&[(c.a, 1.0), (c.b, 1.0)], RowKind::Ge, c.lower);
    }
    for v in 0..n {
        lp.push(&[(v, 1.0)], RowKind::Le, program.box_upper_bound);
    }

    // Bit k set: variable sits below kink k, where -w (T - x) is linear.
    for (k, &(var, threshold, weight)) in kinks.iter().enumerate() {
        if pattern & (1 << k) != 0 {
            lp.push(&[(var, 1.0)], RowKind::Le, threshold);
            lp.costs[var] += weight;
            constant -= weight * threshold;
        } else {
            lp.push(&[(var, 1.0)], RowKind::Ge, threshold);
        }
    }
    (lp, constant)
}

/// Solves a [`PlProgram`] to global optimality.
pub fn solve_lp(program: &PlProgram) -> Result<PlSolution> {
    program.validate()?;
    let n = program.num_vars();
    let kinks = concave_kinks(program);
    if kinks.len() > MAX_KINKS {
        return Err(DmtError::InvalidProgram(format!(
            "{} concave kinks exceed the limit of {MAX_KINKS}",
            kinks.len()
        )));
    }

    let mut best: Option<PlSolution> = None;
    for pattern in 0..(1u32 << kinks.len()) {
        let (lp, _) = linearize(program, &kinks, pattern);
        let x = match simplex::minimize(&lp)? {
            Outcome::Optimal { x, .. } => x,
            Outcome::Infeasible => continue,
            Outcome::Unbounded => {
                return Err(DmtError::InvalidProgram(
                    "linearized program is unbounded".into(),
                ))
            }
        };
        let assignment: Vec<f64> = x[..n]
            .iter()
            .map(|v| v.clamp(0.0, program.box_upper_bound))
            .collect();
        let value = program.objective_at(&assignment);
        if best
            .as_ref()
            .is_none_or(|b| value < b.optimal_value - 1e-12)
        {
            best = Some(PlSolution {
                optimal_value: value,
                assignment,
                status: SolveStatus::Optimal,
            });
        }
    }

    let Some(sol) = best else {
        return Ok(PlSolution::infeasible());
    };
    if let Some(v) = program.violation(&sol.assignment, FEASIBILITY_TOL) {
        return Err(DmtError::InvalidProgram(format!(
            "simplex returned a point violating {v:?}"
        )));
    }
    Ok(sol)
}
