use serde::{Deserialize, Serialize};

use crate::error::{DmtError, Result};

/// `(threshold - sum of vars)^+`, added to the objective with weight 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlusTerm {
    pub threshold: f64,
    pub vars: Vec<usize>,
}

/// `-weight * (threshold - x_var)^+`, a concave objective piece.
///
/// Only produced by the pre-simplified sum-exponent builder, where the
/// correction terms of the conditional eigenvalue densities enter with a
/// negative sign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcaveTerm {
    pub weight: f64,
    pub threshold: f64,
    pub var: usize,
}

/// `(threshold - x_var)^+`, one summand of the budget constraint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetTerm {
    pub threshold: f64,
    pub var: usize,
}

/// `x_a + x_b >= lower`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub a: usize,
    pub b: usize,
    pub lower: f64,
}

/// A piecewise-linear convex minimization over nonnegative variables:
///
/// ```text
/// min   constant + sum_v w_v x_v + sum_t (T_t - sum_{v in t} x_v)^+
///                               - sum_c w_c (T_c - x_c)^+
/// s.t.  sum_b (T_b - x_b)^+ <= budget_limit
///       x nondecreasing along every ordering chain
///       x_a + x_b >= L for every coupling
///       0 <= x <= box_upper_bound
/// ```
///
/// The concave terms break convexity; the solvers handle them by splitting
/// at their kinks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlProgram {
    pub variables: Vec<String>,
    pub linear_weights: Vec<f64>,
    pub constant_offset: f64,
    pub plus_objective_terms: Vec<PlusTerm>,
    #[serde(default)]
    pub concave_objective_terms: Vec<ConcaveTerm>,
    pub budget_terms: Vec<BudgetTerm>,
    pub budget_limit: f64,
    pub ordering_chains: Vec<Vec<usize>>,
    pub coupling_bounds: Vec<Coupling>,
    pub box_upper_bound: f64,
}

/// Which constraint a point violates, for diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Bounds { var: usize, value: f64 },
    Ordering { before: usize, after: usize },
    Coupling { a: usize, b: usize },
    Budget { used: f64, limit: f64 },
}

fn pos(x: f64) -> f64 {
    x.max(0.0)
}

impl PlProgram {
    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }

    /// Checks the structural invariants: indices in range, every threshold,
    /// bound and weight finite and nonnegative, and the box cap covering every
    /// threshold and coupling bound.
    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        let bad = |msg: String| Err(DmtError::InvalidProgram(msg));
        if self.linear_weights.len() != n {
            return bad(format!(
                "{} weights for {} variables",
                self.linear_weights.len(),
                n
            ));
        }
        let cap = self.box_upper_bound;
        if !(cap.is_finite() && cap >= 0.0) {
            return bad(format!("box upper bound {cap} must be finite and >= 0"));
        }
        if !self.constant_offset.is_finite() {
            return bad("constant offset must be finite".into());
        }
        if !(self.budget_limit.is_finite() && self.budget_limit >= 0.0) {
            return bad(format!("budget limit {} must be >= 0", self.budget_limit));
        }
        let nonneg = |x: f64| x.is_finite() && x >= 0.0;
        if let Some(w) = self.linear_weights.iter().find(|w| !nonneg(**w)) {
            return bad(format!("linear weight {w} must be finite and >= 0"));
        }
        let in_range = |v: usize| v < n;
        let check_threshold = |t: f64, what: &str| -> Result<()> {
            if !nonneg(t) {
                return bad(format!("{what} threshold {t} must be finite and >= 0"));
            }
            if t > cap {
                return bad(format!("{what} threshold {t} exceeds box cap {cap}"));
            }
            Ok(())
        };
        for t in &self.plus_objective_terms {
            check_threshold(t.threshold, "plus-term")?;
            if t.vars.is_empty() || !t.vars.iter().all(|&v| in_range(v)) {
                return bad(format!("plus-term variables {:?} out of range", t.vars));
            }
        }
        for c in &self.concave_objective_terms {
            check_threshold(c.threshold, "concave term")?;
            if !nonneg(c.weight) || !in_range(c.var) {
                return bad(format!("concave term {c:?} malformed"));
            }
        }
        for b in &self.budget_terms {
            check_threshold(b.threshold, "budget")?;
            if !in_range(b.var) {
                return bad(format!("budget variable {} out of range", b.var));
            }
        }
        for chain in &self.ordering_chains {
            if !chain.iter().all(|&v| in_range(v)) {
                return bad(format!("ordering chain {chain:?} out of range"));
            }
        }
        for c in &self.coupling_bounds {
            if !in_range(c.a) || !in_range(c.b) || c.a == c.b {
                return bad(format!("coupling {c:?} malformed"));
            }
            check_threshold(c.lower, "coupling")?;
        }
        Ok(())
    }

    /// Sum of the linear objective weights.
    pub fn total_linear_weight(&self) -> f64 {
        self.linear_weights.iter().sum()
    }

    /// Sum of the weights of the concave terms.
    pub fn total_concave_weight(&self) -> f64 {
        self.concave_objective_terms.iter().map(|c| c.weight).sum()
    }

    /// Evaluates the piecewise-linear objective exactly.
    pub fn objective_at(&self, x: &[f64]) -> f64 {
        let linear: f64 = self.linear_weights.iter().zip(x).map(|(w, v)| w * v).sum();
        let plus: f64 = self
            .plus_objective_terms
            .iter()
            .map(|t| pos(t.threshold - t.vars.iter().map(|&v| x[v]).sum::<f64>()))
            .sum();
        let concave: f64 = self
            .concave_objective_terms
            .iter()
            .map(|c| c.weight * pos(c.threshold - x[c.var]))
            .sum();
        self.constant_offset + linear + plus - concave
    }

    /// Left-hand side of the budget constraint.
    pub fn budget_usage(&self, x: &[f64]) -> f64 {
        self.budget_terms
            .iter()
            .map(|b| pos(b.threshold - x[b.var]))
            .sum()
    }

    /// Returns the first constraint violated by more than `tol`, if any.
    pub fn violation(&self, x: &[f64], tol: f64) -> Option<Violation> {
        for (var, &value) in x.iter().enumerate() {
            if value < -tol || value > self.box_upper_bound + tol {
                return Some(Violation::Bounds { var, value });
            }
        }
        for chain in &self.ordering_chains {
            for w in chain.windows(2) {
                if x[w[0]] > x[w[1]] + tol {
                    return Some(Violation::Ordering {
                        before: w[0],
                        after: w[1],
                    });
                }
            }
        }
        for c in &self.coupling_bounds {
            if x[c.a] + x[c.b] < c.lower - tol {
                return Some(Violation::Coupling { a: c.a, b: c.b });
            }
        }
        let used = self.budget_usage(x);
        if used > self.budget_limit + tol {
            return Some(Violation::Budget {
                used,
                limit: self.budget_limit,
            });
        }
        None
    }

    pub fn is_feasible(&self, x: &[f64], tol: f64) -> bool {
        self.violation(x, tol).is_none()
    }
}
