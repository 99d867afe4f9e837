//! Exhaustive minimization over the lattice `{0, step, 2 step, ..., cap}^n`.
//!
//! Shares nothing with the simplex path except [`PlProgram::objective_at`]'s
//! definition of the objective. The search is a depth-first enumeration in
//! variable order with values ascending; subtrees are skipped only when a
//! valid lower bound proves they cannot beat the incumbent, so the result is
//! the exact lattice minimum. Replacing the incumbent only on strict
//! improvement keeps the lexicographically smallest minimizer.

use super::{PlProgram, PlSolution, SolveStatus};
use crate::error::{DmtError, Result};

/// Largest program the oracle accepts.
pub const ORACLE_MAX_VARS: usize = 8;

const IMPROVE_TOL: f64 = 1e-12;

struct Search<'a> {
    p: &'a PlProgram,
    step: f64,
    max_idx: i64,
    /// `(a, b)` with `x_a <= x_b`, from consecutive chain members.
    orders: Vec<(usize, usize)>,
    /// Plus terms indexed by their largest variable: evaluable once it is set.
    plus_by_last: Vec<Vec<usize>>,
    x: Vec<f64>,
    best_value: f64,
    best_x: Option<Vec<f64>>,
}

impl Search<'_> {
    fn value(&self, idx: i64) -> f64 {
        idx as f64 * self.step
    }

    fn idx_at_least(&self, v: f64) -> i64 {
        ((v / self.step) - 1e-9).ceil().max(0.0) as i64
    }

    fn idx_at_most(&self, v: f64) -> i64 {
        ((v / self.step) + 1e-9).floor() as i64
    }

    /// Objective contribution that is fixed once variables `0..=v` are set.
    fn settled_part(&self, v: usize) -> f64 {
        let p = self.p;
        let x = &self.x;
        let mut s = p.linear_weights[v] * x[v];
        for c in p.concave_objective_terms.iter().filter(|c| c.var == v) {
            s -= c.weight * (c.threshold - x[v]).max(0.0);
        }
        for &t in &self.plus_by_last[v] {
            let term = &p.plus_objective_terms[t];
            s += (term.threshold - term.vars.iter().map(|&u| x[u]).sum::<f64>()).max(0.0);
        }
        s
    }

    fn budget_used(&self, assigned: usize) -> f64 {
        self.p
            .budget_terms
            .iter()
            .filter(|b| b.var < assigned)
            .map(|b| (b.threshold - self.x[b.var]).max(0.0))
            .sum()
    }

    /// Smallest value variable `u` may take given the assigned prefix and
    /// the lower bounds already computed for earlier unassigned variables.
    fn floor_of(&self, u: usize, assigned: usize, lo: &[f64]) -> f64 {
        let known = |a: usize| if a < assigned { self.x[a] } else { lo[a] };
        let mut f: f64 = 0.0;
        for &(a, b) in &self.orders {
            if b == u && a < u {
                f = f.max(known(a));
            }
        }
        for c in &self.p.coupling_bounds {
            let partner = if c.a == u {
                c.b
            } else if c.b == u {
                c.a
            } else {
                continue;
            };
            if partner < assigned {
                f = f.max(c.lower - self.x[partner]);
            }
        }
        f
    }

    /// Lower bound on any completion of the first `assigned` variables.
    fn completion_bound(&self, assigned: usize, used: f64) -> f64 {
        let p = self.p;
        let n = p.num_vars();
        let mut lo = vec![0.0; n];
        let mut bound = 0.0;
        // (unit cost of covering budget deficit, coverable amount)
        let mut cover: Vec<(f64, f64)> = Vec::new();
        let mut deficit = 0.0;
        for u in assigned..n {
            lo[u] = self.floor_of(u, assigned, &lo);
            bound += p.linear_weights[u] * lo[u];
            for c in p.concave_objective_terms.iter().filter(|c| c.var == u) {
                bound -= c.weight * (c.threshold - lo[u]).max(0.0);
            }
            let mut active = 0usize;
            let mut amount = 0.0;
            for b in p.budget_terms.iter().filter(|b| b.var == u) {
                let gap = b.threshold - lo[u];
                if gap > 0.0 {
                    active += 1;
                    amount += gap;
                }
            }
            if active > 0 {
                deficit += amount;
                cover.push((p.linear_weights[u] / active as f64, amount));
            }
        }
        let mut need = deficit - (p.budget_limit - used);
        if need > 0.0 {
            cover.sort_by(|a, b| a.0.total_cmp(&b.0));
            for (unit, amount) in cover {
                let take = need.min(amount);
                bound += unit * take;
                need -= take;
                if need <= 0.0 {
                    break;
                }
            }
            if need > 1e-9 {
                return f64::INFINITY;
            }
        }
        bound
    }

    fn dfs(&mut self, v: usize, partial: f64) {
        let p = self.p;
        let n = p.num_vars();
        if v == n {
            if partial < self.best_value - IMPROVE_TOL {
                self.best_value = partial;
                self.best_x = Some(self.x.clone());
            }
            return;
        }
        let mut lo = 0.0f64;
        let mut hi = p.box_upper_bound;
        for &(a, b) in &self.orders {
            if b == v && a < v {
                lo = lo.max(self.x[a]);
            }
            if a == v && b < v {
                hi = hi.min(self.x[b]);
            }
        }
        for c in &p.coupling_bounds {
            if c.a == v && c.b < v {
                lo = lo.max(c.lower - self.x[c.b]);
            } else if c.b == v && c.a < v {
                lo = lo.max(c.lower - self.x[c.a]);
            }
        }
        let used_before = self.budget_used(v);
        let start = self.idx_at_least(lo);
        let end = self.idx_at_most(hi).min(self.max_idx);
        for k in start..=end {
            self.x[v] = self.value(k);
            let own: f64 = p
                .budget_terms
                .iter()
                .filter(|b| b.var == v)
                .map(|b| (b.threshold - self.x[v]).max(0.0))
                .sum();
            let used = used_before + own;
            if used > p.budget_limit + 1e-9 {
                continue;
            }
            let next = partial + self.settled_part(v);
            let bound = next + self.completion_bound(v + 1, used);
            if bound >= self.best_value - IMPROVE_TOL {
                continue;
            }
            self.dfs(v + 1, next);
        }
    }
}

/// Exact minimum of `program` over the lattice with spacing `step`.
///
/// `step` must divide the box cap. Programs with more than
/// [`ORACLE_MAX_VARS`] variables are rejected.
pub fn solve_grid_oracle(program: &PlProgram, step: f64) -> Result<PlSolution> {
    program.validate()?;
    let n = program.num_vars();
    if n > ORACLE_MAX_VARS {
        return Err(DmtError::DimensionGuard {
            max: ORACLE_MAX_VARS,
            got: n,
        });
    }
    if !(step.is_finite() && step > 0.0) {
        return Err(DmtError::InvalidConfig(format!(
            "oracle step must be positive, got {step}"
        )));
    }
    let cap = program.box_upper_bound;
    let max_idx = (cap / step).round() as i64;
    if (max_idx as f64 * step - cap).abs() > 1e-9 * cap.max(1.0) {
        return Err(DmtError::InvalidConfig(format!(
            "oracle step {step} does not divide the box cap {cap}"
        )));
    }

    let mut orders = Vec::new();
    for chain in &program.ordering_chains {
        for w in chain.windows(2) {
            orders.push((w[0], w[1]));
        }
    }
    let mut plus_by_last = vec![Vec::new(); n];
    for (t, term) in program.plus_objective_terms.iter().enumerate() {
        let last = *term.vars.iter().max().expect("validated nonempty");
        plus_by_last[last].push(t);
    }

    let mut search = Search {
        p: program,
        step,
        max_idx,
        orders,
        plus_by_last,
        x: vec![0.0; n],
        best_value: f64::INFINITY,
        best_x: None,
    };
    search.dfs(0, program.constant_offset);

    Ok(match search.best_x {
        Some(assignment) => PlSolution {
            optimal_value: program.objective_at(&assignment),
            assignment,
            status: SolveStatus::Optimal,
        },
        None => PlSolution::infeasible(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{BudgetTerm, ConcaveTerm, Coupling, PlusTerm};

    fn single_var(limit: f64) -> PlProgram {
        PlProgram {
            variables: vec!["x".into()],
            linear_weights: vec![1.0],
            constant_offset: 0.0,
            plus_objective_terms: vec![],
            concave_objective_terms: vec![],
            budget_terms: vec![BudgetTerm {
                threshold: 1.0,
                var: 0,
            }],
            budget_limit: limit,
            ordering_chains: vec![],
            coupling_bounds: vec![],
            box_upper_bound: 1.0,
        }
    }

    /// Plain enumeration of every lattice point, for cross-checking the pruning.
    fn brute_force(p: &PlProgram, step: f64) -> f64 {
        let n = p.num_vars();
        let k = (p.box_upper_bound / step).round() as usize;
        let mut idx = vec![0usize; n];
        let mut best = f64::INFINITY;
        loop {
            let x: Vec<f64> = idx.iter().map(|&i| i as f64 * step).collect();
            if p.is_feasible(&x, 1e-9) {
                best = best.min(p.objective_at(&x));
            }
            let mut d = 0;
            loop {
                if d == n {
                    return best;
                }
                idx[d] += 1;
                if idx[d] <= k {
                    break;
                }
                idx[d] = 0;
                d += 1;
            }
        }
    }

    #[test]
    fn trivial_instance() {
        let sol = solve_grid_oracle(&single_var(0.0), 0.25).unwrap();
        assert_eq!(sol.optimal_value, 1.0);
        assert_eq!(sol.assignment, vec![1.0]);
    }

    #[test]
    fn guards() {
        let mut p = single_var(0.0);
        assert!(matches!(
            solve_grid_oracle(&p, 0.3),
            Err(DmtError::InvalidConfig(_))
        ));
        assert!(solve_grid_oracle(&p, 0.0).is_err());
        p.variables = (0..9).map(|i| format!("x{i}")).collect();
        p.linear_weights = vec![1.0; 9];
        assert!(matches!(
            solve_grid_oracle(&p, 0.25),
            Err(DmtError::DimensionGuard { max: 8, got: 9 })
        ));
    }

    #[test]
    fn lexicographic_tie_break() {
        // x + y with a coupling x + y >= 1: every split of 1 ties.
        let p = PlProgram {
            variables: vec!["x".into(), "y".into()],
            linear_weights: vec![1.0, 1.0],
            constant_offset: 0.0,
            plus_objective_terms: vec![],
            concave_objective_terms: vec![],
            budget_terms: vec![],
            budget_limit: 0.0,
            ordering_chains: vec![],
            coupling_bounds: vec![Coupling {
                a: 0,
                b: 1,
                lower: 1.0,
            }],
            box_upper_bound: 1.0,
        };
        let sol = solve_grid_oracle(&p, 0.25).unwrap();
        assert_eq!(sol.optimal_value, 1.0);
        assert_eq!(sol.assignment, vec![0.0, 1.0]);
    }

    #[test]
    fn pruning_matches_plain_enumeration() {
        let p = PlProgram {
            variables: vec!["a".into(), "b".into(), "c".into(), "d".into()],
            linear_weights: vec![3.0, 1.0, 2.0, 0.5],
            constant_offset: -1.0,
            plus_objective_terms: vec![
                PlusTerm {
                    threshold: 1.5,
                    vars: vec![0, 2],
                },
                PlusTerm {
                    threshold: 1.0,
                    vars: vec![1, 3],
                },
            ],
            concave_objective_terms: vec![ConcaveTerm {
                weight: 1.5,
                threshold: 1.0,
                var: 1,
            }],
            budget_terms: vec![
                BudgetTerm {
                    threshold: 2.0,
                    var: 0,
                },
                BudgetTerm {
                    threshold: 1.0,
                    var: 1,
                },
                BudgetTerm {
                    threshold: 2.0,
                    var: 3,
                },
            ],
            budget_limit: 1.75,
            ordering_chains: vec![vec![0, 1], vec![2, 3]],
            coupling_bounds: vec![Coupling {
                a: 1,
                b: 2,
                lower: 1.25,
            }],
            box_upper_bound: 2.0,
        };
        for limit in [0.0, 0.5, 1.75, 3.0, 5.0] {
            let mut q = p.clone();
            q.budget_limit = limit;
            let sol = solve_grid_oracle(&q, 0.25).unwrap();
            assert!((sol.optimal_value - brute_force(&q, 0.25)).abs() < 1e-12);
            assert!(q.is_feasible(&sol.assignment, 1e-9));
        }
    }
}
