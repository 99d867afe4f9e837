//! Dense two-phase tableau simplex with Bland's anti-cycling rule.
//!
//! Sized for the desk-scale programs built in this crate (tens of rows and
//! columns). Supports `<=` and `>=` rows over nonnegative variables only.

use crate::error::{DmtError, Result};

const PIVOT_TOL: f64 = 1e-9;
const PHASE_ONE_TOL: f64 = 1e-7;
const MAX_PIVOTS: usize = 50_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum RowKind {
    Le,
    Ge,
}

#[derive(Debug, Clone)]
pub(crate) struct Row {
    pub coeffs: Vec<f64>,
    pub kind: RowKind,
    pub rhs: f64,
}

/// `min c.x` subject to `rows`, `x >= 0`.
#[derive(Debug, Clone)]
pub(crate) struct LinearProgram {
    pub costs: Vec<f64>,
    pub rows: Vec<Row>,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        Self {
            costs: vec![0.0; num_vars],
            rows: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.costs.len()
    }

    /// Adds `sum coeff * x_var  (kind)  rhs`.
    pub fn push(&mut self, terms: &[(usize, f64)], kind: RowKind, rhs: f64) {
        let mut coeffs = vec![0.0; self.num_vars()];
        for &(v, c) in terms {
            coeffs[v] += c;
        }
        self.rows.push(Row { coeffs, kind, rhs });
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Outcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

struct Tableau {
    /// `m` rows of `ncols + 1` entries, the last being the right-hand side.
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    ncols: usize,
    pivots: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.t[i][self.ncols]
    }

    fn pivot(&mut self, row: usize, col: usize) -> Result<()> {
        self.pivots += 1;
        if self.pivots > MAX_PIVOTS {
            return Err(DmtError::PivotLimit(MAX_PIVOTS));
        }
        let p = self.t[row][col];
        for v in self.t[row].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.t[row].clone();
        for (i, r) in self.t.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let f = r[col];
            if f != 0.0 {
                for (v, pv) in r.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                r[col] = 0.0;
            }
        }
        self.basis[row] = col;
        Ok(())
    }

    /// Reduced costs of `costs` w.r.t. the current basis, plus the objective value.
    fn reduced_costs(&self, costs: &[f64]) -> (Vec<f64>, f64) {
        let mut d = costs.to_vec();
        let mut value = 0.0;
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = costs[b];
            if cb != 0.0 {
                for (dj, tij) in d.iter_mut().zip(&self.t[i][..self.ncols]) {
                    *dj -= cb * tij;
                }
                value += cb * self.rhs(i);
            }
        }
        (d, value)
    }

    /// Runs simplex iterations on `costs`, only letting columns with
    /// `allowed[j]` enter. Returns `false` when unbounded.
    fn optimize(&mut self, costs: &[f64], allowed: &[bool]) -> Result<bool> {
        loop {
            let (d, _) = self.reduced_costs(costs);
            // Bland: lowest-index improving column
            let Some(col) = (0..self.ncols).find(|&j| allowed[j] && d[j] < -PIVOT_TOL) else {
                return Ok(true);
            };
            let mut best: Option<(usize, f64)> = None;
            for i in 0..self.t.len() {
                let a = self.t[i][col];
                if a > PIVOT_TOL {
                    let ratio = self.rhs(i) / a;
                    best = match best {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br - PIVOT_TOL
                                || (ratio <= br + PIVOT_TOL && self.basis[i] < self.basis[bi])
                            {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            let Some((row, _)) = best else {
                return Ok(false);
            };
            self.pivot(row, col)?;
        }
    }
}

pub(crate) fn minimize(lp: &LinearProgram) -> Result<Outcome> {
    let n = lp.num_vars();
    let m = lp.rows.len();

    // Normalize to nonnegative right-hand sides.
    let rows: Vec<Row> = lp
        .rows
        .iter()
        .map(|r| {
            if r.rhs < 0.0 {
                Row {
                    coeffs: r.coeffs.iter().map(|c| -c).collect(),
                    kind: match r.kind {
                        RowKind::Le => RowKind::Ge,
                        RowKind::Ge => RowKind::Le,
                    },
                    rhs: -r.rhs,
                }
            } else {
                r.clone()
            }
        })
        .collect();

    let n_slack = m;
    let n_art = rows.iter().filter(|r| r.kind == RowKind::Ge).count();
    let ncols = n + n_slack + n_art;
    let first_art = n + n_slack;

    let mut t = vec![vec![0.0; ncols + 1]; m];
    let mut basis = vec![0; m];
    let mut art = first_art;
    for (i, r) in rows.iter().enumerate() {
        t[i][..n].copy_from_slice(&r.coeffs);
        t[i][ncols] = r.rhs;
        match r.kind {
            RowKind::Le => {
                t[i][n + i] = 1.0;
                basis[i] = n + i;
            }
            RowKind::Ge => {
                t[i][n + i] = -1.0;
                t[i][art] = 1.0;
                basis[i] = art;
                art += 1;
            }
        }
    }
    let mut tab = Tableau {
        t,
        basis,
        ncols,
        pivots: 0,
    };

    if n_art > 0 {
        let mut phase1 = vec![0.0; ncols];
        phase1[first_art..].iter_mut().for_each(|c| *c = 1.0);
        let allowed = vec![true; ncols];
        tab.optimize(&phase1, &allowed)?;
        let (_, infeas) = tab.reduced_costs(&phase1);
        if infeas > PHASE_ONE_TOL {
            return Ok(Outcome::Infeasible);
        }
        // Drive zero-level artificials out of the basis; drop redundant rows.
        let mut i = 0;
        while i < tab.t.len() {
            if tab.basis[i] >= first_art {
                let col = (0..first_art).find(|&j| tab.t[i][j].abs() > PIVOT_TOL);
                match col {
                    Some(j) => tab.pivot(i, j)?,
                    None => {
                        tab.t.remove(i);
                        tab.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    let mut costs = vec![0.0; ncols];
    costs[..n].copy_from_slice(&lp.costs);
    let allowed: Vec<bool> = (0..ncols).map(|j| j < first_art).collect();
    if !tab.optimize(&costs, &allowed)? {
        return Ok(Outcome::Unbounded);
    }
    let mut x = vec![0.0; n];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < n {
            x[b] = tab.rhs(i);
        }
    }
    let value = lp.costs.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(Outcome::Optimal { x, value })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn optimal(out: Outcome) -> (Vec<f64>, f64) {
        match out {
            Outcome::Optimal { x, value } => (x, value),
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    #[test]
    fn textbook_maximization() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18  ->  36 at (2, 6)
        let mut lp = LinearProgram::new(2);
        lp.costs = vec![-3.0, -5.0];
        lp.push(&[(0, 1.0)], RowKind::Le, 4.0);
        lp.push(&[(1, 2.0)], RowKind::Le, 12.0);
        lp.push(&[(0, 3.0), (1, 2.0)], RowKind::Le, 18.0);
        let (x, v) = optimal(minimize(&lp).unwrap());
        assert!((v + 36.0).abs() < 1e-9);
        assert!((x[0] - 2.0).abs() < 1e-9 && (x[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn needs_phase_one() {
        // min x + y, x + y >= 2, x - y >= -1 (i.e. y <= x + 1), x <= 5
        let mut lp = LinearProgram::new(2);
        lp.costs = vec![1.0, 1.0];
        lp.push(&[(0, 1.0), (1, 1.0)], RowKind::Ge, 2.0);
        lp.push(&[(0, 1.0), (1, -1.0)], RowKind::Ge, -1.0);
        lp.push(&[(0, 1.0)], RowKind::Le, 5.0);
        let (_, v) = optimal(minimize(&lp).unwrap());
        assert!((v - 2.0).abs() < 1e-9);
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1);
        lp.costs = vec![1.0];
        lp.push(&[(0, 1.0)], RowKind::Ge, 2.0);
        lp.push(&[(0, 1.0)], RowKind::Le, 1.0);
        assert_eq!(minimize(&lp).unwrap(), Outcome::Infeasible);

        let mut lp = LinearProgram::new(1);
        lp.costs = vec![-1.0];
        lp.push(&[(0, 1.0)], RowKind::Ge, 0.0);
        assert_eq!(minimize(&lp).unwrap(), Outcome::Unbounded);
    }

    #[test]
    fn degenerate_redundant_rows() {
        // x = 1 written twice as a pair of inequalities
        let mut lp = LinearProgram::new(1);
        lp.costs = vec![2.0];
        for _ in 0..2 {
            lp.push(&[(0, 1.0)], RowKind::Ge, 1.0);
            lp.push(&[(0, 1.0)], RowKind::Le, 1.0);
        }
        let (x, v) = optimal(minimize(&lp).unwrap());
        assert!((x[0] - 1.0).abs() < 1e-12);
        assert!((v - 2.0).abs() < 1e-12);
    }
}
