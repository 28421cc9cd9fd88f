//! Dense two-phase tableau simplex.
//!
//! Variables are shifted to their lower bounds, finite upper bounds become
//! rows, rows are sign-normalised so every right-hand side is nonnegative.
//! Phase one minimises the sum of artificials; phase two optimises the real
//! objective. Dantzig pricing switches permanently to Bland's rule after
//! `3 * cols` consecutive pivots without objective progress.

use nalgebra::{DMatrix, DVector};

use super::program::{Cmp, MathProgram, ProgramSolution, Sense, Status};

const PIVOT_TOL: f64 = 1e-10;
const COST_TOL: f64 = 1e-10;
const FEAS_TOL: f64 = 1e-8;

struct Tableau {
    rows: usize,
    /// Structural plus slack/surplus plus artificial columns.
    cols: usize,
    /// Row-major `rows x (cols + 1)`; last column holds the basic values.
    data: Vec<f64>,
    basis: Vec<usize>,
    /// Columns that may no longer enter (artificials after phase one).
    barred: Vec<bool>,
    iterations: usize,
    max_iterations: usize,
}

impl Tableau {
    fn width(&self) -> usize {
        self.cols + 1
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.width() + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.cols)
    }

    fn pivot(&mut self, r: usize, e: usize, cost_row: &mut [f64]) {
        let w = self.width();
        let piv = self.data[r * w + e];
        {
            let row = &mut self.data[r * w..(r + 1) * w];
            for v in row.iter_mut() {
                *v /= piv;
            }
            row[e] = 1.0;
        }
        let pivot_row: Vec<f64> = self.data[r * w..(r + 1) * w].to_vec();
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.data[i * w + e];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.data[i * w..(i + 1) * w];
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                *v -= f * p;
            }
            row[e] = 0.0;
        }
        let f = cost_row[e];
        if f != 0.0 {
            for (v, p) in cost_row.iter_mut().zip(&pivot_row) {
                *v -= f * p;
            }
            cost_row[e] = 0.0;
        }
        self.basis[r] = e;
        self.iterations += 1;
    }

    /// Reduced-cost row for maximising `cost . y`: entry j is
    /// `c_j - c_B B^-1 A_j`, and the last entry is `-c_B B^-1 b`.
    fn cost_row(&self, cost: &[f64]) -> Vec<f64> {
        let w = self.width();
        let mut row = vec![0.0; w];
        row[..self.cols].copy_from_slice(&cost[..self.cols]);
        for i in 0..self.rows {
            let cb = cost[self.basis[i]];
            if cb == 0.0 {
                continue;
            }
            for j in 0..w {
                row[j] -= cb * self.data[i * w + j];
            }
        }
        row
    }

    /// Maximises `cost . y` from the current basis.
    fn optimize(&mut self, cost: &[f64]) -> Status {
        let mut cost_row = self.cost_row(cost);
        let scale = 1.0 + cost.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let mut bland = false;
        let mut stalled = 0usize;
        let stall_limit = 3 * self.cols;
        loop {
            if self.iterations >= self.max_iterations {
                return Status::IterLimit;
            }
            let entering = if bland {
                (0..self.cols).find(|&j| !self.barred[j] && cost_row[j] > COST_TOL * scale)
            } else {
                let mut best: Option<(usize, f64)> = None;
                for j in 0..self.cols {
                    if self.barred[j] || cost_row[j] <= COST_TOL * scale {
                        continue;
                    }
                    if best.is_none_or(|(_, v)| cost_row[j] > v) {
                        best = Some((j, cost_row[j]));
                    }
                }
                best.map(|(j, _)| j)
            };
            let Some(e) = entering else {
                return Status::Optimal;
            };

            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let a = self.at(i, e);
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs(i).max(0.0) / a;
                match leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        let tie = (ratio - lr).abs() <= 1e-12 * (1.0 + lr.abs());
                        let better = if tie {
                            if bland {
                                self.basis[i] < self.basis[li]
                            } else {
                                a > self.at(li, e)
                            }
                        } else {
                            ratio < lr
                        };
                        if better {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
            let Some((r, ratio)) = leave else {
                return Status::Unbounded;
            };
            if ratio * cost_row[e] <= 1e-12 * scale {
                stalled += 1;
                if stalled > stall_limit {
                    bland = true;
                }
            } else {
                stalled = 0;
            }
            self.pivot(r, e, &mut cost_row);
        }
    }
}

/// Solves a linear program. A quadratic term, if present, is ignored by
/// callers' contract and rejected here.
pub fn solve_linear(prog: &MathProgram) -> ProgramSolution {
    assert!(prog.hessian.is_none(), "solve_linear called with a quadratic objective");
    let n = prog.num_vars;

    // shifted rows: (dense coeffs over n, cmp, rhs)
    let mut rows: Vec<(Vec<f64>, Cmp, f64)> = Vec::with_capacity(prog.rows.len() + n);
    for j in 0..n {
        if prog.upper[j] < prog.lower[j] - FEAS_TOL {
            return ProgramSolution::failed(Status::Infeasible, n, 0);
        }
    }
    for row in &prog.rows {
        let mut a = vec![0.0; n];
        let mut rhs = row.rhs;
        for &(j, v) in &row.coeffs {
            a[j] += v;
            rhs -= v * prog.lower[j];
        }
        rows.push((a, row.cmp, rhs));
    }
    for j in 0..n {
        if prog.upper[j].is_finite() {
            let mut a = vec![0.0; n];
            a[j] = 1.0;
            rows.push((a, Cmp::Le, (prog.upper[j] - prog.lower[j]).max(0.0)));
        }
    }
    for (a, cmp, rhs) in rows.iter_mut() {
        if *rhs < 0.0 {
            a.iter_mut().for_each(|v| *v = -*v);
            *rhs = -*rhs;
            *cmp = match *cmp {
                Cmp::Le => Cmp::Ge,
                Cmp::Ge => Cmp::Le,
                Cmp::Eq => Cmp::Eq,
            };
        }
    }

    let m = rows.len();
    let n_slack = rows.iter().filter(|r| r.1 != Cmp::Eq).count();
    let n_art = rows.iter().filter(|r| r.1 != Cmp::Le).count();
    let cols = n + n_slack + n_art;
    let w = cols + 1;
    let mut data = vec![0.0; m * w];
    let mut basis = vec![0; m];
    let mut is_art = vec![false; cols];
    let (mut next_slack, mut next_art) = (n, n + n_slack);
    for (i, (a, cmp, rhs)) in rows.iter().enumerate() {
        data[i * w..i * w + n].copy_from_slice(a);
        data[i * w + cols] = *rhs;
        match cmp {
            Cmp::Le => {
                data[i * w + next_slack] = 1.0;
                basis[i] = next_slack;
                next_slack += 1;
            }
            Cmp::Ge => {
                data[i * w + next_slack] = -1.0;
                next_slack += 1;
                data[i * w + next_art] = 1.0;
                basis[i] = next_art;
                is_art[next_art] = true;
                next_art += 1;
            }
            Cmp::Eq => {
                data[i * w + next_art] = 1.0;
                basis[i] = next_art;
                is_art[next_art] = true;
                next_art += 1;
            }
        }
    }
    let original = data.clone();
    let mut tab = Tableau {
        rows: m,
        cols,
        data,
        basis,
        barred: vec![false; cols],
        iterations: 0,
        max_iterations: 50 * (m + cols).max(1),
    };

    if n_art > 0 {
        let phase1: Vec<f64> = (0..cols).map(|j| if is_art[j] { -1.0 } else { 0.0 }).collect();
        let st = tab.optimize(&phase1);
        if st == Status::IterLimit {
            return ProgramSolution::failed(Status::IterLimit, n, tab.iterations);
        }
        let infeas: f64 = (0..m)
            .filter(|&i| is_art[tab.basis[i]])
            .map(|i| tab.rhs(i))
            .sum();
        let bscale = 1.0 + rows.iter().fold(0.0f64, |acc, r| acc.max(r.2.abs()));
        if infeas > FEAS_TOL * bscale {
            return ProgramSolution::failed(Status::Infeasible, n, tab.iterations);
        }
        // drive remaining artificials out of the basis
        let mut dummy = vec![0.0; w];
        for i in 0..m {
            if !is_art[tab.basis[i]] {
                continue;
            }
            let pick = (0..cols)
                .filter(|&j| !is_art[j])
                .max_by(|&a, &b| tab.at(i, a).abs().total_cmp(&tab.at(i, b).abs()));
            if let Some(j) = pick {
                if tab.at(i, j).abs() > 1e-9 {
                    tab.pivot(i, j, &mut dummy);
                }
            }
        }
        for j in 0..cols {
            if is_art[j] {
                tab.barred[j] = true;
            }
        }
    }

    let sign = match prog.sense {
        Sense::Maximize => 1.0,
        Sense::Minimize => -1.0,
    };
    let mut cost = vec![0.0; cols];
    for j in 0..n {
        cost[j] = sign * prog.linear[j];
    }
    let status = tab.optimize(&cost);
    if status != Status::Optimal {
        return ProgramSolution::failed(status, n, tab.iterations);
    }

    let mut y = vec![0.0; cols];
    for i in 0..m {
        y[tab.basis[i]] = tab.rhs(i);
    }
    polish(&original, m, cols, &tab.basis, &is_art, &mut y);
    let x: Vec<f64> = (0..n).map(|j| prog.lower[j] + y[j].max(0.0)).collect();
    ProgramSolution {
        status: Status::Optimal,
        objective: prog.objective_value(&x),
        x,
        iterations: tab.iterations,
        kkt_residual: None,
    }
}

/// Recomputes basic values from the original rows with a fresh LU solve.
fn polish(original: &[f64], m: usize, cols: usize, basis: &[usize], is_art: &[bool], y: &mut [f64]) {
    let w = cols + 1;
    // rows whose basic variable is still artificial are redundant; drop them
    let live: Vec<usize> = (0..m).filter(|&i| !is_art[basis[i]]).collect();
    let k = live.len();
    if k == 0 {
        return;
    }
    let bcols: Vec<usize> = live.iter().map(|&i| basis[i]).collect();
    let mut bmat = DMatrix::zeros(k, k);
    let mut rhs = DVector::zeros(k);
    for (r, &i) in live.iter().enumerate() {
        for (c, &j) in bcols.iter().enumerate() {
            bmat[(r, c)] = original[i * w + j];
        }
        rhs[r] = original[i * w + cols];
    }
    if let Some(sol) = bmat.lu().solve(&rhs) {
        let drift = bcols
            .iter()
            .enumerate()
            .map(|(c, &j)| (sol[c] - y[j]).abs())
            .fold(0.0, f64::max);
        if sol.iter().all(|v| v.is_finite()) && drift < 1e-6 {
            for (c, &j) in bcols.iter().enumerate() {
                y[j] = sol[c];
            }
        }
    }
}
