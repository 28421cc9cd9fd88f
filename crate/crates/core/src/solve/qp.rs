//! Primal active-set method for convex QPs with a positive semidefinite
//! Hessian.
//!
//! Each iteration works in an orthonormal basis `Z` of the null space of the
//! working rows. The reduced Hessian may be singular: when the reduced
//! gradient has a component along a zero-curvature direction the step follows
//! that direction until a constraint blocks; otherwise a pseudo-inverse Newton
//! step is taken. A zero step triggers the multiplier test.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::program::{Cmp, MathProgram, ProgramSolution, Row, Sense, Status};
use super::simplex::solve_linear;

struct Constraints {
    /// Inequalities `g_i . x <= h_i`.
    ineq: Vec<DVector<f64>>,
    ineq_rhs: Vec<f64>,
    eq: Vec<DVector<f64>>,
    eq_rhs: Vec<f64>,
}

fn dense(row: &Row, n: usize, sign: f64) -> DVector<f64> {
    let mut v = DVector::zeros(n);
    for &(j, a) in &row.coeffs {
        v[j] += sign * a;
    }
    v
}

fn collect(prog: &MathProgram) -> Constraints {
    let n = prog.num_vars;
    let mut c = Constraints { ineq: vec![], ineq_rhs: vec![], eq: vec![], eq_rhs: vec![] };
    for row in &prog.rows {
        match row.cmp {
            Cmp::Le => {
                c.ineq.push(dense(row, n, 1.0));
                c.ineq_rhs.push(row.rhs);
            }
            Cmp::Ge => {
                c.ineq.push(dense(row, n, -1.0));
                c.ineq_rhs.push(-row.rhs);
            }
            Cmp::Eq => {
                c.eq.push(dense(row, n, 1.0));
                c.eq_rhs.push(row.rhs);
            }
        }
    }
    for j in 0..n {
        let mut e = DVector::zeros(n);
        e[j] = -1.0;
        c.ineq.push(e);
        c.ineq_rhs.push(-prog.lower[j]);
        if prog.upper[j].is_finite() {
            let mut e = DVector::zeros(n);
            e[j] = 1.0;
            c.ineq.push(e);
            c.ineq_rhs.push(prog.upper[j]);
        }
    }
    c
}

/// Orthonormal basis of the span of `rows`; returns the basis and the
/// indices of rows that were independent.
fn orthonormal_rows(rows: &[&DVector<f64>]) -> (Vec<DVector<f64>>, Vec<usize>) {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut kept = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        let norm0 = r.norm();
        if norm0 == 0.0 {
            continue;
        }
        let mut v = (*r).clone() / norm0;
        for _ in 0..2 {
            for q in &basis {
                let p = q.dot(&v);
                v.axpy(-p, q, 1.0);
            }
        }
        let nv = v.norm();
        if nv > 1e-9 {
            basis.push(v / nv);
            kept.push(i);
        }
    }
    (basis, kept)
}

fn null_space(n: usize, row_basis: &[DVector<f64>]) -> DMatrix<f64> {
    let target = n - row_basis.len();
    let mut cols: Vec<DVector<f64>> = Vec::with_capacity(target);
    for j in 0..n {
        if cols.len() == target {
            break;
        }
        let mut v = DVector::zeros(n);
        v[j] = 1.0;
        for _ in 0..2 {
            for q in row_basis.iter().chain(cols.iter()) {
                let p = q.dot(&v);
                v.axpy(-p, q, 1.0);
            }
        }
        let nv = v.norm();
        if nv > 1e-6 {
            cols.push(v / nv);
        }
    }
    if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Least-squares multipliers `mu` with `grad + A' mu ~ 0`.
fn multipliers(rows: &[&DVector<f64>], grad: &DVector<f64>) -> Option<DVector<f64>> {
    let k = rows.len();
    if k == 0 {
        return Some(DVector::zeros(0));
    }
    let a = DMatrix::from_fn(k, grad.len(), |i, j| rows[i][j]);
    let lhs = &a * a.transpose();
    let rhs = -(&a * grad);
    lhs.clone().cholesky().map(|c| c.solve(&rhs)).or_else(|| lhs.lu().solve(&rhs))
}

/// Minimises `1/2 x'Hx + g'x` over the program's polyhedron.
pub fn solve_quadratic(prog: &MathProgram) -> ProgramSolution {
    assert_eq!(prog.sense, Sense::Minimize, "QP engine minimises");
    let n = prog.num_vars;
    let h = prog.hessian.clone().unwrap_or_else(|| DMatrix::zeros(n, n));
    let g = DVector::from_column_slice(&prog.linear);
    let cons = collect(prog);
    let m = cons.ineq.len();

    // feasible vertex from the LP with the linear part of the objective
    let mut start = prog.clone();
    start.hessian = None;
    let lp = solve_linear(&start);
    let start_x = match lp.status {
        Status::Optimal => lp.x,
        Status::Unbounded => {
            start.linear = vec![0.0; n];
            let lp0 = solve_linear(&start);
            if lp0.status != Status::Optimal {
                return ProgramSolution::failed(lp0.status, n, lp0.iterations);
            }
            lp0.x
        }
        other => return ProgramSolution::failed(other, n, lp.iterations),
    };
    let mut x = DVector::from_vec(start_x);

    let hscale = 1.0 + h.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let act_tol = |i: usize| 1e-9 * (1.0 + cons.ineq_rhs[i].abs());

    let mut working: Vec<usize> = Vec::new();
    {
        let mut cand: Vec<&DVector<f64>> = cons.eq.iter().collect();
        let active: Vec<usize> = (0..m)
            .filter(|&i| (cons.ineq_rhs[i] - cons.ineq[i].dot(&x)).abs() <= act_tol(i))
            .collect();
        let base = cand.len();
        for &i in &active {
            cand.push(&cons.ineq[i]);
        }
        let (_, kept) = orthonormal_rows(&cand);
        working.extend(kept.into_iter().filter(|&k| k >= base).map(|k| active[k - base]));
    }

    let max_iter = 50 * (n + m).max(1);
    let mut iterations = 0;
    let mut status = Status::IterLimit;
    let mut final_residual = None;
    let mut in_work = vec![false; m];
    for &i in &working {
        in_work[i] = true;
    }

    while iterations < max_iter {
        iterations += 1;
        let grad = &h * &x + &g;
        let rows: Vec<&DVector<f64>> =
            cons.eq.iter().chain(working.iter().map(|&i| &cons.ineq[i])).collect();
        let (row_basis, _) = orthonormal_rows(&rows);
        let z = null_space(n, &row_basis);

        let mut d = DVector::zeros(n);
        let mut full_step = 1.0;
        if z.ncols() > 0 {
            let hr = z.transpose() * &h * &z;
            let gr = z.transpose() * &grad;
            let eig = SymmetricEigen::new(hr);
            let gtol = 1e-11 * (1.0 + grad.amax());
            let etol = 1e-9 * hscale;
            let mut y = DVector::zeros(z.ncols());
            let mut flat = false;
            for (k, &lam) in eig.eigenvalues.iter().enumerate() {
                let v = eig.eigenvectors.column(k);
                let gamma = v.dot(&gr);
                if lam <= etol && gamma.abs() > gtol {
                    flat = true;
                    y.axpy(-gamma, &v, 1.0);
                }
            }
            if flat {
                full_step = f64::INFINITY;
            } else {
                for (k, &lam) in eig.eigenvalues.iter().enumerate() {
                    if lam > etol {
                        let v = eig.eigenvectors.column(k);
                        y.axpy(-v.dot(&gr) / lam, &v, 1.0);
                    }
                }
            }
            d = &z * y;
        }

        if d.amax() <= 1e-12 * (1.0 + x.amax()) {
            let mu = match multipliers(&rows, &grad) {
                Some(mu) => mu,
                None => {
                    status = Status::IterLimit;
                    break;
                }
            };
            let ne = cons.eq.len();
            let mut residual = grad.clone();
            for (k, r) in rows.iter().enumerate() {
                residual.axpy(mu[k], r, 1.0);
            }
            let mtol = 1e-9 * (1.0 + grad.amax());
            let worst = (0..working.len())
                .map(|k| (k, mu[ne + k]))
                .filter(|&(_, v)| v < -mtol)
                .min_by(|a, b| a.1.total_cmp(&b.1).then(working[a.0].cmp(&working[b.0])));
            match worst {
                None => {
                    status = Status::Optimal;
                    final_residual = Some(residual.amax());
                    break;
                }
                Some((k, _)) => {
                    in_work[working[k]] = false;
                    working.remove(k);
                    continue;
                }
            }
        }

        let dn = d.norm();
        let mut alpha = full_step;
        let mut blocking: Option<usize> = None;
        for i in 0..m {
            if in_work[i] {
                continue;
            }
            let gd = cons.ineq[i].dot(&d);
            if gd <= 1e-12 * cons.ineq[i].norm() * dn {
                continue;
            }
            let slack = (cons.ineq_rhs[i] - cons.ineq[i].dot(&x)).max(0.0);
            let a = slack / gd;
            if a < alpha {
                alpha = a;
                blocking = Some(i);
            }
        }
        if !alpha.is_finite() {
            status = Status::Unbounded;
            break;
        }
        x.axpy(alpha, &d, 1.0);
        if let Some(i) = blocking {
            working.push(i);
            in_work[i] = true;
        }
    }

    if status != Status::Optimal {
        return ProgramSolution::failed(status, n, iterations);
    }
    let xs: Vec<f64> = x.iter().copied().collect();
    ProgramSolution {
        status,
        objective: prog.objective_value(&xs),
        x: xs,
        iterations,
        kkt_residual: final_residual,
    }
}
