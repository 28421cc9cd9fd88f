//! Log-barrier interior-point method for the tracking relaxation written with
//! explicit epigraph variables `z_t` and one second-order cone per period.
//!
//! Used as an independent check on the substituted cylinder QP: it shares no
//! code with the active-set solver and works from the norm-form cone data.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};

use crate::battery::BatteryParams;
use crate::cuts::redundancy::redundancy_filter;
use crate::cuts::{gen_window_cuts, LinearCut};
use crate::error::{Error, Result};
use crate::soc::{soc_cut, SocCutData};
use crate::solve::program::{Cmp, MathProgram, Row, Sense, Status};
use crate::solve::simplex::solve_linear;

/// `min sum_t z_t` over linear cuts on the powers and per-period cones.
#[derive(Clone, Debug)]
pub struct ConicModel {
    pub params: BatteryParams,
    pub cones: Vec<SocCutData>,
    pub cuts: Vec<LinearCut>,
}

impl ConicModel {
    /// Window-cut polytope with one cone per period.
    pub fn tracking(params: &BatteryParams, setpoints: &[f64]) -> Result<Self> {
        params.validate()?;
        if setpoints.len() != params.horizon {
            return Err(Error::LengthMismatch { expected: params.horizon, got: setpoints.len() });
        }
        Ok(ConicModel {
            params: params.clone(),
            cones: setpoints.iter().map(|&s| soc_cut(s)).collect(),
            cuts: redundancy_filter(gen_window_cuts(params), params),
        })
    }
}

#[derive(Clone, Debug)]
pub struct ConicSolution {
    pub status: Status,
    pub objective: f64,
    pub p_ch: Vec<f64>,
    pub p_dis: Vec<f64>,
    pub z: Vec<f64>,
    pub newton_steps: usize,
    /// Duality-gap bound `m / t` at termination.
    pub gap_bound: f64,
    pub wall_time_ms: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct BarrierOptions {
    pub gap_tol: f64,
    pub t0: f64,
    pub growth: f64,
    pub max_newton: usize,
}

impl Default for BarrierOptions {
    fn default() -> Self {
        BarrierOptions { gap_tol: 1e-10, t0: 1.0, growth: 10.0, max_newton: 200 }
    }
}

struct Problem {
    n: usize,
    /// Free columns of the full `(p_ch, p_dis, z)` vector.
    cols: Vec<usize>,
    rows: Vec<(DVector<f64>, f64)>,
    /// Per cone: reduced indices of `(pd, pc, z)`, or `None` for a frozen power.
    cone_idx: Vec<[Option<usize>; 3]>,
    cones: Vec<SocCutData>,
    cost: DVector<f64>,
}

impl Problem {
    fn cone_terms(&self, k: usize, x: &DVector<f64>) -> (f64, [f64; 3], f64) {
        let d = &self.cones[k];
        let y: [f64; 3] = std::array::from_fn(|i| self.cone_idx[k][i].map_or(0.0, |j| x[j]));
        let a = [d.mat_a[(0, 0)], d.mat_a[(0, 1)], d.mat_a[(0, 2)]];
        let b = [d.vec_b[0], d.vec_b[1], d.vec_b[2]];
        let ay: f64 = (0..3).map(|i| a[i] * y[i]).sum();
        let by: f64 = (0..3).map(|i| b[i] * y[i]).sum();
        // u^2 - |v|^2 of the norm form
        let s = -(by + d.scal_c) - ay * ay;
        let grad: [f64; 3] = std::array::from_fn(|i| -b[i] - 2.0 * ay * a[i]);
        (s, grad, ay)
    }

    /// Barrier value, or `None` outside the domain.
    fn barrier(&self, x: &DVector<f64>) -> Option<f64> {
        let mut v = 0.0;
        for (g, h) in &self.rows {
            let slack = h - g.dot(x);
            if slack <= 0.0 {
                return None;
            }
            v -= slack.ln();
        }
        for k in 0..self.cones.len() {
            let (s, _, _) = self.cone_terms(k, x);
            if s <= 0.0 {
                return None;
            }
            v -= s.ln();
        }
        Some(v)
    }

    fn grad_hess(&self, x: &DVector<f64>, t: f64) -> (DVector<f64>, DMatrix<f64>) {
        let mut g = &self.cost * t;
        let mut h = DMatrix::zeros(self.n, self.n);
        for (row, rhs) in &self.rows {
            let slack = rhs - row.dot(x);
            g += row / slack;
            h.ger(1.0 / (slack * slack), row, row, 1.0);
        }
        for k in 0..self.cones.len() {
            let (s, ds, _) = self.cone_terms(k, x);
            let d = &self.cones[k];
            let idx = self.cone_idx[k];
            for i in 0..3 {
                let Some(ci) = idx[i] else { continue };
                g[ci] -= ds[i] / s;
                for j in 0..3 {
                    let Some(cj) = idx[j] else { continue };
                    h[(ci, cj)] += ds[i] * ds[j] / (s * s) + 2.0 * d.mat_a[(0, i)] * d.mat_a[(0, j)] / s;
                }
            }
        }
        (g, h)
    }
}

pub fn solve_conic(model: &ConicModel) -> Result<ConicSolution> {
    solve_conic_with(model, BarrierOptions::default())
}

pub fn solve_conic_with(model: &ConicModel, opts: BarrierOptions) -> Result<ConicSolution> {
    let started = Instant::now();
    let n_per = model.params.horizon;
    if model.cones.len() != n_per {
        return Err(Error::LengthMismatch { expected: n_per, got: model.cones.len() });
    }
    let scale = 1.0 + model.params.p_ch_max.max(model.params.p_dis_max);
    let cut_rows: Vec<Row> = model.cuts.iter().map(|c| c.to_row(0, n_per, None)).collect();

    // powers the cuts pin at zero have no interior; fix them
    let mut lp = MathProgram::new(2 * n_per, Sense::Maximize);
    lp.rows = cut_rows.clone();
    let mut frozen = vec![false; 2 * n_per];
    for (j, fz) in frozen.iter_mut().enumerate() {
        lp.linear = vec![0.0; 2 * n_per];
        lp.linear[j] = 1.0;
        let sol = solve_linear(&lp);
        match sol.status {
            Status::Optimal => *fz = sol.objective <= 1e-12 * scale,
            Status::Infeasible => return Ok(failed(Status::Infeasible, n_per, started)),
            other => return Err(Error::Solver(format!("bounding LP returned {other:?}"))),
        }
    }
    let free_p: Vec<usize> = (0..2 * n_per).filter(|&j| !frozen[j]).collect();
    let mut pos = vec![None; 3 * n_per];
    let mut cols = Vec::new();
    for &j in free_p.iter().chain(&(2 * n_per..3 * n_per).collect::<Vec<_>>()) {
        pos[j] = Some(cols.len());
        cols.push(j);
    }
    let n = cols.len();

    // reduced linear rows, including p >= 0
    let mut rows = Vec::new();
    for r in &cut_rows {
        let mut g = DVector::zeros(n);
        for &(j, a) in &r.coeffs {
            if let Some(c) = pos[j] {
                g[c] += a;
            }
        }
        if g.iter().all(|&v| v == 0.0) {
            if r.rhs < -1e-9 * scale {
                return Ok(failed(Status::Infeasible, n_per, started));
            }
            continue;
        }
        rows.push((g, r.rhs));
    }
    for &j in &free_p {
        let mut g = DVector::zeros(n);
        g[pos[j].unwrap()] = -1.0;
        rows.push((g, 0.0));
    }

    // phase I: maximise the smallest normalised slack over the powers
    let np = free_p.len();
    let mut ph1 = MathProgram::new(np + 1, Sense::Maximize);
    ph1.linear[np] = 1.0;
    ph1.upper[np] = 1.0;
    for (g, h) in &rows {
        let norm = g.norm();
        let mut coeffs: Vec<(usize, f64)> =
            (0..np).filter(|&i| g[i] != 0.0).map(|i| (i, g[i])).collect();
        coeffs.push((np, norm));
        ph1.rows.push(Row::new(coeffs, Cmp::Le, *h));
    }
    let sol = solve_linear(&ph1);
    if sol.status != Status::Optimal {
        return Err(Error::Solver(format!("phase I returned {:?}", sol.status)));
    }
    if sol.x[np] <= 1e-9 {
        return Err(Error::Solver("cut polytope has no interior after fixing zero powers".into()));
    }

    let cone_idx: Vec<[Option<usize>; 3]> =
        (0..n_per).map(|t| [pos[n_per + t], pos[t], pos[2 * n_per + t]]).collect();
    let mut cost = DVector::zeros(n);
    for t in 0..n_per {
        cost[pos[2 * n_per + t].unwrap()] = 1.0;
    }
    let prob = Problem { n, cols, rows, cone_idx, cones: model.cones.clone(), cost };

    let mut x = DVector::zeros(n);
    for i in 0..np {
        x[i] = sol.x[i];
    }
    for t in 0..n_per {
        let zc = prob.cone_idx[t][2].unwrap();
        x[zc] = 0.0;
        let (s, _, _) = prob.cone_terms(t, &x);
        // s is affine in z with unit slope
        x[zc] = 1.0 - s;
    }

    let m = (prob.rows.len() + n_per) as f64;
    let mut t = opts.t0;
    let mut steps = 0;
    loop {
        // centring
        for _ in 0..opts.max_newton {
            let (g, h) = prob.grad_hess(&x, t);
            let dx = match h.clone().cholesky() {
                Some(ch) => ch.solve(&(-&g)),
                None => match h.lu().solve(&(-&g)) {
                    Some(d) => d,
                    None => return Err(Error::Solver("singular barrier Hessian".into())),
                },
            };
            let decrement = -g.dot(&dx);
            steps += 1;
            if decrement / 2.0 <= 1e-12 {
                break;
            }
            let f0 = t * prob.cost.dot(&x) + prob.barrier(&x).expect("iterate stays interior");
            let mut step = 1.0;
            let mut moved = false;
            for _ in 0..60 {
                let trial = &x + &dx * step;
                if let Some(b) = prob.barrier(&trial) {
                    if t * prob.cost.dot(&trial) + b <= f0 - 0.25 * step * decrement {
                        x = trial;
                        moved = true;
                        break;
                    }
                }
                step *= 0.5;
            }
            if !moved {
                break;
            }
        }
        if m / t < opts.gap_tol {
            break;
        }
        t *= opts.growth;
    }

    let mut full = vec![0.0; 3 * n_per];
    for (i, &c) in prob.cols.iter().enumerate() {
        full[c] = x[i];
    }
    let z = full[2 * n_per..].to_vec();
    Ok(ConicSolution {
        status: Status::Optimal,
        objective: z.iter().sum(),
        p_ch: full[..n_per].to_vec(),
        p_dis: full[n_per..2 * n_per].to_vec(),
        z,
        newton_steps: steps,
        gap_bound: m / t,
        wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

fn failed(status: Status, n: usize, started: Instant) -> ConicSolution {
    ConicSolution {
        status,
        objective: f64::NAN,
        p_ch: vec![f64::NAN; n],
        p_dis: vec![f64::NAN; n],
        z: vec![f64::NAN; n],
        newton_steps: 0,
        gap_bound: f64::NAN,
        wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
    }
}
