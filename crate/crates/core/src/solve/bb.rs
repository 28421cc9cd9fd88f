//! Best-first branch-and-bound on the mode variables, with exhaustive
//! pattern enumeration as a fallback for short horizons.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::solve::model::{RelaxationModel, SolveReport};
use crate::solve::program::{MathProgram, ProgramSolution, Sense, Status};
use crate::solve::qp::solve_quadratic;
use crate::solve::simplex::solve_linear;

/// Longest horizon for which enumeration of all `2^T` patterns is allowed.
pub const MAX_ENUMERATION_HORIZON: usize = 12;
/// Node budget beyond the enumeration range.
pub const DEFAULT_NODE_LIMIT: usize = 200_000;
const INTEGRALITY_TOL: f64 = 1e-9;
const PRUNE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug)]
pub struct BbOptions {
    /// Switch to enumeration once this many nodes were solved (`T <= 12`
    /// only). Defaults to `4 * 2^T`.
    pub enumeration_after: Option<usize>,
    /// Give up with [`Status::IterLimit`] after this many nodes.
    pub node_limit: usize,
    pub allow_enumeration: bool,
}

impl Default for BbOptions {
    fn default() -> Self {
        BbOptions { enumeration_after: None, node_limit: DEFAULT_NODE_LIMIT, allow_enumeration: true }
    }
}

struct Node {
    bound: f64,
    id: usize,
    fixed: Vec<Option<bool>>,
    x: Vec<f64>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // max-heap: smallest bound first, then oldest node
    fn cmp(&self, other: &Self) -> Ordering {
        other.bound.total_cmp(&self.bound).then_with(|| other.id.cmp(&self.id))
    }
}

struct Relaxation<'a> {
    model: &'a RelaxationModel,
    base: MathProgram,
    sign: f64,
    solves: usize,
    iterations: usize,
}

impl<'a> Relaxation<'a> {
    fn new(model: &'a RelaxationModel) -> Result<Self> {
        if !model.with_mode {
            return Err(Error::Model("branch-and-bound needs mode variables".into()));
        }
        let base = model.to_program()?;
        let sign = if base.sense == Sense::Maximize { -1.0 } else { 1.0 };
        Ok(Relaxation { model, base, sign, solves: 0, iterations: 0 })
    }

    /// Solves with some modes fixed; returns the solution and its
    /// minimisation-form value.
    fn solve(&mut self, fixed: &[Option<bool>]) -> (ProgramSolution, f64) {
        let mut prog = self.base.clone();
        for (t, f) in fixed.iter().enumerate() {
            if let Some(v) = f {
                let col = self.model.mode(t + 1).expect("mode model");
                let v = if *v { 1.0 } else { 0.0 };
                prog.lower[col] = v;
                prog.upper[col] = v;
            }
        }
        let sol = if prog.hessian.is_some() { solve_quadratic(&prog) } else { solve_linear(&prog) };
        self.solves += 1;
        self.iterations += sol.iterations;
        let value = self.sign * sol.objective;
        (sol, value)
    }

    fn most_fractional(&self, x: &[f64]) -> Option<usize> {
        let n = self.model.num_periods;
        let mut best: Option<(usize, f64)> = None;
        for t in 0..n {
            let u = x[2 * n + t];
            let frac = (u - u.round()).abs();
            if frac > INTEGRALITY_TOL && best.is_none_or(|(_, f)| frac > f + 1e-12) {
                best = Some((t, frac));
            }
        }
        best.map(|(t, _)| t)
    }

    fn finish(
        &self,
        status: Status,
        best: Option<(f64, ProgramSolution)>,
        gap: Option<f64>,
        started: Instant,
    ) -> Result<SolveReport> {
        let mut rep = match best {
            Some((_, sol)) => {
                let mut sol = sol;
                sol.status = Status::Optimal;
                let mut rep = self.model.report(&sol, &self.base, started)?;
                rep.status = status;
                rep
            }
            None => SolveReport::empty(
                if status == Status::Optimal { Status::Infeasible } else { status },
                self.base.sense,
            ),
        };
        rep.nodes = Some(self.solves);
        rep.iterations = self.iterations;
        rep.gap = gap;
        rep.wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
        Ok(rep)
    }
}

pub fn solve_bb(model: &RelaxationModel) -> Result<SolveReport> {
    solve_bb_with(model, BbOptions::default())
}

pub fn solve_bb_with(model: &RelaxationModel, opts: BbOptions) -> Result<SolveReport> {
    let started = Instant::now();
    let n = model.num_periods;
    let mut rel = Relaxation::new(model)?;
    let can_enumerate = opts.allow_enumeration && n <= MAX_ENUMERATION_HORIZON;
    let switch_at = opts.enumeration_after.unwrap_or(4usize << n.min(MAX_ENUMERATION_HORIZON));

    let root_fixed = vec![None; n];
    let (root, root_val) = rel.solve(&root_fixed);
    match root.status {
        Status::Optimal => {}
        Status::Infeasible => return rel.finish(Status::Infeasible, None, None, started),
        other => return Err(Error::Solver(format!("root relaxation returned {other:?}"))),
    }
    let mut heap = BinaryHeap::new();
    let mut next_id = 1;
    heap.push(Node { bound: root_val, id: 0, fixed: root_fixed, x: root.x });
    let mut incumbent: Option<(f64, ProgramSolution)> = None;

    while let Some(node) = heap.pop() {
        let inc_val = incumbent.as_ref().map_or(f64::INFINITY, |(v, _)| *v);
        if node.bound >= inc_val - PRUNE_TOL {
            continue;
        }
        if can_enumerate && rel.solves > switch_at {
            let mut rep = enumerate_patterns(model)?;
            rep.nodes = Some(rel.solves + rep.nodes.unwrap_or(0));
            rep.wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
            return Ok(rep);
        }
        if rel.solves > opts.node_limit {
            let best_bound = node.bound.min(heap.iter().map(|n| n.bound).fold(f64::INFINITY, f64::min));
            let gap = incumbent.as_ref().map(|(v, _)| v - best_bound);
            return rel.finish(Status::IterLimit, incumbent, gap, started);
        }
        match rel.most_fractional(&node.x) {
            None => {
                // integral: re-solve with the modes pinned to clean up round-off
                let fixed: Vec<Option<bool>> =
                    (0..n).map(|t| Some(node.x[2 * n + t] > 0.5)).collect();
                let (sol, val) = rel.solve(&fixed);
                if sol.status == Status::Optimal && val < inc_val - PRUNE_TOL {
                    incumbent = Some((val, sol));
                }
            }
            Some(t) => {
                for branch in [false, true] {
                    let mut fixed = node.fixed.clone();
                    fixed[t] = Some(branch);
                    let (sol, val) = rel.solve(&fixed);
                    let inc_val = incumbent.as_ref().map_or(f64::INFINITY, |(v, _)| *v);
                    if sol.status == Status::Optimal && val < inc_val - PRUNE_TOL {
                        heap.push(Node { bound: val, id: next_id, fixed, x: sol.x });
                        next_id += 1;
                    }
                }
            }
        }
    }
    let gap = incumbent.as_ref().map(|_| 0.0);
    rel.finish(Status::Optimal, incumbent, gap, started)
}

/// Solves every one of the `2^T` fixed-mode problems and keeps the best.
pub fn enumerate_patterns(model: &RelaxationModel) -> Result<SolveReport> {
    let started = Instant::now();
    let n = model.num_periods;
    if n > MAX_ENUMERATION_HORIZON {
        return Err(Error::HorizonTooLarge { horizon: n, max: MAX_ENUMERATION_HORIZON });
    }
    let mut rel = Relaxation::new(model)?;
    let mut best: Option<(f64, ProgramSolution)> = None;
    for mask in 0..1usize << n {
        let fixed: Vec<Option<bool>> = (0..n).map(|t| Some(mask >> t & 1 == 1)).collect();
        let (sol, val) = rel.solve(&fixed);
        if sol.status == Status::Optimal && best.as_ref().is_none_or(|(v, _)| val < *v - 1e-12) {
            best = Some((val, sol));
        }
    }
    let gap = best.as_ref().map(|_| 0.0);
    rel.finish(Status::Optimal, best, gap, started)
}
