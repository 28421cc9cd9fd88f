//! Single-battery optimisation models and the named relaxation presets.
//!
//! Variable layout: `p_ch` in `0..T`, `p_dis` in `T..2T`, then `u` in
//! `2T..3T` when the model carries a mode variable.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::battery::{simulate_soc, violation_metrics, BatteryParams, Trajectory};
use crate::cuts::redundancy::redundancy_filter;
use crate::cuts::{gen_pozo_cuts, gen_u_cuts, gen_window_cuts, LinearCut};
use crate::error::{Error, Result};
use crate::solve::program::{Cmp, MathProgram, ProgramSolution, Row, Sense, Status};
use crate::solve::qp::solve_quadratic;
use crate::solve::simplex::solve_linear;

/// Complementarity threshold used for [`SolveReport::violation`] (kW^2).
pub const DEFAULT_THRESHOLD: f64 = 1e-4;
/// Row feasibility required of an optimal report.
pub const REPORT_FEAS_TOL: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq)]
pub enum Objective {
    /// `sum_t prices_t (p_dis_t - p_ch_t)` in the given sense.
    Linear { prices: Vec<f64>, sense: Sense },
    /// `sum_t (p_dis_t - p_ch_t - ps_t)^2`, minimised.
    TrackingQP { setpoints: Vec<f64> },
    /// `sum_t [(p_dis_t - p_ch_t - ps_t)^2 + 4 p_dis_t p_ch_t]`, minimised.
    TrackingCylinderQP { setpoints: Vec<f64> },
}

impl Objective {
    pub fn is_quadratic(&self) -> bool {
        !matches!(self, Objective::Linear { .. })
    }

    pub fn sense(&self) -> Sense {
        match self {
            Objective::Linear { sense, .. } => *sense,
            _ => Sense::Minimize,
        }
    }

    fn series(&self) -> &[f64] {
        match self {
            Objective::Linear { prices, .. } => prices,
            Objective::TrackingQP { setpoints } | Objective::TrackingCylinderQP { setpoints } => setpoints,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RelaxationModel {
    pub params: BatteryParams,
    pub num_periods: usize,
    pub with_mode: bool,
    /// Branch on `u` instead of relaxing it.
    pub integral_mode: bool,
    /// `p_ch <= P_ch u` and `p_dis <= P_dis (1 - u)`.
    pub mode_linking: bool,
    /// Native SoC bounds on the cumulative energy balance.
    pub soc_chain: bool,
    pub linear_cuts: Vec<LinearCut>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub objective: Objective,
}

impl RelaxationModel {
    /// Bare model over nonnegative powers with no constraints besides
    /// `lower`/`upper`.
    pub fn new(params: &BatteryParams, with_mode: bool, objective: Objective) -> Self {
        let n = params.horizon;
        let num_vars = if with_mode { 3 * n } else { 2 * n };
        let mut upper = vec![f64::INFINITY; num_vars];
        if with_mode {
            upper[2 * n..].fill(1.0);
        }
        RelaxationModel {
            params: params.clone(),
            num_periods: n,
            with_mode,
            integral_mode: false,
            mode_linking: false,
            soc_chain: false,
            linear_cuts: Vec::new(),
            lower: vec![0.0; num_vars],
            upper,
            objective,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.lower.len()
    }

    /// Column of `p_ch` in period `t` (1-based).
    pub fn ch(&self, t: usize) -> usize {
        t - 1
    }

    pub fn dis(&self, t: usize) -> usize {
        self.num_periods + t - 1
    }

    pub fn mode(&self, t: usize) -> Option<usize> {
        self.with_mode.then(|| 2 * self.num_periods + t - 1)
    }

    fn mode_offset(&self) -> Option<usize> {
        self.with_mode.then_some(2 * self.num_periods)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_periods;
        if self.objective.series().len() != n {
            return Err(Error::LengthMismatch { expected: n, got: self.objective.series().len() });
        }
        if (self.integral_mode || self.mode_linking) && !self.with_mode {
            return Err(Error::Model("mode constraints need mode variables".into()));
        }
        for cut in &self.linear_cuts {
            if !self.with_mode && !cut.coeff_u.is_empty() {
                return Err(Error::Model(format!("{} cut uses u but the model has none", cut.family)));
            }
            if cut.terms().any(|(_, k, _)| k == 0 || k > n) {
                return Err(Error::Model(format!("{} cut references a period outside 1..={n}", cut.family)));
            }
        }
        Ok(())
    }

    pub fn to_program(&self) -> Result<MathProgram> {
        self.validate()?;
        let n = self.num_periods;
        let p = &self.params;
        let mut prog = MathProgram::new(self.num_vars(), self.objective.sense());
        prog.lower = self.lower.clone();
        prog.upper = self.upper.clone();
        for cut in &self.linear_cuts {
            prog.rows.push(cut.to_row(0, n, self.mode_offset()));
        }
        if self.soc_chain {
            for t in 1..=n {
                let mut coeffs = Vec::with_capacity(2 * t);
                for j in 1..=t {
                    coeffs.push((self.ch(j), p.delta * p.eta_c));
                    coeffs.push((self.dis(j), -p.delta / p.eta_d));
                }
                prog.rows.push(Row::new(coeffs.clone(), Cmp::Le, p.soc_max - p.soc_init));
                prog.rows.push(Row::new(coeffs, Cmp::Ge, p.soc_min - p.soc_init));
            }
        }
        if self.mode_linking {
            for t in 1..=n {
                let u = self.mode(t).expect("validated");
                prog.rows.push(Row::new(vec![(self.ch(t), 1.0), (u, -p.p_ch_max)], Cmp::Le, 0.0));
                prog.rows.push(Row::new(vec![(self.dis(t), 1.0), (u, p.p_dis_max)], Cmp::Le, p.p_dis_max));
            }
        }
        match &self.objective {
            Objective::Linear { prices, .. } => {
                for t in 1..=n {
                    prog.linear[self.ch(t)] = -prices[t - 1];
                    prog.linear[self.dis(t)] = prices[t - 1];
                }
            }
            Objective::TrackingQP { setpoints } | Objective::TrackingCylinderQP { setpoints } => {
                // per period: (d - c - ps)^2 + w d c, with w = 0 or 4
                let cross = if matches!(self.objective, Objective::TrackingQP { .. }) { -2.0 } else { 2.0 };
                let mut h = DMatrix::zeros(self.num_vars(), self.num_vars());
                for t in 1..=n {
                    let (c, d) = (self.ch(t), self.dis(t));
                    let ps = setpoints[t - 1];
                    h[(c, c)] = 2.0;
                    h[(d, d)] = 2.0;
                    h[(c, d)] = cross;
                    h[(d, c)] = cross;
                    prog.linear[d] = -2.0 * ps;
                    prog.linear[c] = 2.0 * ps;
                    prog.constant += ps * ps;
                }
                prog.hessian = Some(h);
            }
        }
        Ok(prog)
    }

    /// Trajectory from a solution vector; round-off below zero is clipped.
    pub fn trajectory(&self, x: &[f64]) -> Result<Trajectory> {
        let n = self.num_periods;
        let p_ch: Vec<f64> = x[..n].iter().map(|v| v.max(0.0)).collect();
        let p_dis: Vec<f64> = x[n..2 * n].iter().map(|v| v.max(0.0)).collect();
        let traj = simulate_soc(&self.params, &p_dis, &p_ch)?;
        Ok(if self.with_mode { traj.with_mode(x[2 * n..3 * n].to_vec()) } else { traj })
    }

    pub(crate) fn report(
        &self,
        sol: &ProgramSolution,
        prog: &MathProgram,
        started: Instant,
    ) -> Result<SolveReport> {
        let mut rep = SolveReport::empty(sol.status, self.objective.sense());
        rep.iterations = sol.iterations;
        rep.wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
        rep.kkt_residual = sol.kkt_residual;
        if sol.status == Status::Optimal {
            let viol = prog.max_violation(&sol.x);
            if viol > REPORT_FEAS_TOL * (1.0 + self.params.capacity().max(self.params.p_ch_max)) {
                return Err(Error::Solver(format!("optimal point violates a row by {viol:e}")));
            }
            rep.objective = sol.objective;
            let traj = self.trajectory(&sol.x)?;
            rep.violation = violation_metrics(&traj, DEFAULT_THRESHOLD);
            rep.trajectory = Some(traj);
            rep.x = sol.x.clone();
        }
        Ok(rep)
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub status: Status,
    /// Objective in the model's own sense.
    pub objective: f64,
    pub sense: Sense,
    pub trajectory: Option<Trajectory>,
    /// Violated periods and summed `p_ch * p_dis` at [`DEFAULT_THRESHOLD`].
    pub violation: (usize, f64),
    pub iterations: usize,
    pub wall_time_ms: f64,
    pub kkt_residual: Option<f64>,
    /// Branch-and-bound nodes solved.
    pub nodes: Option<usize>,
    /// Absolute gap between incumbent and best bound.
    pub gap: Option<f64>,
    pub x: Vec<f64>,
}

impl SolveReport {
    pub(crate) fn empty(status: Status, sense: Sense) -> Self {
        SolveReport {
            status,
            objective: f64::NAN,
            sense,
            trajectory: None,
            violation: (0, 0.0),
            iterations: 0,
            wall_time_ms: 0.0,
            kkt_residual: None,
            nodes: None,
            gap: None,
            x: Vec::new(),
        }
    }

    /// Objective written as a minimisation: maximised values are negated.
    pub fn min_form_objective(&self) -> f64 {
        match self.sense {
            Sense::Minimize => self.objective,
            Sense::Maximize => -self.objective,
        }
    }
}

pub fn solve_lp(model: &RelaxationModel) -> Result<SolveReport> {
    if model.objective.is_quadratic() {
        return Err(Error::Model("solve_lp needs a linear objective".into()));
    }
    let started = Instant::now();
    let prog = model.to_program()?;
    let sol = solve_linear(&prog);
    model.report(&sol, &prog, started)
}

pub fn solve_qp(model: &RelaxationModel) -> Result<SolveReport> {
    if !model.objective.is_quadratic() {
        return Err(Error::Model("solve_qp needs a tracking objective".into()));
    }
    let started = Instant::now();
    let prog = model.to_program()?;
    let sol = solve_quadratic(&prog);
    model.report(&sol, &prog, started)
}

/// Dispatches on the objective and on `integral_mode`.
pub fn solve(model: &RelaxationModel) -> Result<SolveReport> {
    if model.integral_mode {
        crate::solve::bb::solve_bb(model)
    } else if model.objective.is_quadratic() {
        solve_qp(model)
    } else {
        solve_lp(model)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Preset {
    MILP,
    MIQP,
    HCHLP,
    TLP,
    TLPu,
    TLPSOC,
}

impl Preset {
    pub const ALL: [Preset; 6] =
        [Preset::MILP, Preset::MIQP, Preset::HCHLP, Preset::TLP, Preset::TLPu, Preset::TLPSOC];

    pub fn as_str(self) -> &'static str {
        match self {
            Preset::MILP => "MILP",
            Preset::MIQP => "MIQP",
            Preset::HCHLP => "HCHLP",
            Preset::TLP => "TLP",
            Preset::TLPu => "TLPu",
            Preset::TLPSOC => "TLPSOC",
        }
    }

    /// Exact (complementarity-enforcing) formulation.
    pub fn is_exact(self) -> bool {
        matches!(self, Preset::MILP | Preset::MIQP)
    }

    pub fn supports(self, instance: &Instance) -> bool {
        matches!(
            (self, instance),
            (Preset::MILP, Instance::Prices(_))
                | (Preset::MIQP | Preset::TLPSOC, Instance::Setpoints(_))
                | (Preset::HCHLP | Preset::TLP | Preset::TLPu, _)
        )
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown preset {s:?}")))
    }
}

impl Serialize for Preset {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Preset {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Problem data for one run: prices for scheduling or setpoints for tracking.
#[derive(Clone, Debug, PartialEq)]
pub enum Instance {
    Prices(Vec<f64>),
    Setpoints(Vec<f64>),
}

pub fn build_preset(params: &BatteryParams, preset: Preset, instance: &Instance) -> Result<RelaxationModel> {
    params.validate()?;
    if !preset.supports(instance) {
        return Err(Error::Model(format!("{preset} does not accept this instance kind")));
    }
    let objective = match (preset, instance) {
        (Preset::TLPSOC, Instance::Setpoints(s)) => Objective::TrackingCylinderQP { setpoints: s.clone() },
        (_, Instance::Prices(p)) => Objective::Linear { prices: p.clone(), sense: Sense::Maximize },
        (_, Instance::Setpoints(s)) => Objective::TrackingQP { setpoints: s.clone() },
    };
    let n = params.horizon;
    let window = || redundancy_filter(gen_window_cuts(params), params);
    let model = match preset {
        Preset::MILP | Preset::MIQP => {
            let mut m = RelaxationModel::new(params, true, objective);
            m.upper[..n].fill(params.p_ch_max);
            m.upper[n..2 * n].fill(params.p_dis_max);
            m.soc_chain = true;
            m.mode_linking = true;
            m.integral_mode = true;
            m
        }
        Preset::HCHLP => {
            let mut m = RelaxationModel::new(params, false, objective);
            m.linear_cuts = gen_pozo_cuts(params);
            m
        }
        Preset::TLP | Preset::TLPSOC => {
            let mut m = RelaxationModel::new(params, false, objective);
            m.linear_cuts = window();
            m
        }
        Preset::TLPu => {
            let mut m = RelaxationModel::new(params, true, objective);
            m.linear_cuts = window();
            m.linear_cuts.extend(gen_u_cuts(params));
            m.mode_linking = true;
            m
        }
    };
    model.validate()?;
    Ok(model)
}
