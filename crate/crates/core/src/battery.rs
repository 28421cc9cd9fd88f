//! Battery parameters, state-of-charge dynamics and membership checks for the
//! three feasible-set descriptions (complementarity, mixed-integer, relaxed).
//!
//! Units are fixed: power in kW, energy in kWh, durations in hours. Periods
//! are numbered `1..=T`; SoC index `0` is the initial level.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cuts::coefficients::{charge_room, discharge_room};
use crate::error::{Error, Result};

/// Absolute feasibility tolerance in kW / kWh.
pub const FEAS_TOL: f64 = 1e-8;
/// Tolerance on the SoC recursion residual in kWh.
pub const RECURSION_TOL: f64 = 1e-9;

/// Physical description of a storage unit over a fixed horizon.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatteryParams {
    pub p_dis_max: f64,
    pub p_ch_max: f64,
    pub soc_min: f64,
    pub soc_max: f64,
    pub eta_c: f64,
    pub eta_d: f64,
    pub delta: f64,
    pub soc_init: f64,
    pub horizon: usize,
}

impl BatteryParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            self.p_dis_max,
            self.p_ch_max,
            self.soc_min,
            self.soc_max,
            self.eta_c,
            self.eta_d,
            self.delta,
            self.soc_init,
        ];
        if fields.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("non-finite field".into()));
        }
        let bad = |msg: &str| Err(Error::InvalidParams(msg.to_string()));
        if self.soc_max <= self.soc_min {
            return bad("soc_max must exceed soc_min");
        }
        if self.soc_init < self.soc_min || self.soc_init > self.soc_max {
            return bad("soc_init outside [soc_min, soc_max]");
        }
        if !(self.eta_c > 0.0 && self.eta_c <= 1.0) || !(self.eta_d > 0.0 && self.eta_d <= 1.0) {
            return bad("efficiencies must lie in (0, 1]");
        }
        if self.delta <= 0.0 {
            return bad("delta must be positive");
        }
        if self.p_dis_max < 0.0 || self.p_ch_max < 0.0 {
            return bad("power ratings must be nonnegative");
        }
        if self.horizon == 0 {
            return bad("horizon must be at least 1");
        }
        Ok(())
    }

    /// Parses a single JSON battery object and validates it.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let p: BatteryParams = serde_json::from_str(s)?;
        p.validate()?;
        Ok(p)
    }

    /// Loads one battery (JSON object) or a sweep (one JSON object per line).
    pub fn load_all(path: impl AsRef<Path>) -> Result<Vec<Self>> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let trimmed = text.trim();
        if trimmed.is_empty() {
            return Err(Error::InvalidParams(format!("{}: empty file", path.display())));
        }
        if let Ok(single) = serde_json::from_str::<BatteryParams>(trimmed) {
            single.validate()?;
            return Ok(vec![single]);
        }
        trimmed
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(Self::from_json_str)
            .collect()
    }

    pub fn capacity(&self) -> f64 {
        self.soc_max - self.soc_min
    }

    /// Round-trip efficiency `eta_d * eta_c`.
    pub fn round_trip(&self) -> f64 {
        self.eta_d * self.eta_c
    }

    /// Copy with the power ratings replaced by the effective rates.
    pub fn with_effective_ratings(&self) -> Self {
        let (d, c) = effective_rates(self);
        BatteryParams { p_dis_max: d, p_ch_max: c, ..self.clone() }
    }
}

/// Effective maximum discharge and charge rates: ratings clipped by what the
/// usable capacity allows within one period. Returns `(discharge, charge)`.
pub fn effective_rates(params: &BatteryParams) -> (f64, f64) {
    let cap = params.capacity();
    let dis = params.p_dis_max.min(params.eta_d * cap / params.delta);
    let ch = params.p_ch_max.min(cap / (params.delta * params.eta_c));
    (dis, ch)
}

/// Derived envelope quantities.
#[derive(Clone, Debug, PartialEq)]
pub struct EffectiveEnvelope {
    pub p_dis_eff: f64,
    pub p_ch_eff: f64,
    /// Lowest reachable SoC at the end of period `t`, for `t = 0..T-1`.
    pub soc_lo: Vec<f64>,
    /// Highest reachable SoC at the end of period `t`, for `t = 0..T-1`.
    pub soc_hi: Vec<f64>,
    /// Time-varying effective charge rate; entry `t-1` holds period `t`.
    pub p_ch_eff_t: Vec<f64>,
    /// Time-varying effective discharge rate; entry `t-1` holds period `t`.
    pub p_dis_eff_t: Vec<f64>,
}

impl EffectiveEnvelope {
    /// Time-varying charge rate of period `t` (1-based).
    pub fn ch_rate(&self, t: usize) -> f64 {
        self.p_ch_eff_t[t - 1]
    }

    /// Time-varying discharge rate of period `t` (1-based).
    pub fn dis_rate(&self, t: usize) -> f64 {
        self.p_dis_eff_t[t - 1]
    }
}

pub fn soc_envelope(params: &BatteryParams) -> EffectiveEnvelope {
    let (p_dis_eff, p_ch_eff) = effective_rates(params);
    let horizon = params.horizon;
    let mut soc_lo = Vec::with_capacity(horizon);
    let mut soc_hi = Vec::with_capacity(horizon);
    soc_lo.push(params.soc_init);
    soc_hi.push(params.soc_init);
    for t in 1..horizon {
        let lo = (soc_lo[t - 1] - params.delta * p_dis_eff / params.eta_d).max(params.soc_min);
        let hi = (soc_hi[t - 1] + params.delta * params.eta_c * p_ch_eff).min(params.soc_max);
        soc_lo.push(lo);
        soc_hi.push(hi);
    }
    let p_ch_eff_t = (0..horizon)
        .map(|t| charge_room(params, p_ch_eff, soc_lo[t], 0))
        .collect();
    let p_dis_eff_t = (0..horizon)
        .map(|t| discharge_room(params, p_dis_eff, soc_hi[t], 0))
        .collect();
    EffectiveEnvelope { p_dis_eff, p_ch_eff, soc_lo, soc_hi, p_ch_eff_t, p_dis_eff_t }
}

/// Charge/discharge/SoC profile over the horizon.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub p_dis: Vec<f64>,
    pub p_ch: Vec<f64>,
    /// SoC at the end of each period.
    pub soc: Vec<f64>,
    /// Charging indicator per period; fractional values allowed for relaxations.
    pub mode: Option<Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.p_ch.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p_ch.is_empty()
    }

    pub fn with_mode(mut self, mode: Vec<f64>) -> Self {
        self.mode = Some(mode);
        self
    }

    /// Charging indicator implied by the powers: 1 on charging periods.
    pub fn charge_indicator(&self) -> Vec<f64> {
        self.p_ch.iter().map(|&c| if c > 0.0 { 1.0 } else { 0.0 }).collect()
    }
}

/// Integrates the SoC recursion. Bounds are not enforced here.
pub fn simulate_soc(params: &BatteryParams, p_dis: &[f64], p_ch: &[f64]) -> Result<Trajectory> {
    let horizon = params.horizon;
    for len in [p_dis.len(), p_ch.len()] {
        if len != horizon {
            return Err(Error::LengthMismatch { expected: horizon, got: len });
        }
    }
    if let Some(period) = p_dis
        .iter()
        .zip(p_ch)
        .position(|(&d, &c)| d < -FEAS_TOL || c < -FEAS_TOL)
    {
        return Err(Error::NegativePower { period: period + 1 });
    }
    let mut soc = Vec::with_capacity(horizon);
    let mut level = params.soc_init;
    for (&d, &c) in p_dis.iter().zip(p_ch) {
        level += params.delta * (params.eta_c * c - d / params.eta_d);
        soc.push(level);
    }
    Ok(Trajectory { p_dis: p_dis.to_vec(), p_ch: p_ch.to_vec(), soc, mode: None })
}

/// Which description of the feasible set a trajectory is checked against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FeasibleSet {
    /// Complementarity formulation.
    P,
    /// Mixed-integer formulation with binary mode.
    P01,
    /// Natural linear relaxation with `u` in `[0, 1]`.
    PR,
}

/// Worst violation per constraint group, in native units.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MembershipReport {
    /// Power ratings and nonnegativity (kW).
    pub rating: f64,
    /// SoC bounds (kWh).
    pub soc_bounds: f64,
    /// Residual of the SoC recursion (kWh).
    pub recursion: f64,
    /// Largest `p_dis * p_ch` (kW^2); only checked for `P`.
    pub complementarity: f64,
    /// Mode domain violation (`[0,1]` or binary) for `P01`/`PR`.
    pub mode: f64,
    pub member: bool,
}

pub fn membership(
    params: &BatteryParams,
    traj: &Trajectory,
    which: FeasibleSet,
) -> Result<MembershipReport> {
    let horizon = params.horizon;
    for len in [traj.p_dis.len(), traj.p_ch.len(), traj.soc.len()] {
        if len != horizon {
            return Err(Error::LengthMismatch { expected: horizon, got: len });
        }
    }
    let mode = match which {
        FeasibleSet::P => None,
        FeasibleSet::P01 | FeasibleSet::PR => {
            let m = traj.mode.as_ref().ok_or(Error::MissingMode)?;
            if m.len() != horizon {
                return Err(Error::LengthMismatch { expected: horizon, got: m.len() });
            }
            Some(m)
        }
    };

    let mut rep = MembershipReport::default();
    let mut level = params.soc_init;
    for t in 0..horizon {
        let (d, c, s) = (traj.p_dis[t], traj.p_ch[t], traj.soc[t]);
        let (d_cap, c_cap) = match mode {
            Some(u) => (params.p_dis_max * (1.0 - u[t]), params.p_ch_max * u[t]),
            None => (params.p_dis_max, params.p_ch_max),
        };
        let rating = [-d, -c, d - d_cap, c - c_cap].into_iter().fold(0.0, f64::max);
        rep.rating = rep.rating.max(rating);
        rep.soc_bounds = rep.soc_bounds.max((params.soc_min - s).max(s - params.soc_max));
        level += params.delta * (params.eta_c * c - d / params.eta_d);
        rep.recursion = rep.recursion.max((level - s).abs());
        // keep integrating from the reported SoC so one bad period is not smeared
        level = s;
        match which {
            FeasibleSet::P => rep.complementarity = rep.complementarity.max(d * c),
            FeasibleSet::P01 => {
                let u = mode.unwrap()[t];
                rep.mode = rep.mode.max(u.abs().min((u - 1.0).abs()));
            }
            FeasibleSet::PR => {
                let u = mode.unwrap()[t];
                rep.mode = rep.mode.max((-u).max(u - 1.0));
            }
        }
    }
    rep.member = rep.rating <= FEAS_TOL
        && rep.soc_bounds <= FEAS_TOL
        && rep.recursion <= RECURSION_TOL
        && rep.complementarity <= FEAS_TOL
        && rep.mode <= FEAS_TOL;
    Ok(rep)
}

/// Number of periods with `p_ch * p_dis > threshold`, and the summed product.
pub fn violation_metrics(traj: &Trajectory, threshold: f64) -> (usize, f64) {
    traj.p_ch.iter().zip(&traj.p_dis).fold((0, 0.0), |(n, sum), (&c, &d)| {
        let prod = c * d;
        (n + usize::from(prod > threshold), sum + prod)
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// Lossless 5 kWh battery with 10 kW ratings, empty at start, three periods.
    pub(crate) fn b1() -> BatteryParams {
        BatteryParams {
            p_dis_max: 10.0,
            p_ch_max: 10.0,
            soc_min: 0.0,
            soc_max: 5.0,
            eta_c: 1.0,
            eta_d: 1.0,
            delta: 1.0,
            soc_init: 0.0,
            horizon: 3,
        }
    }

    #[test]
    fn effective_rate_examples() {
        assert_eq!(effective_rates(&b1()), (5.0, 5.0));
        let lossy = BatteryParams { eta_d: 0.9, ..b1() };
        assert!((effective_rates(&lossy).0 - 4.5).abs() < 1e-12);
        let big = BatteryParams { p_dis_max: 1.0, eta_d: 0.9, soc_max: 100.0, ..b1() };
        assert_eq!(effective_rates(&big).0, 1.0);
    }

    #[test]
    fn envelope_examples() {
        let env = soc_envelope(&b1());
        assert_eq!(env.soc_lo, vec![0.0, 0.0, 0.0]);
        assert_eq!(env.soc_hi, vec![0.0, 5.0, 5.0]);

        let half = BatteryParams { soc_init: 2.0, ..b1() };
        let env = soc_envelope(&half);
        assert_eq!(env.soc_lo, vec![2.0, 0.0, 0.0]);
        assert_eq!(env.soc_hi, vec![2.0, 5.0, 5.0]);
        assert!((env.dis_rate(1) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn simulate_examples() {
        let tr = simulate_soc(&b1(), &[0.0, 5.0, 0.0], &[5.0, 0.0, 0.0]).unwrap();
        assert_eq!(tr.soc, vec![5.0, 0.0, 0.0]);

        let p = BatteryParams { eta_c: 0.8, p_ch_max: 10.0, soc_max: 20.0, ..b1() };
        let tr = simulate_soc(&p, &[0.0; 3], &[10.0, 0.0, 0.0]).unwrap();
        assert!((tr.soc[0] - 8.0).abs() < 1e-12);

        let p = BatteryParams { eta_d: 0.8, soc_init: 8.0, soc_max: 10.0, ..b1() };
        let tr = simulate_soc(&p, &[6.4, 0.0, 0.0], &[0.0; 3]).unwrap();
        assert!(tr.soc[0].abs() < 1e-12);

        assert!(matches!(
            simulate_soc(&b1(), &[0.0; 2], &[0.0; 3]),
            Err(Error::LengthMismatch { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn membership_examples() {
        let tr = simulate_soc(&b1(), &[0.0; 3], &[5.0, 0.0, 0.0]).unwrap();
        let rep = membership(&b1(), &tr, FeasibleSet::P).unwrap();
        assert!(rep.member);
        assert_eq!(rep.complementarity, 0.0);

        let both = simulate_soc(&b1(), &[1.0, 0.0, 0.0], &[1.0, 0.0, 0.0]).unwrap();
        let rep = membership(&b1(), &both, FeasibleSet::P).unwrap();
        assert!(!rep.member);
        assert_eq!(rep.complementarity, 1.0);
        let relaxed = both.clone().with_mode(vec![0.5, 0.0, 0.0]);
        assert!(membership(&b1(), &relaxed, FeasibleSet::PR).unwrap().member);

        let wrong = simulate_soc(&b1(), &[0.0; 3], &[0.0; 3])
            .unwrap()
            .with_mode(vec![1.0, 0.0, 0.0]);
        let mut wrong = wrong;
        wrong.p_dis[0] = 1.0;
        wrong.soc = simulate_soc(&b1(), &wrong.p_dis, &wrong.p_ch).unwrap().soc;
        let rep = membership(&b1(), &wrong, FeasibleSet::P01).unwrap();
        assert!(!rep.member);
        assert_eq!(rep.rating, 1.0);

        assert!(matches!(membership(&b1(), &tr, FeasibleSet::PR), Err(Error::MissingMode)));
    }

    #[test]
    fn p_member_is_pr_member_with_charge_indicator() {
        let tr = simulate_soc(&b1(), &[0.0, 3.0, 0.0], &[4.0, 0.0, 2.0]).unwrap();
        assert!(membership(&b1(), &tr, FeasibleSet::P).unwrap().member);
        let u = tr.charge_indicator();
        let tr = tr.with_mode(u);
        assert!(membership(&b1(), &tr, FeasibleSet::PR).unwrap().member);
        assert!(membership(&b1(), &tr, FeasibleSet::P01).unwrap().member);
    }

    #[test]
    fn violation_metric_examples() {
        let zero = Trajectory { p_dis: vec![0.0; 2], p_ch: vec![0.0; 2], soc: vec![0.0; 2], mode: None };
        assert_eq!(violation_metrics(&zero, 1e-4), (0, 0.0));
        let tr = Trajectory { p_dis: vec![1.0, 2.0], p_ch: vec![1.0, 0.0], soc: vec![0.0; 2], mode: None };
        assert_eq!(violation_metrics(&tr, 1e-4), (1, 1.0));
        let tiny = Trajectory { p_dis: vec![1e-3, 0.0], p_ch: vec![1e-3, 1e-3], soc: vec![0.0; 2], mode: None };
        let (n, s) = violation_metrics(&tiny, 1e-4);
        assert_eq!(n, 0);
        assert!((s - 1e-6).abs() < 1e-18);
    }

    #[test]
    fn params_json_exact_keys() {
        let js = r#"{"p_dis_max":10,"p_ch_max":10,"soc_min":0,"soc_max":5,"eta_c":1,"eta_d":1,"delta":1,"soc_init":0,"horizon":3}"#;
        assert_eq!(BatteryParams::from_json_str(js).unwrap(), b1());
        let extra = js.replace("\"horizon\":3", "\"horizon\":3,\"T\":3");
        assert!(BatteryParams::from_json_str(&extra).is_err());
        let bad = js.replace("\"soc_init\":0", "\"soc_init\":6");
        assert!(matches!(BatteryParams::from_json_str(&bad), Err(Error::InvalidParams(_))));
    }
}
