//! Drops window cuts that are implied by the one-period box cuts.

use crate::battery::{soc_envelope, BatteryParams};
use crate::cuts::{CutFamily, LinearCut};

/// Periods needed to fill the battery from its lowest reachable SoC at the
/// start of period `t`, in units of the effective charge rate.
pub fn fill_periods(params: &BatteryParams, t: usize) -> f64 {
    let env = soc_envelope(params);
    if env.p_ch_eff <= 0.0 {
        return 0.0;
    }
    (params.soc_max - env.soc_lo[t - 1]) / (params.delta * params.eta_c * env.p_ch_eff)
}

/// Discharge-side mirror of [`fill_periods`].
pub fn empty_periods(params: &BatteryParams, t: usize) -> f64 {
    let env = soc_envelope(params);
    if env.p_dis_eff <= 0.0 {
        return 0.0;
    }
    (env.soc_hi[t - 1] - params.soc_min) * params.eta_d / (params.delta * env.p_dis_eff)
}

/// Largest window length offset whose cut is implied by the box cuts.
///
/// Only whole periods of full-rate room count: with `e` periods of room,
/// windows of up to `floor(e)` periods have a right-hand side equal to the
/// sum of the box limits.
pub fn redundancy_depth(periods: f64) -> usize {
    if periods > 0.0 {
        ((periods + 1e-9).floor() as usize).saturating_sub(1)
    } else {
        0
    }
}

pub fn is_redundant(params: &BatteryParams, cut: &LinearCut) -> bool {
    let (t, tau_bar) = (cut.meta.t, cut.meta.tau_bar);
    if tau_bar == 0 || t + tau_bar > params.horizon {
        return false;
    }
    let depth = match cut.family {
        CutFamily::WindowCharge => redundancy_depth(fill_periods(params, t)),
        CutFamily::WindowDischarge => redundancy_depth(empty_periods(params, t)),
        _ => return false,
    };
    tau_bar <= depth
}

/// Removes redundant window cuts; other families pass through unchanged.
pub fn redundancy_filter(cuts: Vec<LinearCut>, params: &BatteryParams) -> Vec<LinearCut> {
    cuts.into_iter().filter(|c| !is_redundant(params, c)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_rule() {
        assert_eq!(redundancy_depth(0.0), 0);
        assert_eq!(redundancy_depth(1.0), 0);
        assert_eq!(redundancy_depth(1.5), 0);
        assert_eq!(redundancy_depth(2.0), 1);
        assert_eq!(redundancy_depth(3.0), 2);
        assert_eq!(redundancy_depth(3.0 - 1e-12), 2);
    }
}
