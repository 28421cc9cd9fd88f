use crate::battery::{effective_rates, BatteryParams};
use crate::cuts::coefficients::{charge_room, CoefficientTable};
use crate::cuts::{CutFamily, LinearCut, VarKind};
use crate::error::{Error, Result};
use crate::submodular::{gain, PeriodSet, SetFn, WindowSpec};

/// Window cuts for every `(t, tau_bar)`. A one-period window where both
/// directions are open is emitted once, as a [`CutFamily::SingleperiodBox`].
pub fn gen_window_cuts(params: &BatteryParams) -> Vec<LinearCut> {
    let tab = CoefficientTable::new(params);
    let mut cuts = Vec::new();
    for t in 1..=params.horizon {
        for tau_bar in 0..=params.horizon - t {
            let (c0, d0) = (tab.c(t, 0), tab.d(t, 0));
            if tau_bar == 0 && c0 > tab.zero_tol && d0 > tab.zero_tol {
                let mut cut = LinearCut::new(CutFamily::SingleperiodBox, t, 0);
                cut.add(VarKind::Charge, t, 1.0 / c0);
                cut.add(VarKind::Discharge, t, 1.0 / d0);
                cut.rhs = 1.0;
                cuts.push(cut);
                continue;
            }
            cuts.push(window_charge(&tab, t, tau_bar));
            cuts.push(window_discharge(&tab, t, tau_bar));
        }
    }
    cuts
}

pub(crate) fn window_charge(tab: &CoefficientTable, t: usize, tau_bar: usize) -> LinearCut {
    let mut cut = LinearCut::new(CutFamily::WindowCharge, t, tau_bar);
    for tau in 0..=tau_bar {
        cut.add(VarKind::Charge, t + tau, 1.0);
        cut.add(VarKind::Discharge, t + tau, tab.rho_bar_c(t, tau, tau_bar));
    }
    cut.rhs = tab.c_sum(t, tau_bar);
    cut
}

pub(crate) fn window_discharge(tab: &CoefficientTable, t: usize, tau_bar: usize) -> LinearCut {
    let mut cut = LinearCut::new(CutFamily::WindowDischarge, t, tau_bar);
    for tau in 0..=tau_bar {
        cut.add(VarKind::Discharge, t + tau, 1.0);
        cut.add(VarKind::Charge, t + tau, tab.rho_bar_d(t, tau, tau_bar));
    }
    cut.rhs = tab.d_sum(t, tau_bar);
    cut
}

/// Cuts that use the charging indicator `u` in place of the cross terms.
pub fn gen_u_cuts(params: &BatteryParams) -> Vec<LinearCut> {
    let tab = CoefficientTable::new(params);
    let snap = |v: f64| if v.abs() <= tab.zero_tol { 0.0 } else { v };
    let mut cuts = Vec::new();
    for t in 1..=params.horizon {
        for tau_bar in 0..=params.horizon - t {
            let mut ch = LinearCut::new(CutFamily::UCharge, t, tau_bar);
            let mut dis = LinearCut::new(CutFamily::UDischarge, t, tau_bar);
            let mut ch_rhs = tab.c_sum(t, tau_bar);
            for tau in 0..=tau_bar {
                let rc = snap(tab.rho_c(t, tau, tau_bar));
                let rd = snap(tab.rho_d(t, tau, tau_bar));
                ch.add(VarKind::Charge, t + tau, 1.0);
                ch.add(VarKind::Mode, t + tau, -rc);
                ch_rhs -= rc;
                dis.add(VarKind::Discharge, t + tau, 1.0);
                dis.add(VarKind::Mode, t + tau, rd);
            }
            ch.rhs = ch_rhs;
            dis.rhs = tab.d_sum(t, tau_bar);
            cuts.push(ch);
            cuts.push(dis);
        }
    }
    cuts
}

/// Both single-anchor cuts for the window `t..=t+tau_bar` anchored at offset
/// `tau_star`.
pub fn gen_anchor_cuts(
    params: &BatteryParams,
    t: usize,
    tau_bar: usize,
    tau_star: usize,
) -> Result<Vec<LinearCut>> {
    if t == 0 || tau_bar < 1 || t + tau_bar > params.horizon {
        return Err(Error::InvalidAnchor(format!(
            "window t={t}, tau_bar={tau_bar} does not fit a horizon of {}",
            params.horizon
        )));
    }
    if tau_star > tau_bar {
        return Err(Error::InvalidAnchor(format!("tau_star={tau_star} exceeds tau_bar={tau_bar}")));
    }
    let tab = CoefficientTable::new(params);
    let win = WindowSpec::new(params, t, tau_bar + 1, tab.envelope.soc_lo[t - 1])?;
    let tol = tab.zero_tol;
    let k = tab.round_trip;
    let anchor = PeriodSet::singleton(tau_star);
    let rhs = fbar_single(params, &tab, t, tau_star, tau_bar);
    // weight for a p^d term whose gain is `g`
    let dis_weight = |tau: usize, g: f64| -> f64 {
        if g < -tol {
            -g / tab.dis_rate(t + tau)
        } else if g > tol {
            -1.0 / k
        } else {
            0.0
        }
    };

    let mut no_self = LinearCut::new(CutFamily::AnchorNoSelf, t, tau_bar);
    no_self.meta.tau_star = Some(tau_star);
    for tau in (0..=tau_bar).filter(|&tau| tau != tau_star) {
        let g = gain(SetFn::FBar, &win, tau, anchor)?;
        no_self.add(VarKind::Charge, t + tau, 1.0);
        if g >= -tol || tab.dis_rate(t + tau) > tol {
            no_self.add(VarKind::Discharge, t + tau, dis_weight(tau, g));
        }
    }
    no_self.rhs = rhs;

    let mut with_self = LinearCut::new(CutFamily::AnchorWithSelf, t, tau_bar);
    with_self.meta.tau_star = Some(tau_star);
    let g_star = gain(SetFn::FBar, &win, tau_star, PeriodSet::EMPTY)?;
    let kappa = if g_star >= -tol { tab.ch_rate(t + tau_star) } else { -g_star };
    let self_coeff = if kappa > tol { 1.0 + g_star / kappa } else { 1.0 };
    with_self.add(VarKind::Charge, t + tau_star, self_coeff);
    for tau in (0..=tau_bar).filter(|&tau| tau != tau_star) {
        let g = gain(SetFn::FBar, &win, tau, PeriodSet::EMPTY)?;
        with_self.add(VarKind::Charge, t + tau, 1.0);
        if g >= -tol || tab.dis_rate(t + tau) > tol {
            with_self.add(VarKind::Discharge, t + tau, dis_weight(tau, g));
        }
    }
    with_self.rhs = rhs;
    Ok(vec![no_self, with_self])
}

/// `f̄({tau_star})`: greedy charging everywhere in the window except
/// `tau_star`, where the battery discharges at full rate.
pub(crate) fn fbar_single(
    params: &BatteryParams,
    tab: &CoefficientTable,
    t: usize,
    tau_star: usize,
    tau_bar: usize,
) -> f64 {
    let before: f64 = (0..tau_star).map(|j| tab.c(t, j)).sum();
    let soc = tab.envelope.soc_lo[t - 1] + params.delta * params.eta_c * before;
    let soc = (soc - params.delta * tab.envelope.p_dis_eff / params.eta_d).max(params.soc_min);
    let after: f64 = (0..tau_bar - tau_star)
        .map(|j| charge_room(params, tab.envelope.p_ch_eff, soc, j))
        .sum();
    before + after
}

/// Baseline family: cumulative window cuts anchored at the first period
/// plus per-period box cuts at the constant effective rates.
pub fn gen_pozo_cuts(params: &BatteryParams) -> Vec<LinearCut> {
    let (p_dis_eff, p_ch_eff) = effective_rates(params);
    let k = params.round_trip();
    let mut cuts = Vec::new();
    for tau_bar in 0..params.horizon {
        let mut ch = LinearCut::new(CutFamily::PozoCharge, 1, tau_bar);
        let mut dis = LinearCut::new(CutFamily::PozoDischarge, 1, tau_bar);
        for tau in 0..=tau_bar {
            ch.add(VarKind::Charge, tau + 1, 1.0);
            dis.add(VarKind::Discharge, tau + 1, 1.0);
            if tau < tau_bar {
                ch.add(VarKind::Discharge, tau + 1, -1.0 / k);
                dis.add(VarKind::Charge, tau + 1, -k);
            }
        }
        ch.rhs = (params.soc_max - params.soc_init) / (params.delta * params.eta_c);
        dis.rhs = (params.soc_init - params.soc_min) * params.eta_d / params.delta;
        cuts.push(ch);
        cuts.push(dis);
    }
    for t in 1..=params.horizon {
        let mut bx = LinearCut::new(CutFamily::SingleperiodBox, t, 0);
        if p_ch_eff > 0.0 && p_dis_eff > 0.0 {
            bx.add(VarKind::Charge, t, 1.0 / p_ch_eff);
            bx.add(VarKind::Discharge, t, 1.0 / p_dis_eff);
            bx.rhs = 1.0;
            cuts.push(bx);
        } else {
            bx.add(VarKind::Charge, t, 1.0);
            bx.rhs = p_ch_eff;
            let mut other = LinearCut::new(CutFamily::SingleperiodBox, t, 0);
            other.add(VarKind::Discharge, t, 1.0);
            other.rhs = p_dis_eff;
            cuts.push(bx);
            cuts.push(other);
        }
    }
    cuts
}
