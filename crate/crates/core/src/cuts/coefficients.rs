//! Window coefficients: remaining charge/discharge room and the cross terms
//! that weight the opposite-direction variables in the window cuts.
//!
//! Periods are 1-based; `tau` and `tau_bar` are offsets inside a window.

use crate::battery::{soc_envelope, BatteryParams, EffectiveEnvelope};

/// How far a charge-side window of `tau_bar + 1` periods can still fill the
/// battery in its last period, starting from `soc_prev`.
pub fn charge_room(params: &BatteryParams, rate_eff: f64, soc_prev: f64, tau_bar: usize) -> f64 {
    let head = (params.soc_max - soc_prev) / (params.delta * params.eta_c) - tau_bar as f64 * rate_eff;
    rate_eff.min(head.max(0.0))
}

/// Discharge-side mirror of [`charge_room`].
pub fn discharge_room(params: &BatteryParams, rate_eff: f64, soc_prev: f64, tau_bar: usize) -> f64 {
    let head = (soc_prev - params.soc_min) * params.eta_d / params.delta - tau_bar as f64 * rate_eff;
    rate_eff.min(head.max(0.0))
}

/// Cross-term weight from a raw `rho`.
///
/// Strictly negative values map to `negative`, values within `zero_tol` of
/// zero map to zero, positive values are scaled by the opposite-direction
/// rate (and dropped when that rate is zero).
pub fn rho_bar(rho: f64, rate: f64, negative: f64, zero_tol: f64) -> f64 {
    if rho < -zero_tol {
        negative
    } else if rho <= zero_tol {
        0.0
    } else if rate > zero_tol {
        rho / rate
    } else {
        0.0
    }
}

/// All window coefficients of one battery.
#[derive(Clone, Debug)]
pub struct CoefficientTable {
    pub horizon: usize,
    pub envelope: EffectiveEnvelope,
    /// Round-trip efficiency.
    pub round_trip: f64,
    /// Values within this of zero are treated as zero.
    pub zero_tol: f64,
    c: Vec<Vec<f64>>,
    d: Vec<Vec<f64>>,
    c_bar: Vec<f64>,
    d_bar: Vec<f64>,
}

impl CoefficientTable {
    pub fn new(params: &BatteryParams) -> Self {
        let envelope = soc_envelope(params);
        let horizon = params.horizon;
        let (pd, pc) = (envelope.p_dis_eff, envelope.p_ch_eff);
        let c = (1..=horizon)
            .map(|t| {
                (0..=horizon - t)
                    .map(|tb| charge_room(params, pc, envelope.soc_lo[t - 1], tb))
                    .collect()
            })
            .collect();
        let d = (1..=horizon)
            .map(|t| {
                (0..=horizon - t)
                    .map(|tb| discharge_room(params, pd, envelope.soc_hi[t - 1], tb))
                    .collect()
            })
            .collect();
        let c_bar = (0..horizon).map(|tb| charge_room(params, pc, params.soc_min, tb)).collect();
        let d_bar = (0..horizon).map(|tb| discharge_room(params, pd, params.soc_max, tb)).collect();
        let zero_tol = 1e-12 * (1.0 + pc.max(pd));
        CoefficientTable {
            horizon,
            envelope,
            round_trip: params.round_trip(),
            zero_tol,
            c,
            d,
            c_bar,
            d_bar,
        }
    }

    /// `c(t, tau_bar)`.
    pub fn c(&self, t: usize, tau_bar: usize) -> f64 {
        self.c[t - 1][tau_bar]
    }

    /// `d(t, tau_bar)`.
    pub fn d(&self, t: usize, tau_bar: usize) -> f64 {
        self.d[t - 1][tau_bar]
    }

    /// Charge room from an empty battery.
    pub fn c_bar(&self, tau_bar: usize) -> f64 {
        self.c_bar[tau_bar]
    }

    /// Discharge room from a full battery.
    pub fn d_bar(&self, tau_bar: usize) -> f64 {
        self.d_bar[tau_bar]
    }

    pub fn ch_rate(&self, t: usize) -> f64 {
        self.envelope.ch_rate(t)
    }

    pub fn dis_rate(&self, t: usize) -> f64 {
        self.envelope.dis_rate(t)
    }

    /// Sum of `c(t, j)` for `j = 0..=tau_bar`.
    pub fn c_sum(&self, t: usize, tau_bar: usize) -> f64 {
        self.c[t - 1][..=tau_bar].iter().sum()
    }

    pub fn d_sum(&self, t: usize, tau_bar: usize) -> f64 {
        self.d[t - 1][..=tau_bar].iter().sum()
    }

    /// Raw charge-side cross term `rho^c(t, tau, tau_bar)`.
    pub fn rho_c(&self, t: usize, tau: usize, tau_bar: usize) -> f64 {
        debug_assert!(tau <= tau_bar && t + tau_bar <= self.horizon);
        let head: f64 = self.c[t - 1][tau..=tau_bar].iter().sum();
        let tail: f64 = self.c_bar[..tau_bar - tau].iter().sum();
        let floor = -self.dis_rate(t + tau) / self.round_trip;
        floor.max(head - tail)
    }

    /// Raw discharge-side cross term `rho^d(t, tau, tau_bar)`.
    pub fn rho_d(&self, t: usize, tau: usize, tau_bar: usize) -> f64 {
        debug_assert!(tau <= tau_bar && t + tau_bar <= self.horizon);
        let head: f64 = self.d[t - 1][tau..=tau_bar].iter().sum();
        let tail: f64 = self.d_bar[..tau_bar - tau].iter().sum();
        let floor = -self.round_trip * self.ch_rate(t + tau);
        floor.max(head - tail)
    }

    /// Weight of `p^d_{t+tau}` in the charge-side window cut.
    pub fn rho_bar_c(&self, t: usize, tau: usize, tau_bar: usize) -> f64 {
        rho_bar(
            self.rho_c(t, tau, tau_bar),
            self.dis_rate(t + tau),
            -1.0 / self.round_trip,
            self.zero_tol,
        )
    }

    /// Weight of `p^c_{t+tau}` in the discharge-side window cut.
    pub fn rho_bar_d(&self, t: usize, tau: usize, tau_bar: usize) -> f64 {
        rho_bar(
            self.rho_d(t, tau, tau_bar),
            self.ch_rate(t + tau),
            -self.round_trip,
            self.zero_tol,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::battery::tests::b1;

    #[test]
    fn b1_values() {
        let p = b1();
        let tab = CoefficientTable::new(&p);
        assert_eq!(tab.c(1, 0), 5.0);
        assert_eq!(tab.c(1, 1), 0.0);
        assert_eq!(tab.d(1, 0), 0.0);
        assert_eq!(tab.d(2, 0), 5.0);
        assert_eq!(tab.c_bar(0), 5.0);
        assert_eq!(tab.c_bar(1), 0.0);
        assert_eq!(tab.rho_c(1, 0, 1), 0.0);
        assert_eq!(tab.rho_c(1, 1, 1), 0.0);
        assert_eq!(tab.rho_bar_c(1, 0, 1), 0.0);
        // first period cannot discharge: positive rho, zero rate
        assert_eq!(tab.rho_c(1, 0, 0), 5.0);
        assert_eq!(tab.rho_bar_c(1, 0, 0), 0.0);
    }

    #[test]
    fn rho_bar_routing() {
        assert_eq!(rho_bar(-1.0, 2.0, -7.0, 1e-12), -7.0);
        assert_eq!(rho_bar(1e-14, 2.0, -7.0, 1e-12), 0.0);
        assert_eq!(rho_bar(1.0, 2.0, -7.0, 1e-12), 0.5);
        assert_eq!(rho_bar(1.0, 0.0, -7.0, 1e-12), 0.0);
    }
}
