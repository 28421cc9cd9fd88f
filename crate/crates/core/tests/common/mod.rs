#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use storage_cuts::BatteryParams;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// 10 kW / 5 kWh lossless battery starting empty, three periods.
pub fn b1() -> BatteryParams {
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

/// Random valid battery. About a quarter of the draws start at a SoC bound.
pub fn random_battery(rng: &mut impl Rng, horizon: usize) -> BatteryParams {
    let soc_min = if rng.gen_bool(0.5) { 0.0 } else { rng.gen_range(0.0..1.0) };
    let cap = rng.gen_range(0.5..6.0);
    let soc_max = soc_min + cap;
    let soc_init = match rng.gen_range(0..8) {
        0 => soc_min,
        1 => soc_max,
        _ => rng.gen_range(soc_min..=soc_max),
    };
    let eta = |rng: &mut dyn rand::RngCore| if rng.gen_bool(0.3) { 1.0 } else { rng.gen_range(0.8..1.0) };
    BatteryParams {
        p_dis_max: rng.gen_range(0.3..5.0),
        p_ch_max: rng.gen_range(0.3..5.0),
        soc_min,
        soc_max,
        eta_c: eta(rng),
        eta_d: eta(rng),
        delta: if rng.gen_bool(0.5) { 1.0 } else { 0.5 },
        soc_init,
        horizon,
    }
}

/// The battery used for the single-anchor illustration: effective charge
/// rate 1, discharge rate 0.5, one period of charge fills it, and a window
/// starting at period 2 sees the full SoC envelope.
pub fn illustration() -> BatteryParams {
    BatteryParams {
        p_dis_max: 0.5,
        p_ch_max: 1.0,
        soc_min: 0.0,
        soc_max: 1.0,
        eta_c: 1.0,
        eta_d: 1.0,
        delta: 1.0,
        soc_init: 0.5,
        horizon: 4,
    }
}
