//! The baseline cut family is implied by the window cuts: every baseline
//! cut is maximised over the window polytope by LP.
//!
//! cargo run --example pozo_dominance

use storage_cuts::cuts::certify::pozo_dominance;
use storage_cuts::cuts::gen_pozo_cuts;
use storage_cuts::BatteryParams;

fn main() -> storage_cuts::Result<()> {
    for (soc_init, eta) in [(0.0, 1.0), (2.5, 0.9), (5.0, 0.95)] {
        let params = BatteryParams {
            p_dis_max: 3.0,
            p_ch_max: 2.0,
            soc_min: 0.0,
            soc_max: 5.0,
            eta_c: eta,
            eta_d: eta,
            delta: 1.0,
            soc_init,
            horizon: 8,
        };
        let rep = pozo_dominance(&params)?;
        println!(
            "s0 = {soc_init:3.1}, eta = {eta:4.2}: {} baseline cuts ({} generated), worst LP excess {:+.2e}, implied = {}",
            rep.cuts_checked,
            gen_pozo_cuts(&params).len(),
            rep.max_violation,
            rep.pass
        );
    }
    Ok(())
}
