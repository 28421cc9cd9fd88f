//! Exhaustive submodularity certificate for the window set functions, and
//! the closed forms checked against their LP definitions.
//!
//! cargo run --example submodularity

use storage_cuts::battery::soc_envelope;
use storage_cuts::submodular::{check_submodularity, eval_f_closed, eval_f_lp, PeriodSet, SetFn, WindowSpec};
use storage_cuts::BatteryParams;

fn main() -> storage_cuts::Result<()> {
    let params = BatteryParams {
        p_dis_max: 2.0,
        p_ch_max: 3.0,
        soc_min: 0.5,
        soc_max: 5.0,
        eta_c: 0.9,
        eta_d: 0.95,
        delta: 1.0,
        soc_init: 1.0,
        horizon: 6,
    };
    let env = soc_envelope(&params);
    let win = WindowSpec::new(&params, 2, 5, env.soc_lo[1])?;

    let cert = check_submodularity(&win)?;
    println!("{} (A, B, j) triples checked", cert.triples);
    for f in SetFn::ALL {
        println!("  {f:?}: min f(j|A) - f(j|B) = {:.3e}", cert.margin(f));
    }
    println!("certificate passes: {}", cert.pass);

    let mut worst: f64 = 0.0;
    for mask in 0..1u64 << win.length {
        let omega = PeriodSet(mask);
        worst = worst.max((eval_f_closed(&win, omega) - eval_f_lp(&win, omega)?).abs());
    }
    println!("closed form vs LP over all {} sets: max gap {worst:.2e}", 1 << win.length);
    Ok(())
}
