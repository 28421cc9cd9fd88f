//! Effective rates, the reachable SoC envelope, and membership checks.
//!
//! cargo run --example envelope

use storage_cuts::battery::{effective_rates, membership, simulate_soc, soc_envelope};
use storage_cuts::{BatteryParams, FeasibleSet};

fn main() -> storage_cuts::Result<()> {
    let params = BatteryParams {
        p_dis_max: 4.0,
        p_ch_max: 3.0,
        soc_min: 0.0,
        soc_max: 8.0,
        eta_c: 0.92,
        eta_d: 0.96,
        delta: 1.0,
        soc_init: 2.0,
        horizon: 6,
    };
    params.validate()?;
    let (dis, ch) = effective_rates(&params);
    println!("effective rates: discharge {dis:.3} kW, charge {ch:.3} kW");

    let env = soc_envelope(&params);
    // soc_lo[t - 1], soc_hi[t - 1]: reachable SoC range entering period t
    println!(" t   soc_lo   soc_hi   ch_rate  dis_rate");
    for t in 1..=params.horizon {
        println!(
            "{t:2} {:8.3} {:8.3} {:9.3} {:9.3}",
            env.soc_lo[t - 1],
            env.soc_hi[t - 1],
            env.ch_rate(t),
            env.dis_rate(t)
        );
    }

    // charge, idle, then discharge
    let p_ch = [3.0, 3.0, 0.0, 0.0, 0.0, 0.0];
    let p_dis = [0.0, 0.0, 0.0, 4.0, 3.0, 0.0];
    let traj = simulate_soc(&params, &p_dis, &p_ch)?;
    println!("soc trajectory: {:?}", traj.soc.iter().map(|s| format!("{s:.3}")).collect::<Vec<_>>());
    let rep = membership(&params, &traj, FeasibleSet::P)?;
    println!("in P: {} (soc bound excess {:.3})", rep.member, rep.soc_bounds);
    Ok(())
}
