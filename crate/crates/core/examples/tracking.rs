//! Setpoint tracking: exact MIQP, the linear relaxations, the cylinder QP, and
//! the same cylinder written with explicit epigraph variables and cones.
//!
//! cargo run --release --example tracking [net_demand.csv]

use storage_cuts::bench::load_series;
use storage_cuts::solve::barrier::{solve_conic, ConicModel};
use storage_cuts::solve::model::{build_preset, solve, Instance, Preset};
use storage_cuts::BatteryParams;

fn main() -> storage_cuts::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let path = std::env::args().nth(1).unwrap_or_else(|| format!("{dir}/net_demand/house04.csv"));
    let setpoints = load_series(&path)?;
    let params = BatteryParams::load_all(format!("{dir}/tracking_battery.json"))?.remove(0);
    let inst = Instance::Setpoints(setpoints.clone());

    for preset in [Preset::HCHLP, Preset::TLP, Preset::TLPSOC, Preset::MIQP] {
        let rep = solve(&build_preset(&params, preset, &inst)?)?;
        println!(
            "{:<6} squared error {:9.5}  hours with p_ch*p_dis > 1e-4: {:2}  {:8.1} ms",
            preset.as_str(),
            rep.objective,
            rep.violation.0,
            rep.wall_time_ms
        );
    }

    // the cone model on the first six hours, against the substituted QP
    let short = BatteryParams { horizon: 6, ..params };
    let head = setpoints[..6].to_vec();
    let qp = solve(&build_preset(&short, Preset::TLPSOC, &Instance::Setpoints(head.clone()))?)?;
    let cone = solve_conic(&ConicModel::tracking(&short, &head)?)?;
    println!(
        "first 6 hours: cylinder QP {:.9}, explicit cones {:.9} ({} Newton steps, gap bound {:.1e})",
        qp.objective, cone.objective, cone.newton_steps, cone.gap_bound
    );
    Ok(())
}
