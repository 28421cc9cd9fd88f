//! Price-driven scheduling on one bundled day: every preset, its objective,
//! and how many hours it charges and discharges at once.
//!
//! cargo run --release --example scheduling [prices.csv]

use storage_cuts::bench::load_series;
use storage_cuts::solve::model::{build_preset, solve, Instance, Preset};
use storage_cuts::BatteryParams;

fn main() -> storage_cuts::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let prices_path = std::env::args().nth(1).unwrap_or_else(|| format!("{dir}/prices/day02.csv"));
    let prices = load_series(&prices_path)?;
    let batteries = BatteryParams::load_all(format!("{dir}/batteries.jsonl"))?;
    let inst = Instance::Prices(prices);

    for (i, params) in batteries.iter().enumerate() {
        println!("battery {}: {} kW / {:.1} kWh", i + 1, params.p_ch_max, params.capacity());
        for preset in [Preset::HCHLP, Preset::TLP, Preset::TLPu, Preset::MILP] {
            let rep = solve(&build_preset(params, preset, &inst)?)?;
            println!(
                "  {:<6} revenue {:9.3}  hours with p_ch*p_dis > 1e-4: {:2}  sum p_ch*p_dis {:8.4}  nodes {:?}",
                preset.as_str(),
                rep.objective,
                rep.violation.0,
                rep.violation.1,
                rep.nodes
            );
        }
    }
    Ok(())
}
