//! A reduced sweep over the bundled price data, configured in code.
//!
//! cargo run --release --example bench_sweep

use storage_cuts::bench::{render_csv, render_markdown, run_benchmark, ExperimentConfig, Problem};
use storage_cuts::solve::model::Preset;

fn main() -> storage_cuts::Result<()> {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let mut cfg = ExperimentConfig {
        battery_files: vec!["batteries.jsonl".into()],
        instance_files: vec!["prices/day02.csv".into(), "prices/day06.csv".into()],
        problem: Problem::Scheduling,
        presets: vec![Preset::MILP, Preset::HCHLP, Preset::TLP, Preset::TLPu],
        threshold: 1e-4,
        output: std::env::temp_dir().join("bench_sweep.csv"),
        parallelism: 2,
        timing: true,
    };
    cfg.resolve_paths(&dir);
    let exp = cfg.prepare()?;
    println!("{} batteries x {} price days", exp.batteries.len(), exp.instances.len());
    let outcome = run_benchmark(&exp)?;
    print!("{}", render_markdown(&outcome.rows)?);
    println!("\n{}", render_csv(&outcome.rows)?);
    for r in outcome.results.iter().filter(|r| r.preset == Preset::HCHLP) {
        if let Ok(s) = &r.outcome {
            println!("{} / {}: {} simultaneous hours", r.battery, r.instance, s.violated_hours);
        }
    }
    Ok(())
}
