use std::time::Instant;

use rayon::prelude::*;

use crate::battery::violation_metrics;
use crate::bench::config::Experiment;
use crate::bench::report::BenchRow;
use crate::error::{Error, Result};
use crate::solve::model::{build_preset, solve, Preset, SolveReport};
use crate::solve::Status;

const TIMING_REPEATS: usize = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct InstanceStats {
    /// Objective in the model's own sense.
    pub objective: f64,
    pub violated_hours: usize,
    pub hours: usize,
    /// `sum_t p_ch_t * p_dis_t` (kW^2).
    pub comp_product: f64,
    /// Median solve time, when timing is on.
    pub time_ms: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InstanceResult {
    pub battery: String,
    pub instance: String,
    pub preset: Preset,
    pub outcome: std::result::Result<InstanceStats, String>,
}

#[derive(Clone, Debug)]
pub struct InstanceFailure<'a> {
    pub battery: &'a str,
    pub instance: &'a str,
    pub preset: Preset,
    pub message: &'a str,
}

#[derive(Clone, Debug)]
pub struct BenchOutcome {
    /// One row per preset, in config order.
    pub rows: Vec<BenchRow>,
    /// Battery-major, then instance, then preset.
    pub results: Vec<InstanceResult>,
}

impl BenchOutcome {
    pub fn failures(&self) -> impl Iterator<Item = InstanceFailure<'_>> {
        self.results.iter().filter_map(|r| match &r.outcome {
            Ok(_) => None,
            Err(message) => Some(InstanceFailure {
                battery: &r.battery,
                instance: &r.instance,
                preset: r.preset,
                message,
            }),
        })
    }

    pub fn num_failures(&self) -> usize {
        self.failures().count()
    }
}

fn solve_once(exp: &Experiment, b: usize, i: usize, preset: Preset) -> Result<SolveReport> {
    let params = &exp.batteries[b].1;
    let instance = exp.config.problem.instance(exp.instances[i].1.clone());
    let model = build_preset(params, preset, &instance)?;
    let rep = solve(&model)?;
    if rep.status != Status::Optimal {
        return Err(Error::Solver(format!("status {:?}", rep.status)));
    }
    Ok(rep)
}

fn run_job(exp: &Experiment, b: usize, i: usize, preset: Preset) -> InstanceResult {
    let cfg = &exp.config;
    let outcome = (|| {
        let repeats = if cfg.timing { TIMING_REPEATS } else { 1 };
        let mut times = Vec::with_capacity(repeats);
        let mut last = None;
        for _ in 0..repeats {
            let started = Instant::now();
            let rep = solve_once(exp, b, i, preset)?;
            times.push(started.elapsed().as_secs_f64() * 1e3);
            last = Some(rep);
        }
        let rep = last.expect("at least one solve");
        let traj = rep.trajectory.as_ref().ok_or_else(|| Error::Solver("no trajectory".into()))?;
        let (violated_hours, _) = violation_metrics(traj, cfg.threshold);
        times.sort_by(f64::total_cmp);
        Ok::<_, Error>(InstanceStats {
            objective: rep.objective,
            violated_hours,
            hours: traj.len(),
            comp_product: traj.p_ch.iter().zip(&traj.p_dis).map(|(c, d)| c * d).sum(),
            time_ms: cfg.timing.then(|| times[times.len() / 2]),
        })
    })();
    InstanceResult {
        battery: exp.batteries[b].0.clone(),
        instance: exp.instances[i].0.clone(),
        preset,
        outcome: outcome.map_err(|e| e.to_string()),
    }
}

/// Solves every (battery, instance, preset) triple and aggregates per preset.
/// Solver failures are recorded, never fatal.
pub fn run_benchmark(exp: &Experiment) -> Result<BenchOutcome> {
    let cfg = &exp.config;
    let jobs: Vec<(usize, usize, Preset)> = (0..exp.batteries.len())
        .flat_map(|b| (0..exp.instances.len()).flat_map(move |i| cfg.presets.iter().map(move |&p| (b, i, p))))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallelism)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    let results: Vec<InstanceResult> =
        pool.install(|| jobs.par_iter().map(|&(b, i, p)| run_job(exp, b, i, p)).collect());

    let exact = cfg.problem.exact_preset();
    let mean_time = |preset: Preset| -> Option<f64> {
        let times: Vec<f64> = results
            .iter()
            .filter(|r| r.preset == preset)
            .filter_map(|r| r.outcome.as_ref().ok().and_then(|s| s.time_ms))
            .collect();
        (!times.is_empty()).then(|| times.iter().sum::<f64>() / times.len() as f64)
    };
    let exact_time = if cfg.presets.contains(&exact) { mean_time(exact) } else { None };

    let rows = cfg
        .presets
        .iter()
        .map(|&preset| {
            let mine: Vec<&InstanceResult> = results.iter().filter(|r| r.preset == preset).collect();
            let ok: Vec<&InstanceStats> = mine.iter().filter_map(|r| r.outcome.as_ref().ok()).collect();
            let hours: usize = ok.iter().map(|s| s.hours).sum();
            let violated: usize = ok.iter().map(|s| s.violated_hours).sum();
            let n = ok.len() as f64;
            BenchRow {
                formulation: preset.as_str().to_string(),
                pct_hours_violated: if hours == 0 { 0.0 } else { 100.0 * violated as f64 / hours as f64 },
                mean_comp_product: if ok.is_empty() { 0.0 } else { ok.iter().map(|s| s.comp_product).sum::<f64>() / n },
                delta_time_pct: match (exact_time, mean_time(preset)) {
                    (Some(e), Some(t)) if e > 0.0 => Some(100.0 * (e - t) / e),
                    _ => None,
                },
                mean_obj: (!ok.is_empty()).then(|| ok.iter().map(|s| s.objective).sum::<f64>() / n),
                instances: mine.len(),
                failures: mine.len() - ok.len(),
            }
        })
        .collect();
    Ok(BenchOutcome { rows, results })
}
