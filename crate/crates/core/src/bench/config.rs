use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::battery::BatteryParams;
use crate::bench::series::load_series;
use crate::error::{Error, Result};
use crate::solve::model::{Instance, Preset, DEFAULT_THRESHOLD};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    /// Price-driven arbitrage; instance files hold prices.
    Scheduling,
    /// Setpoint following; instance files hold net demand.
    Tracking,
}

impl Problem {
    pub fn instance(self, series: Vec<f64>) -> Instance {
        match self {
            Problem::Scheduling => Instance::Prices(series),
            Problem::Tracking => Instance::Setpoints(series),
        }
    }

    /// The complementarity-enforcing preset timings are compared against.
    pub fn exact_preset(self) -> Preset {
        match self {
            Problem::Scheduling => Preset::MILP,
            Problem::Tracking => Preset::MIQP,
        }
    }
}

fn default_threshold() -> f64 {
    DEFAULT_THRESHOLD
}

fn default_parallelism() -> usize {
    1
}

fn default_timing() -> bool {
    true
}

/// JSON experiment description. Relative paths are resolved against the
/// directory holding the config file. An entry of `instance_files` may name a
/// directory, in which case its `*.csv` files are used in name order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub battery_files: Vec<PathBuf>,
    pub instance_files: Vec<PathBuf>,
    pub problem: Problem,
    pub presets: Vec<Preset>,
    /// Complementarity threshold in kW^2.
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    /// Report path; `.md` selects markdown, anything else CSV.
    pub output: PathBuf,
    #[serde(default = "default_parallelism")]
    pub parallelism: usize,
    /// Measure wall time (median of three solves). Off gives byte-stable
    /// reports with an empty time column.
    #[serde(default = "default_timing")]
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: ExperimentConfig =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        self.battery_files.iter_mut().for_each(fix);
        self.instance_files.iter_mut().for_each(fix);
        fix(&mut self.output);
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.battery_files.is_empty() {
            return bad("battery_files is empty".into());
        }
        if self.instance_files.is_empty() {
            return bad("instance_files is empty".into());
        }
        if self.presets.is_empty() {
            return bad("presets is empty".into());
        }
        let probe = self.problem.instance(Vec::new());
        for (i, p) in self.presets.iter().enumerate() {
            if !p.supports(&probe) {
                return bad(format!("preset {p} does not apply to {:?} problems", self.problem));
            }
            if self.presets[..i].contains(p) {
                return bad(format!("preset {p} listed twice"));
            }
        }
        if !(self.threshold > 0.0 && self.threshold.is_finite()) {
            return bad(format!("threshold must be positive, got {}", self.threshold));
        }
        if self.parallelism == 0 {
            return bad("parallelism must be at least 1".into());
        }
        Ok(())
    }

    /// Loads every battery and series and checks horizons agree.
    pub fn prepare(&self) -> Result<Experiment> {
        self.validate()?;
        let mut batteries = Vec::new();
        for path in &self.battery_files {
            let list = BatteryParams::load_all(path).map_err(|e| Error::Config(e.to_string()))?;
            let stem = label(path);
            let many = list.len() > 1;
            for (i, b) in list.into_iter().enumerate() {
                let name = if many { format!("{stem}#{}", i + 1) } else { stem.clone() };
                batteries.push((name, b));
            }
        }
        let mut files = Vec::new();
        for path in &self.instance_files {
            if path.is_dir() {
                let entries = std::fs::read_dir(path).map_err(|e| Error::io(path, e))?;
                let mut csvs: Vec<PathBuf> = entries
                    .filter_map(|e| e.ok().map(|e| e.path()))
                    .filter(|p| p.extension().is_some_and(|x| x == "csv"))
                    .collect();
                csvs.sort();
                if csvs.is_empty() {
                    return Err(Error::Config(format!("{}: no csv files", path.display())));
                }
                files.extend(csvs);
            } else {
                files.push(path.clone());
            }
        }
        let mut instances = Vec::new();
        for path in files {
            let series = load_series(&path).map_err(|e| Error::Config(e.to_string()))?;
            instances.push((label(&path), series));
        }
        for (bname, b) in &batteries {
            for (iname, s) in &instances {
                if s.len() != b.horizon {
                    return Err(Error::Config(format!(
                        "{iname} has {} periods but battery {bname} has horizon {}",
                        s.len(),
                        b.horizon
                    )));
                }
            }
        }
        Ok(Experiment { config: self.clone(), batteries, instances })
    }
}

fn label(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

/// A config with its data loaded.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub batteries: Vec<(String, BatteryParams)>,
    pub instances: Vec<(String, Vec<f64>)>,
}
