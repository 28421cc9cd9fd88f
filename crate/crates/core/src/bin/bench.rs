//! Experiment harness.
//!
//! Exit status: 0 on success, 1 on a configuration or input error, 2 when any
//! instance fails to solve or any verification check fails.

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use storage_cuts::bench::{emit_report, render_markdown, run_benchmark, run_verify, ExperimentConfig, ReportFormat};
use storage_cuts::cuts::export::write_cuts_csv;
use storage_cuts::cuts::redundancy::redundancy_filter;
use storage_cuts::cuts::{gen_pozo_cuts, gen_u_cuts, gen_window_cuts};
use storage_cuts::{BatteryParams, Error};

#[derive(Parser)]
#[command(name = "bench", version, about = "Valid-inequality experiments for battery storage models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every preset over the batteries and instances of a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override the report path from the config.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Skip wall-time measurement for byte-stable reports.
        #[arg(long)]
        no_timing: bool,
        /// Override the worker count from the config.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Export a cut family for one battery as CSV.
    Cuts {
        #[arg(long)]
        battery: PathBuf,
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        out: PathBuf,
        /// Battery to use when the file holds several (1-based).
        #[arg(long, default_value_t = 1)]
        index: usize,
        /// Keep window cuts implied by shorter ones.
        #[arg(long)]
        keep_redundant: bool,
    },
    /// Run the property and certificate suite on one battery.
    Verify {
        #[arg(long)]
        battery: PathBuf,
        #[arg(long)]
        horizon: usize,
        #[arg(long, default_value_t = 1)]
        index: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Window,
    U,
    Pozo,
}

fn load_battery(path: &PathBuf, index: usize) -> Result<BatteryParams, Error> {
    let all = BatteryParams::load_all(path)?;
    let count = all.len();
    index
        .checked_sub(1)
        .and_then(|i| all.into_iter().nth(i))
        .ok_or_else(|| Error::Config(format!("{}: battery {index} requested, file holds {count}", path.display())))
}

fn run(cli: Cli) -> Result<bool, Error> {
    match cli.command {
        Command::Run { config, output, no_timing, jobs } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(out) = output {
                cfg.output = out;
            }
            if no_timing {
                cfg.timing = false;
            }
            if let Some(j) = jobs {
                cfg.parallelism = j;
            }
            cfg.validate()?;
            let exp = cfg.prepare()?;
            let outcome = run_benchmark(&exp)?;
            emit_report(&outcome.rows, ReportFormat::from_path(&cfg.output), &cfg.output)?;
            print!("{}", render_markdown(&outcome.rows)?);
            for f in outcome.failures() {
                eprintln!("failed: battery {} instance {} preset {}: {}", f.battery, f.instance, f.preset, f.message);
            }
            eprintln!("report written to {}", cfg.output.display());
            Ok(outcome.num_failures() == 0)
        }
        Command::Cuts { battery, family, out, index, keep_redundant } => {
            let params = load_battery(&battery, index)?;
            let cuts = match family {
                Family::Window if keep_redundant => gen_window_cuts(&params),
                Family::Window => redundancy_filter(gen_window_cuts(&params), &params),
                Family::U => gen_u_cuts(&params),
                Family::Pozo => gen_pozo_cuts(&params),
            };
            let file = File::create(&out).map_err(|e| Error::Config(format!("{}: {e}", out.display())))?;
            write_cuts_csv(&cuts, BufWriter::new(file))?;
            eprintln!("{} cuts written to {}", cuts.len(), out.display());
            Ok(true)
        }
        Command::Verify { battery, horizon, index } => {
            let params = BatteryParams { horizon, ..load_battery(&battery, index)? };
            params.validate()?;
            let checks = run_verify(&params)?;
            for c in &checks {
                println!("{} {:<20} {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            Ok(checks.iter().all(|c| c.pass))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Solver(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
