//! `cavsim`: run merge scenarios, export traces and compare runs.
//!
//! Exit codes: 0 success, 1 other failure, 2 scenario error, 3 safety
//! violation detected.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use cavsim::export::{comparison_to_toml, read_report, write_report};
use cavsim::{compare, detect_collisions, export_trace, run, travel_metrics, ControlMode, Format, Scenario, SimError};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "cavsim", version, about = "Coordinated merging microsimulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Optimal,
    Baseline,
}

impl From<ModeArg> for ControlMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Optimal => ControlMode::Optimal,
            ModeArg::Baseline => ControlMode::Baseline,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Jsonl,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Jsonl => Format::Jsonl,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario, write the trace and a summary report.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        /// Overrides the mode in the scenario file.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
    },
    /// Compare two summary reports, or run a scenario in both modes and
    /// compare the results.
    Compare {
        /// Report under test, then the baseline report.
        #[arg(num_args = 2, conflicts_with = "scenario")]
        reports: Vec<PathBuf>,
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Where to write per-mode outputs and `comparison.toml`.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
    },
    /// Check a scenario file without running it.
    Validate {
        #[arg(long)]
        scenario: PathBuf,
    },
}

enum Failure {
    Scenario(anyhow::Error),
    Other(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

fn scenario_error(e: SimError) -> Failure {
    Failure::Scenario(e.into())
}

fn load(path: &Path, mode: Option<ModeArg>, seed: Option<u64>) -> Result<Scenario, Failure> {
    let mut s = Scenario::load(path).map_err(|e| match e {
        SimError::Io(io) => Failure::Other(anyhow::Error::new(io).context(format!("reading {}", path.display()))),
        other => scenario_error(other),
    })?;
    if let Some(m) = mode {
        s = s.with_mode(m.into());
    }
    if let Some(seed) = seed {
        s = s.with_seed(seed);
    }
    Ok(s)
}

/// Runs one scenario into `out_dir`; returns the report and the number of
/// safety events.
fn run_one(scenario: &Scenario, out_dir: &Path, format: Format) -> Result<(cavsim::MetricsReport, usize), Failure> {
    let trace = run(scenario).map_err(scenario_error)?;
    export_trace(&trace, format, out_dir).with_context(|| format!("writing trace to {}", out_dir.display()))?;
    let report = travel_metrics(&trace).map_err(scenario_error)?;
    write_report(&report, out_dir.join("summary.toml")).context("writing summary")?;
    let events = detect_collisions(&trace, &scenario.merge);
    for e in &events {
        eprintln!("safety: {e:?}");
    }
    Ok((report, events.len()))
}

fn print_report(r: &cavsim::MetricsReport) {
    println!("mode = {}", r.mode.as_str());
    println!("vehicles = {}", r.vehicle_count);
    println!("makespan_s = {:.3}", r.makespan);
    println!("stops = {} (secondary {}, max queue {})", r.total_stops, r.secondary_stops, r.max_secondary_queue);
    println!("effort_proxy = {:.6}", r.total_effort);
    println!("traction_proxy = {:.6}", r.total_traction);
    println!("safety_events = {}", r.safety_events);
}

fn pct(p: Option<f64>) -> String {
    p.map_or_else(|| "n/a".to_string(), |v| format!("{v:.1}%"))
}

fn execute(cli: Cli) -> Result<bool, Failure> {
    match cli.command {
        Command::Run {
            scenario,
            mode,
            seed,
            out_dir,
            format,
        } => {
            let s = load(&scenario, mode, seed)?;
            let (report, unsafe_events) = run_one(&s, &out_dir, format.into())?;
            print_report(&report);
            Ok(unsafe_events == 0)
        }
        Command::Compare {
            reports,
            scenario,
            seed,
            out_dir,
            format,
        } => {
            let (a, b, safe) = match scenario {
                Some(path) => {
                    let out = out_dir.clone().unwrap_or_else(|| PathBuf::from("out"));
                    let optimal = load(&path, Some(ModeArg::Optimal), seed)?;
                    let baseline = optimal.clone().with_mode(ControlMode::Baseline);
                    let (a, na) = run_one(&optimal, &out.join("optimal"), format.into())?;
                    let (b, nb) = run_one(&baseline, &out.join("baseline"), format.into())?;
                    print_report(&a);
                    print_report(&b);
                    (a, b, na + nb == 0)
                }
                None if reports.len() == 2 => {
                    let a = read_report(&reports[0]).map_err(|e| Failure::Other(e.into()))?;
                    let b = read_report(&reports[1]).map_err(|e| Failure::Other(e.into()))?;
                    (a, b, true)
                }
                None => return Err(Failure::Other(anyhow::anyhow!("give two reports or --scenario"))),
            };
            let c = compare(&a, &b).map_err(|e| Failure::Other(e.into()))?;
            println!("makespan_savings = {}", pct(c.makespan_savings_pct));
            println!("effort_savings = {}", pct(c.effort_savings_pct));
            println!("traction_savings = {}", pct(c.traction_savings_pct));
            if let Some(dir) = out_dir {
                std::fs::create_dir_all(&dir).context("creating output directory")?;
                let text = comparison_to_toml(&c).map_err(|e| Failure::Other(e.into()))?;
                std::fs::write(dir.join("comparison.toml"), text).context("writing comparison")?;
            }
            Ok(safe)
        }
        Command::Validate { scenario } => {
            let s = load(&scenario, None, None)?;
            println!(
                "ok: {} roads, {} vehicles, mode {}",
                s.roads.len(),
                s.vehicles.len(),
                s.mode.as_str()
            );
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: safety violations detected");
            ExitCode::from(3)
        }
        Err(Failure::Scenario(e)) => {
            eprintln!("scenario error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
