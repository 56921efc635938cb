//! Scenario-running CLI for the `qref-core` simulator.
//!
//! `qref run <scenario>` builds the requested thought experiment, runs the
//! full reduction pipeline, and writes `report.json` (plus `sweep.csv` /
//! `fringe.csv` when applicable) into the output directory.
//!
//! Exit codes: 0 on success, 2 for configuration errors, 3 when a grid is
//! too coarse for the structure it has to resolve.

mod config;
mod output;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qref_core::canon::{cm_relative_map, transform_state, TransformMode};
use qref_core::scenarios::{
    appendix_analysis, interferometer_state, rocket_state, run_frames, run_interferometer,
    run_rocket, run_third_particle, ScenarioReport,
};
use qref_core::Error as CoreError;

use config::{FileConfig, ResolvedConfig, SweepSpec};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("resolution error: {0}")]
    Resolution(String),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Resolution(msg) => CliError::Resolution(msg),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Resolution(_) => 3,
        }
    }
}

#[derive(Parser)]
#[command(name = "qref", version, about = "Few-particle quantum reference frame scenario runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its report files.
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// One of: interferometer, rocket, third-particle, frames, appendix.
    scenario: String,
    /// JSON configuration file; defaults apply for anything omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for report.json and CSV tables.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Parameter sweep, `name=start:stop:lin|log:count`.
    #[arg(long)]
    sweep: Option<String>,
    /// Override the fringe grid point count.
    #[arg(long)]
    grid_points: Option<usize>,
    /// Override the fringe grid half-width.
    #[arg(long)]
    grid_extent: Option<f64>,
    /// Also run the exact two-body transform and embed its reports.
    #[arg(long)]
    exact_transform: bool,
    /// Recorded in report.json for provenance; runs are deterministic.
    #[arg(long)]
    seed: Option<u64>,
    /// Interferometer preparation override, "a" or "b".
    #[arg(long)]
    setup: Option<String>,
}

fn load_file_config(path: Option<&PathBuf>) -> Result<FileConfig, CliError> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("invalid config {}: {e}", p.display())))
        }
    }
}

/// Check the sweep parameter name against what the scenario actually sweeps.
fn check_sweep_parameter(scenario: &str, spec: &SweepSpec) -> Result<(), CliError> {
    let allowed = match scenario {
        "rocket" => "delta_xR",
        "frames" => "phase",
        _ => {
            return Err(CliError::Config(format!(
                "scenario {scenario:?} does not support sweeps"
            )))
        }
    };
    if spec.parameter != allowed {
        return Err(CliError::Config(format!(
            "scenario {scenario:?} sweeps {allowed:?}, not {:?}",
            spec.parameter
        )));
    }
    Ok(())
}

/// Attach the exact two-body transform reports for scenarios whose initial
/// state is a real-width two-body product per branch.
fn attach_exact_reports(
    scenario: &str,
    file: &FileConfig,
    args: &RunArgs,
    report: &mut ScenarioReport,
) -> Result<(), CliError> {
    let state = match scenario {
        "interferometer" | "frames" => interferometer_state(&file.interferometer(args.setup.as_deref())?)?,
        "rocket" => {
            let cfg = file.rocket()?;
            rocket_state(&cfg, cfg.delta_xr)?
        }
        _ => {
            return Err(CliError::Config(format!(
                "--exact-transform is not available for scenario {scenario:?}"
            )))
        }
    };
    let map = cm_relative_map(state.masses())?;
    let reports = transform_state(&state, &map, TransformMode::Exact)?.into_reports()?;
    report.exact_reports = reports;
    Ok(())
}

fn run(args: &RunArgs) -> Result<(), CliError> {
    let mut file = load_file_config(args.config.as_ref())?;
    if let Some(points) = args.grid_points {
        file.grid.get_or_insert_with(Default::default).points = Some(points);
    }
    if let Some(extent) = args.grid_extent {
        file.grid.get_or_insert_with(Default::default).extent = Some(extent);
    }
    let sweep_spec = match &args.sweep {
        Some(raw) => {
            let spec = SweepSpec::parse(raw)?;
            check_sweep_parameter(&args.scenario, &spec)?;
            Some(spec)
        }
        None => None,
    };

    let (resolved, mut report) = match args.scenario.as_str() {
        "interferometer" => {
            let cfg = file.interferometer(args.setup.as_deref())?;
            let report = run_interferometer(&cfg)?;
            (ResolvedConfig::Interferometer(cfg), report)
        }
        "rocket" => {
            let cfg = file.rocket()?;
            let sweep_values = sweep_spec.as_ref().map(|s| s.values()).unwrap_or_default();
            let report = run_rocket(&cfg, &sweep_values)?;
            (ResolvedConfig::Rocket(cfg), report)
        }
        "third-particle" => {
            let cfg = file.third_particle()?;
            let report = run_third_particle(&cfg)?;
            (ResolvedConfig::ThirdParticle(cfg), report)
        }
        "frames" => {
            let (base, mut phases) = file.frames(args.setup.as_deref())?;
            if let Some(spec) = &sweep_spec {
                phases = spec.values();
            }
            let report = run_frames(&base, &phases)?;
            (ResolvedConfig::Frames { base, phases }, report)
        }
        "appendix" => {
            let cfg = file.appendix()?;
            let report = appendix_analysis(&cfg)?;
            (ResolvedConfig::Appendix(cfg), report)
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown scenario {other:?} (expected interferometer, rocket, third-particle, frames, or appendix)"
            )))
        }
    };

    let exact_wanted = args.exact_transform || file.exact_transform_requested();
    if exact_wanted && !matches!(args.scenario.as_str(), "appendix") {
        attach_exact_reports(&args.scenario, &file, args, &mut report)?;
    }

    output::write_outputs(&args.out, &resolved, args.seed, sweep_spec.as_ref(), &report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => match run(&args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("qref: {e}");
                ExitCode::from(e.exit_code())
            }
        },
    }
}
