//! Command-line front end: run scenarios, sweeps, calibration and replays.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use clap::{Parser, Subcommand};

use dualmcl_core::bench::io::{self as dio, TraceRow};
use dualmcl_core::bench::{rmse, rmse_of_errors, run_sweep};
use dualmcl_core::sim::{presets, replay};
use dualmcl_core::{calibrate, EstimatorKind, ScenarioConfig};

#[derive(Parser)]
#[command(name = "dualmcl", version, about = "UWB relative localization simulator and benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Overrides shared by the scenario-driven commands.
#[derive(clap::Args)]
struct RunArgs {
    /// Seed for the run (for sweeps: the base seed).
    #[arg(long)]
    seed: Option<u64>,
    /// Number of steps to simulate or replay.
    #[arg(long)]
    steps: Option<usize>,
    /// Steps dropped from the start before computing RMSE.
    #[arg(long)]
    skip_transient: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario from a JSON config and print its RMSE.
    Simulate {
        config: PathBuf,
        /// Write the per-step trace as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run a parameter sweep from a JSON spec and print per-value statistics.
    Sweep {
        spec: PathBuf,
        /// Write the raw `value,seed,rmse` table as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Estimate per-anchor range bias and noise from `anchor_id,measured_m,truth_m` records.
    Calibrate { records: PathBuf },
    /// Re-run an estimator over the ranges and anchor commands of a trace.
    Replay {
        trace: PathBuf,
        /// dual_mcl, standard_pf or ekf.
        #[arg(long)]
        estimator: EstimatorKind,
        /// Scenario config supplying rate, anchor layout, initial belief and
        /// filter parameters (defaults to the case1 preset).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write the replayed trace as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Print a built-in scenario config as JSON.
    Preset {
        /// case1, static, agile, formation_straight or formation_periodic.
        name: String,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut out = io::stdout().lock();
    match cli.command {
        Command::Simulate { config, trace, run } => simulate(config, trace, run, &mut out),
        Command::Sweep { spec, out: path, run } => sweep(spec, path, run, &mut out),
        Command::Calibrate { records } => calibrate_cmd(records, &mut out),
        Command::Replay {
            trace,
            estimator,
            config,
            out: path,
            run,
        } => replay_cmd(trace, estimator, config, path, run, &mut out),
        Command::Preset { name } => {
            let cfg = presets::by_name(&name).with_context(|| {
                format!("unknown preset `{name}`; available: {}", presets::NAMES.join(", "))
            })?;
            writeln!(out, "{}", cfg.to_json()?)?;
            Ok(())
        }
    }
}

fn simulate(config: PathBuf, trace_path: Option<PathBuf>, run: RunArgs, out: &mut impl Write) -> Result<()> {
    let mut cfg = dio::read_scenario(&config).with_context(|| format!("reading {}", config.display()))?;
    if let Some(seed) = run.seed {
        cfg.seed = seed;
    }
    if let Some(steps) = run.steps {
        cfg.n_steps = steps;
    }
    let skip = run.skip_transient.unwrap_or(0);
    let trace = dualmcl_core::run_scenario(&cfg)?;
    let value = rmse(&trace, skip)?;
    ensure!(value.is_finite(), "RMSE is not finite");
    if let Some(path) = trace_path {
        dio::write_trace(&trace, &path).with_context(|| format!("writing {}", path.display()))?;
    }
    let last = trace.steps.last().expect("validated config has steps");
    writeln!(out, "estimator: {}", trace.estimator)?;
    writeln!(out, "seed: {}", cfg.seed)?;
    writeln!(out, "steps: {}", trace.len())?;
    writeln!(out, "rmse: {value:.6}")?;
    writeln!(out, "skip_transient: {skip}")?;
    writeln!(out, "final_error: {:.6}", last.err)?;
    Ok(())
}

fn sweep(spec_path: PathBuf, out_path: Option<PathBuf>, run: RunArgs, out: &mut impl Write) -> Result<()> {
    let mut spec = dio::read_sweep_spec(&spec_path).with_context(|| format!("reading {}", spec_path.display()))?;
    if let Some(seed) = run.seed {
        spec.base.seed = seed;
    }
    if let Some(steps) = run.steps {
        spec.base.n_steps = steps;
    }
    if let Some(skip) = run.skip_transient {
        spec.skip_transient = skip;
    }
    let result = run_sweep(&spec)?;
    if let Some(e) = result.entries.iter().find(|e| !e.rmse.is_finite()) {
        bail!("run {} with seed {} produced a non-finite RMSE", e.value, e.seed);
    }
    if let Some(path) = out_path {
        let file = File::create(&path).with_context(|| format!("writing {}", path.display()))?;
        dio::write_sweep_entries_to(&result, file)?;
    }
    dio::write_sweep_summary_to(&result.summary, &mut *out)?;
    Ok(())
}

fn calibrate_cmd(path: PathBuf, out: &mut impl Write) -> Result<()> {
    let records = dio::read_calibration(&path).with_context(|| format!("reading {}", path.display()))?;
    let model = calibrate(&records)?;
    ensure!(
        model.bias.iter().chain(&model.sigma).all(|v| v.is_finite()),
        "calibration produced non-finite values"
    );
    writeln!(out, "anchor,pairs,bias_m,sigma_m")?;
    for i in 0..3 {
        writeln!(out, "{},{},{:.6},{:.6}", i + 1, records.pairs[i].len(), model.bias[i], model.sigma[i])?;
    }
    Ok(())
}

fn replay_cmd(
    trace_path: PathBuf,
    kind: EstimatorKind,
    config: Option<PathBuf>,
    out_path: Option<PathBuf>,
    run: RunArgs,
    out: &mut impl Write,
) -> Result<()> {
    let cfg = match &config {
        Some(path) => dio::read_scenario(path).with_context(|| format!("reading {}", path.display()))?,
        None => presets::case1(),
    };
    let mut rows = dio::read_trace(&trace_path).with_context(|| format!("reading {}", trace_path.display()))?;
    if let Some(steps) = run.steps {
        rows.truncate(steps);
    }
    ensure!(!rows.is_empty(), "trace has no rows");
    check_rate(&rows, &cfg)?;

    let seed = run.seed.unwrap_or(cfg.seed);
    let estimator = presets::estimator_for(kind, &cfg).with_ts(cfg.ts());
    let ranges: Vec<_> = rows.iter().map(TraceRow::ranges).collect();
    let cmds: Vec<_> = rows.iter().map(TraceRow::v0_cmd).collect();
    let estimates = replay(&ranges, &cmds, &estimator, &cfg.init_region, &cfg.layout()?, seed)?;

    let replayed: Vec<TraceRow> = rows
        .iter()
        .zip(&estimates)
        .map(|(row, e)| TraceRow {
            rhat_x: e.r_hat.x,
            rhat_y: e.r_hat.y,
            err: (e.r_hat - row.r_true()).norm(),
            ..*row
        })
        .collect();
    if replayed.iter().any(|r| !(r.rhat_x.is_finite() && r.rhat_y.is_finite())) {
        bail!("replay produced a non-finite estimate");
    }
    let skip = run.skip_transient.unwrap_or(0);
    let errors: Vec<f64> = replayed.iter().map(|r| r.err).collect();
    let value = rmse_of_errors(&errors, skip)?;
    if let Some(path) = out_path {
        let file = File::create(&path).with_context(|| format!("writing {}", path.display()))?;
        dio::write_trace_to(&replayed, file)?;
    }
    writeln!(out, "estimator: {kind}")?;
    writeln!(out, "seed: {seed}")?;
    writeln!(out, "steps: {}", replayed.len())?;
    writeln!(out, "rmse: {value:.6}")?;
    writeln!(out, "skip_transient: {skip}")?;
    Ok(())
}

fn check_rate(rows: &[TraceRow], cfg: &ScenarioConfig) -> Result<()> {
    if let [a, b, ..] = rows {
        let dt = b.t - a.t;
        ensure!(
            (dt - cfg.ts()).abs() < 1e-6,
            "trace is sampled every {dt} s but the config runs at {} Hz; pass --config with the rate the trace was recorded at",
            cfg.f
        );
    }
    Ok(())
}
