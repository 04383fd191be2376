use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use ns_halfline::harness::{
    parse_config, preset, run_checks, run_scenario, sweep, Scenario, ScenarioConfig, PRESET_NAMES,
};
use ns_halfline::profile::write_profile_csv;

#[derive(Parser)]
#[command(
    name = "ns-halfline",
    version,
    about = "Viscous shocks on the half-line: profiles, runs and contraction diagnostics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Source {
    /// Scenario document (TOML).
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in scenario name.
    #[arg(long)]
    preset: Option<String>,
    /// Output directory; overrides the one in the scenario.
    #[arg(long, env = "NS_HALFLINE_OUT")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Build the shock profile of a scenario and write it as `profile.csv`.
    Profile {
        #[command(flatten)]
        source: Source,
    },
    /// Run a scenario and write its artifacts.
    Run {
        #[command(flatten)]
        source: Source,
        /// Jitter the perturbation bumps with this seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a scenario once per value of one key, in parallel.
    Sweep {
        #[command(flatten)]
        source: Source,
        /// Dotted key, for example `grid.beta_scale`.
        #[arg(long)]
        key: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the property suites that need no time stepping.
    Check {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn load(source: &Source) -> Result<ScenarioConfig> {
    match (&source.config, &source.preset) {
        (Some(path), None) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Ok(parse_config(&text)?)
        }
        (None, Some(name)) => Ok(preset(name)?),
        _ => bail!(
            "give --config PATH or --preset NAME (one of {})",
            PRESET_NAMES.join(", ")
        ),
    }
}

fn out_dir(source: &Source, scenario: &Scenario) -> PathBuf {
    source.out.clone().unwrap_or_else(|| scenario.output_dir())
}

fn profile(source: &Source) -> Result<ExitCode> {
    let scenario = Scenario::resolve(load(source)?)?;
    let dir = out_dir(source, &scenario);
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let profile = scenario.build_profile()?;
    let path = dir.join("profile.csv");
    write_profile_csv(&profile, BufWriter::new(File::create(&path)?))?;
    let e = &scenario.end;
    println!(
        "v- = {:.15} u- = {:.15} v+ = {:.15} u+ = {:.15} sigma = {:.15} delta = {:.6}",
        e.v_minus(),
        e.u_minus(),
        e.v_plus(),
        e.u_plus(),
        e.sigma(),
        e.delta()
    );
    println!(
        "residual {:.3e}, {} samples -> {}",
        profile.residual().max(),
        profile.len(),
        path.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn run(source: &Source, seed: Option<u64>) -> Result<ExitCode> {
    let mut scenario = Scenario::resolve(load(source)?)?;
    if let Some(seed) = seed {
        scenario = scenario.with_seed(seed)?;
    }
    let dir = out_dir(source, &scenario);
    eprintln!(
        "[{}] {} nodes, t_end = {} -> {}",
        scenario.name(),
        scenario.grid.n_nodes(),
        scenario.solver.t_end,
        dir.display()
    );
    let report = run_scenario(&scenario, &dir)?.report;
    println!("{}", serde_json::to_string_pretty(&report)?);
    if let Some(o) = &report.oracle {
        println!(
            "traveling-wave oracle: max error {:.3e}, |X| {:.3e}, budget {:.3e}: {}",
            o.max_error,
            o.final_shift.abs(),
            o.budget,
            if o.passed() { "pass" } else { "FAIL" }
        );
    }
    Ok(if report.success() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn run_sweep(source: &Source, key: &str, values: &[f64], seed: Option<u64>) -> Result<ExitCode> {
    let base = load(source)?;
    let root = match &source.out {
        Some(dir) => dir.clone(),
        None => Path::new("runs").join(format!("{}-sweep", base.name)),
    };
    let mut ok = true;
    for entry in sweep(&base, key, values, &root, seed)? {
        match entry.result {
            Ok(r) => {
                ok &= r.success();
                println!(
                    "{key} = {}: {} steps, sup_pert {:.3e} -> {:.3e}, cumulative |P| {:.3e}, {}",
                    entry.value,
                    r.steps,
                    r.sup_perturbation_initial,
                    r.sup_perturbation_final,
                    r.cumulative_abs_boundary,
                    if r.success() { "ok" } else { "FAILED" }
                );
            }
            Err(e) => {
                ok = false;
                println!("{key} = {}: error: {e}", entry.value);
            }
        }
    }
    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn check(seed: u64) -> Result<ExitCode> {
    let report = run_checks(seed)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn main() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Profile { source } => profile(&source),
        Command::Run { source, seed } => run(&source, seed),
        Command::Sweep {
            source,
            key,
            values,
            seed,
        } => run_sweep(&source, &key, &values, seed),
        Command::Check { seed } => check(seed),
    }
}
