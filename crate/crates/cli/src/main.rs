use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use udn_handover::experiments::{
    emit_plot_script, run_sweep, validate, Engines, ExperimentError, McBudget, SweepSpec, SweepVariable, ValidationOptions,
};
use udn_handover::model::DEFAULT_CONFIG_TOML;
use udn_handover::sim::{estimate_with, write_events_csv, EstimateOptions};
use udn_handover::{ConfigError, ScenarioConfig};

/// Handover rates and association in height-aware two-tier dense networks.
#[derive(Debug, Parser)]
#[command(name = "udn-ho", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Scenario file (TOML); the built-in two-tier defaults otherwise.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master RNG seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Monte Carlo realizations per point.
    #[arg(long, global = true)]
    realizations: Option<usize>,
    /// Trajectory length per realization, km.
    #[arg(long = "traj-km", global = true)]
    traj_km: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sweep one parameter and write a CSV.
    Sweep(SweepArgs),
    /// Cross-validate the analytical engine against the simulator.
    Validate(ValidateArgs),
    /// Write a matplotlib script for a sweep CSV.
    PlotScript(PlotArgs),
    /// Print the default scenario file.
    DumpConfig,
    /// Run the simulator on the scenario and optionally dump raw events.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Variable {
    UserHeight,
    TierIntensity,
    BiasDb,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Preset {
    /// User height 0–60 m, 25 points.
    Height,
    /// Small-tier intensity 10–100 /km², bias families 0 and 6 dB.
    Density,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Ready-made sweep; explicit flags override its fields.
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    #[arg(long, value_enum)]
    variable: Option<Variable>,
    /// Tier index for intensity and bias sweeps.
    #[arg(long, default_value_t = 1)]
    tier: usize,
    #[arg(long)]
    min: Option<f64>,
    #[arg(long)]
    max: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    /// Small-to-macro bias families in dB, comma separated.
    #[arg(long, value_delimiter = ',')]
    bias_families: Option<Vec<f64>>,
    /// Run the simulator at every point.
    #[arg(long, overrides_with = "no_mc")]
    mc: bool,
    /// Analytical engine only.
    #[arg(long = "no-mc", overrides_with = "mc")]
    no_mc: bool,
    /// Output file name inside --out.
    #[arg(long, default_value = "sweep.csv")]
    name: String,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    /// Relative tolerance floor.
    #[arg(long, default_value_t = 0.05)]
    tol: f64,
    /// Scale β between the tiers in the analytical engine only (sensitivity check).
    #[arg(long)]
    mutate_beta: Option<f64>,
}

#[derive(Debug, Args)]
struct PlotArgs {
    /// Sweep CSV to plot.
    csv: PathBuf,
    /// Script path; defaults to the CSV path with a .py extension.
    #[arg(long)]
    script: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Write every crossing to events.csv in --out.
    #[arg(long)]
    events: bool,
}

/// Errors that map to exit status 2.
fn is_config_error(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<ConfigError>().is_some()
            || matches!(
                c.downcast_ref::<ExperimentError>(),
                Some(ExperimentError::Config(_) | ExperimentError::InvalidSpec(_))
            )
    })
}

fn load_config(common: &Common) -> Result<ScenarioConfig> {
    let mut cfg = match &common.config {
        Some(path) => ScenarioConfig::from_file(path)?,
        None => ScenarioConfig::baseline(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(n) = common.realizations {
        cfg.sim.realizations = n;
    }
    if let Some(km) = common.traj_km {
        cfg.sim.trajectory_length = km * 1e3;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_output(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn sweep(common: &Common, args: &SweepArgs) -> Result<ExitCode> {
    let cfg = load_config(common)?;
    let (mut variable, mut min, mut max, mut points, mut families) = match args.preset {
        Some(Preset::Height) => (Some(Variable::UserHeight), Some(0.0), Some(60.0), Some(25), vec![]),
        Some(Preset::Density) => (Some(Variable::TierIntensity), Some(10.0), Some(100.0), Some(10), vec![0.0, 6.0]),
        None => (None, None, None, None, vec![]),
    };
    variable = args.variable.or(variable);
    min = args.min.or(min);
    max = args.max.or(max);
    points = args.points.or(points);
    if let Some(f) = &args.bias_families {
        families = f.clone();
    }
    let missing = |what: &str| ExperimentError::InvalidSpec(format!("--{what} is required without --preset"));
    let variable = match variable.ok_or_else(|| missing("variable"))? {
        Variable::UserHeight => SweepVariable::UserHeight,
        Variable::TierIntensity => SweepVariable::TierIntensity { tier: args.tier },
        Variable::BiasDb => SweepVariable::BiasDb { tier: args.tier },
    };
    let spec = SweepSpec {
        variable,
        min: min.ok_or_else(|| missing("min"))?,
        max: max.ok_or_else(|| missing("max"))?,
        points: points.ok_or_else(|| missing("points"))?,
        engines: Engines { analytical: true, simulator: args.mc || !args.no_mc },
        mc: McBudget { realizations: cfg.sim.realizations, trajectory_length: cfg.sim.trajectory_length },
        scenario: cfg,
        bias_families_db: families,
    };
    let out = run_sweep(&spec)?;
    let path = write_output(&common.out, &args.name, &out.to_csv_string()?)?;
    let failed = out
        .points
        .iter()
        .filter(|p| matches!(p.analytic, Some(Err(_))) || matches!(p.mc, Some(Err(_))))
        .count();
    println!("wrote {} ({} points, {} with engine errors)", path.display(), out.points.len(), failed);
    Ok(ExitCode::SUCCESS)
}

fn validate_cmd(common: &Common, args: &ValidateArgs) -> Result<ExitCode> {
    let cfg = load_config(common)?;
    let mut options = ValidationOptions::from_config(&cfg);
    options.tol = args.tol;
    options.beta_mutation = args.mutate_beta;
    let report = validate(&cfg, &options)?;
    println!("{report}");
    let path = write_output(&common.out, "validation.csv", &report.to_csv_string()?)?;
    println!("wrote {}", path.display());
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn plot_script(args: &PlotArgs) -> Result<ExitCode> {
    let script = args.script.clone().unwrap_or_else(|| args.csv.with_extension("py"));
    emit_plot_script(&args.csv, &script)?;
    println!("wrote {}", script.display());
    Ok(ExitCode::SUCCESS)
}

fn simulate(common: &Common, args: &SimulateArgs) -> Result<ExitCode> {
    let cfg = load_config(common)?;
    let report = estimate_with(&cfg, cfg.sim.realizations, EstimateOptions { keep_events: args.events })?;
    println!(
        "{} realizations, {:.1} km exposure, {} events",
        report.realizations,
        report.exposure / 1e3,
        report.total_events()
    );
    for (t, a) in cfg.tiers.iter().zip(&report.association) {
        println!("association {:<8} {:.5} ± {:.5}", t.id, a.value, a.ci_halfwidth);
    }
    if report.exposure > 0.0 {
        for (k, tk) in cfg.tiers.iter().enumerate() {
            for (j, tj) in cfg.tiers.iter().enumerate() {
                let e = report.hol(k, j)?.scaled(1e3);
                println!("HOL {:>8} -> {:<8} {:.4} ± {:.4} /km", tk.id, tj.id, e.value, e.ci_halfwidth);
            }
        }
        let total = report.hol_total()?.scaled(1e3);
        println!("HOL total              {:.4} ± {:.4} /km", total.value, total.ci_halfwidth);
    }
    if args.events {
        fs::create_dir_all(&common.out)?;
        let path = common.out.join("events.csv");
        write_events_csv(&report.events, fs::File::create(&path)?)?;
        println!("wrote {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Sweep(a) => sweep(&cli.common, a),
        Command::Validate(a) => validate_cmd(&cli.common, a),
        Command::PlotScript(a) => plot_script(a),
        Command::DumpConfig => {
            print!("{DEFAULT_CONFIG_TOML}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate(a) => simulate(&cli.common, a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if is_config_error(&e) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
