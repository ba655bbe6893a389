use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nfbm::beamspace::channel_dof;
use nfbm::experiments::{
    analyze_point, default_output, run_distance_sweep, run_dof_sweep, run_snr_sweep, write_csv,
    ExperimentConfig, SweepRow,
};

/// Beamspace modulation vs. best-beamspace selection on near-field XL-MIMO links.
#[derive(Debug, Parser)]
#[command(name = "nfbm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    /// Config file of `key = value` lines (defaults are used when omitted).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Override a config key; may be repeated. Applied after the config file.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    /// Output CSV path.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Monte-Carlo sample count (for `capacity`, also enables the estimate).
    #[arg(long, global = true, value_name = "N")]
    samples: Option<usize>,

    /// Monte-Carlo seed.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Print the resolved config to stderr.
    #[arg(long, global = true)]
    verbose: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form BM/BBS capacities at the configured distance and SNR.
    Capacity,
    /// Effective DoF of the configured scene.
    Dof,
    /// SE versus SNR at each of `snr_distance_points`.
    SweepSnr,
    /// SE versus distance at `snr_db`.
    SweepDistance,
    /// Effective DoF over `frequency_points` × `distance_points`.
    SweepDof,
}

fn load_config(common: &Common) -> nfbm::Result<ExperimentConfig> {
    let mut config = match &common.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    config.apply_overrides(common.overrides.iter().map(String::as_str))?;
    if let Some(n) = common.samples {
        config.mc_samples = n;
    }
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    config.validate()?;
    Ok(config)
}

fn run_capacity(config: &ExperimentConfig, common: &Common) -> nfbm::Result<()> {
    let analysis = analyze_point(config, common.samples.is_some())?;
    let r = &analysis.report;
    println!("distance_m       {}", analysis.scene.distance);
    println!("snr_db           {}", config.snr_db);
    println!("dof              {}", analysis.decomposition.dof);
    println!("k                {}", analysis.candidates.len());
    if analysis.candidates.truncated {
        println!("                 (candidate pool truncated by candidate_cap)");
    }
    println!("top activation probabilities:");
    for (i, p) in analysis.activation.top(5) {
        println!("  {:?}  {p:.6}", analysis.candidates.subsets[i]);
    }
    println!("c_bm_asymptotic  {:.6}", r.c_bm_asymptotic);
    println!("c_bbs            {:.6}", r.c_bbs);
    println!("gap              {:.6}", r.gap);
    if let Some(mc) = analysis.monte_carlo {
        println!("se_mc_mean       {:.6} ± {:.6} ({} samples)", mc.mean, mc.std_error, mc.n_samples);
    }
    if let Some(path) = &common.output {
        write_csv(&[analysis.row()], path)?;
        println!("wrote 1 row to {}", path.display());
    }
    Ok(())
}

fn run_dof(config: &ExperimentConfig) -> nfbm::Result<()> {
    let scene = config.scene_at(config.distance);
    let h = scene.two_ray_channel()?;
    let dof = channel_dof(&h, config.dof_threshold)?;
    println!("distance_m          {}", scene.distance);
    println!("carrier_frequency   {}", scene.carrier_frequency);
    println!("fraunhofer_distance {:.3}", scene.fraunhofer_distance());
    println!("dof                 {dof}");
    Ok(())
}

fn run_sweep(
    config: &ExperimentConfig,
    common: &Common,
    sweep: fn(&ExperimentConfig) -> nfbm::Result<Vec<SweepRow>>,
    fallback: &str,
) -> nfbm::Result<()> {
    let rows = sweep(config)?;
    let path = common
        .output
        .clone()
        .unwrap_or_else(|| default_output(config, fallback));
    write_csv(&rows, &path)?;
    println!("wrote {} rows to {}", rows.len(), path.display());
    Ok(())
}

fn run(cli: &Cli) -> nfbm::Result<()> {
    let config = load_config(&cli.common)?;
    if cli.common.verbose {
        eprint!("{}", config.to_config_string());
    }
    match cli.command {
        Command::Capacity => run_capacity(&config, &cli.common),
        Command::Dof => run_dof(&config),
        Command::SweepSnr => run_sweep(&config, &cli.common, run_snr_sweep, "sweep_snr.csv"),
        Command::SweepDistance => {
            run_sweep(&config, &cli.common, run_distance_sweep, "sweep_distance.csv")
        }
        Command::SweepDof => run_sweep(&config, &cli.common, run_dof_sweep, "sweep_dof.csv"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_usage() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
