//! Command-line sweep driver: configure a network, sweep the cell radius
//! or the user separation, and emit CSV from the analytic and/or Monte
//! Carlo engines.

use clap::Parser;
use std::path::PathBuf;
use ucjt::experiment::{run_experiment, write_csv};
use ucjt::{Error, ExperimentConfig, Mode, Scheme, SweepVar};

/// Joint-transmission throughput sweeps over virtual-cell networks.
///
/// Configuration is layered: built-in baseline defaults, then `--preset`
/// or `--config`, then individual flags. The emitted CSV embeds the fully
/// resolved configuration, so any output file documents and reproduces its
/// own run.
#[derive(Parser, Debug)]
#[command(name = "ucjt", version)]
struct Cli {
    /// Start from a named experiment preset: fig2 (throughput vs cell
    /// radius, both engines), fig3 (scheme comparison, Monte Carlo), or
    /// fig4 (spatial throughput vs separation).
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,

    /// Load an experiment configuration from a TOML file.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Engine selection.
    #[arg(long, value_enum)]
    mode: Option<Mode>,

    /// Transmission schemes, comma separated (e.g. mrt,ncjt).
    #[arg(long = "scheme", value_enum, value_delimiter = ',')]
    schemes: Vec<Scheme>,

    /// Swept parameter: c (cell radius) or d (user separation, C = D/2).
    #[arg(long, value_enum)]
    sweep: Option<SweepVar>,

    /// Sweep grid in km, comma separated and strictly increasing.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,

    /// Monte Carlo master seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Geometry realizations per grid point.
    #[arg(long)]
    drops: Option<u32>,

    /// Fading rounds per geometry realization.
    #[arg(long)]
    fadings: Option<u32>,

    /// Relative quadrature tolerance.
    #[arg(long)]
    rtol: Option<f64>,

    /// Absolute quadrature tolerance.
    #[arg(long)]
    atol: Option<f64>,

    /// Near/far interference split distance in km (default max(5D, 10C)).
    #[arg(long = "split-d", value_name = "KM")]
    split_d: Option<f64>,

    /// Output CSV path; stdout when omitted.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let mut cfg = match (&cli.preset, &cli.config) {
        (Some(name), _) => ExperimentConfig::preset(name)?,
        (None, Some(path)) => ExperimentConfig::from_toml(&std::fs::read_to_string(path)?)?,
        (None, None) => ExperimentConfig::default(),
    };
    if let Some(mode) = cli.mode {
        cfg.mode = mode;
    }
    if !cli.schemes.is_empty() {
        cfg.schemes = cli.schemes.clone();
    }
    if let Some(sweep) = cli.sweep {
        cfg.sweep = sweep;
    }
    if let Some(grid) = &cli.grid {
        cfg.grid_km = grid.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(drops) = cli.drops {
        cfg.drops = drops;
    }
    if let Some(fadings) = cli.fadings {
        cfg.fadings = fadings;
    }
    if let Some(rtol) = cli.rtol {
        cfg.rtol = rtol;
    }
    if let Some(atol) = cli.atol {
        cfg.atol = atol;
    }
    if let Some(split) = cli.split_d {
        cfg.split_d_km = Some(split);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), Error> {
    let cfg = build_config(cli)?;
    let csv = write_csv(&run_experiment(&cfg)?);
    match &cli.out {
        Some(path) => std::fs::write(path, csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
