use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use ucbid_core::bounds::{bound_table, write_bound_csv, BoundGammas, ProblemParams};
use ucbid_core::{
    run_experiment, Parallelism, RegretEstimator, RegretTrajectory, StrategySpec, ValueDistribution,
};

use crate::config::ConfigFile;
use crate::error::{CliError, Result};
use crate::preset::Preset;
use crate::summary::{final_regrets, Summary, SCHEMA_VERSION};

/// Repeated second-price auctions with censored feedback: simulations and bounds.
#[derive(Debug, Parser)]
#[command(name = "ucbid", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the experiment described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run a built-in scenario, or print its config.
    Preset {
        #[arg(value_enum)]
        name: Preset,
        /// Print the preset as a config file and exit.
        #[arg(long)]
        print_config: bool,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run a config with a [sweep] section over value means.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Print the bound table for a config or preset environment.
    Bounds {
        #[arg(long, conflicts_with = "preset")]
        config: Option<PathBuf>,
        #[arg(long, value_enum)]
        preset: Option<Preset>,
        /// Bernoulli value means to tabulate instead of the configured law.
        #[arg(long = "v")]
        values: Vec<f64>,
        /// Horizons to tabulate; defaults to the configured horizon.
        #[arg(long = "horizon")]
        horizons: Vec<u64>,
        /// Margin exponent.
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// CSV output path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON summary path; defaults to the CSV path with a `.json` extension.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, value_parser = ["realized", "conditional"])]
    pub estimator: Option<String>,
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

impl RunArgs {
    fn apply(&self, cfg: &ConfigFile) -> Result<ConfigFile> {
        let mut cfg = cfg.with_overrides(&self.overrides)?;
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(e) = &self.estimator {
            cfg.estimator = e.parse::<RegretEstimator>()?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn parallelism(&self) -> Result<(Parallelism, usize)> {
        match self.threads {
            Some(0) => Err(CliError::Usage("--threads must be at least 1".into())),
            Some(1) => Ok((Parallelism::Serial, 1)),
            Some(n) => Ok((Parallelism::Threads(n), n)),
            None => Ok((Parallelism::Auto, rayon_threads())),
        }
    }

    fn out(&self) -> Result<&Path> {
        self.out.as_deref().ok_or_else(|| CliError::Usage("--out is required".into()))
    }
}

fn rayon_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn read_config(path: &Path) -> Result<ConfigFile> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    ConfigFile::parse(&text, &[])
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(CliError::io(path))
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, run } => {
            let cfg = run.apply(&read_config(&config)?)?;
            if cfg.sweep.is_some() {
                return Err(CliError::Usage("config describes a sweep; use the `sweep` command".into()));
            }
            simulate("run", &cfg, &run)
        }
        Command::Sweep { config, run } => {
            let cfg = run.apply(&read_config(&config)?)?;
            if cfg.sweep.is_none() {
                return Err(CliError::Usage("config has no [sweep] section".into()));
            }
            simulate("sweep", &cfg, &run)
        }
        Command::Preset { name, print_config, run } => {
            let cfg = run.apply(&name.config())?;
            if print_config {
                print!("{}", cfg.to_toml());
                return Ok(());
            }
            simulate(name.name(), &cfg, &run)
        }
        Command::Bounds { config, preset, values, horizons, alpha, out, overrides } => {
            let cfg = match (config, preset) {
                (Some(path), _) => read_config(&path)?.with_overrides(&overrides)?,
                (None, Some(p)) => p.config().with_overrides(&overrides)?,
                (None, None) => return Err(CliError::Usage("bounds needs --config or --preset".into())),
            };
            let rows = bounds(&cfg, &values, &horizons, alpha)?;
            match out {
                Some(path) => {
                    let mut w = create(&path)?;
                    write_bound_csv(&rows, &mut w).and_then(|_| w.flush()).map_err(CliError::io(&path))
                }
                None => write_bound_csv(&rows, io::stdout().lock()).map_err(CliError::io("<stdout>")),
            }
        }
    }
}

fn simulate(command: &str, cfg: &ConfigFile, run: &RunArgs) -> Result<()> {
    let out = run.out()?;
    let (parallelism, threads) = run.parallelism()?;
    let start = Instant::now();
    let mut csv = Vec::new();
    let mut results = Vec::new();
    if cfg.sweep.is_some() {
        writeln!(csv, "v,{}", RegretTrajectory::CSV_HEADER).unwrap();
        for (v, exp) in cfg.sweep_experiments()? {
            let traj = run_experiment(&exp, parallelism)?;
            traj.write_csv_rows(&mut csv, &format!("{},", ucbid_core::simulator::format_sig(v))).unwrap();
            results.extend(final_regrets(Some(v), &traj));
        }
    } else {
        let traj = run_experiment(&cfg.to_experiment()?, parallelism)?;
        traj.write_csv(&mut csv).unwrap();
        results.extend(final_regrets(None, &traj));
    }
    let summary = Summary {
        schema_version: SCHEMA_VERSION,
        command,
        config: cfg,
        threads,
        wall_time_seconds: start.elapsed().as_secs_f64(),
        results,
    };
    fs::write(out, &csv).map_err(CliError::io(out))?;
    let summary_path = run.summary.clone().unwrap_or_else(|| out.with_extension("json"));
    let json = serde_json::to_string_pretty(&summary).expect("summaries serialize");
    fs::write(&summary_path, json + "\n").map_err(CliError::io(&summary_path))
}

fn gamma_of(cfg: &ConfigFile, id: &str, default: f64) -> f64 {
    cfg.strategies
        .iter()
        .find_map(|s| match *s {
            StrategySpec::Ucbid { gamma } if id == "ucbid" => Some(gamma),
            StrategySpec::Klucbid { gamma, .. } if id == "klucbid" => Some(gamma),
            StrategySpec::BernsteinUcbid { gamma } if id == "bernstein_ucbid" => Some(gamma),
            _ => None,
        })
        .unwrap_or(default)
}

/// Bound rows for every requested value mean and horizon.
pub fn bounds(
    cfg: &ConfigFile,
    values: &[f64],
    horizons: &[u64],
    alpha: f64,
) -> Result<Vec<ucbid_core::bounds::BoundRow>> {
    let defaults = BoundGammas::default();
    let gammas = BoundGammas {
        ucbid: gamma_of(cfg, "ucbid", defaults.ucbid),
        klucbid: gamma_of(cfg, "klucbid", defaults.klucbid),
        bernstein: gamma_of(cfg, "bernstein_ucbid", defaults.bernstein),
    };
    let laws: Vec<ValueDistribution> = if !values.is_empty() {
        values.iter().map(|&v| ValueDistribution::bernoulli(v)).collect::<ucbid_core::Result<_>>()?
    } else if let Some(value) = &cfg.value {
        vec![value.clone()]
    } else {
        let sweep = cfg.sweep.as_ref().map(|s| s.values.as_slice()).unwrap_or_default();
        sweep.iter().map(|&v| ValueDistribution::bernoulli(v)).collect::<ucbid_core::Result<_>>()?
    };
    let horizons = if horizons.is_empty() { vec![cfg.horizon] } else { horizons.to_vec() };
    let mut rows = Vec::new();
    for law in &laws {
        for &h in &horizons {
            let mut p = ProblemParams::from_environment(law, &cfg.opponent, gammas.ucbid, h)?;
            p.alpha = alpha;
            rows.extend(bound_table(&p, &gammas));
        }
    }
    Ok(rows)
}
