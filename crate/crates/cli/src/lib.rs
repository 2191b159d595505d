//! Command-line front end for the `heston-mc` engine.

pub mod bench;
pub mod config;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use heston_mc::analytic::price_european_exact;
use heston_mc::harness::{emit_rep_estimates, emit_table, run_experiment, ExperimentResult, TableFormat};
use heston_mc::Case;

use bench::{render_markdown, run_bench, BenchRun, BenchTable};
use config::{ConfigFile, ProductType};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl From<heston_mc::HestonError> for CliError {
    fn from(e: heston_mc::HestonError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "heston-mc", version, about = "Monte Carlo simulation of the Heston model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact European call price by Fourier inversion.
    Exact(ExactArgs),
    /// Monte Carlo European call prices with bias and standard error.
    Price(PriceArgs),
    /// Monte Carlo fair strike of a discretely monitored variance swap.
    Varswap(VarswapArgs),
    /// Reproduce a preset comparison table.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    /// Preset parameter set (I, II, III or IV).
    #[arg(long, required_unless_present = "params")]
    pub case: Option<Case>,
    /// TOML file with [model] and [product] sections.
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Strike (overrides the preset or file).
    #[arg(long)]
    pub strike: Option<f64>,
    /// Maturity in years (overrides the preset or file).
    #[arg(long)]
    pub maturity: Option<f64>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Preset parameter set (I, II, III or IV).
    #[arg(long)]
    pub case: Option<Case>,
    /// TOML run configuration; flags given on the command line take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Simulation scheme: ge, pois-ge, ig, qem or pois-td.
    #[arg(long)]
    pub scheme: Option<String>,
    /// Maturity in years.
    #[arg(long)]
    pub maturity: Option<f64>,
    /// Paths per repetition.
    #[arg(long)]
    pub paths: Option<u64>,
    /// Number of repetitions.
    #[arg(long)]
    pub reps: Option<u32>,
    /// Root random seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: HESTON_MC_THREADS or all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Martingale correction: none, price or return-variance.
    #[arg(long)]
    pub martingale: Option<String>,
    /// Write the table here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write every repetition estimate to this CSV file.
    #[arg(long)]
    pub reps_out: Option<PathBuf>,
    /// Output format: csv or md.
    #[arg(long, default_value = "md", value_parser = parse_format)]
    pub format: TableFormat,
}

#[derive(Debug, Args)]
pub struct PriceArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Number of explicit gamma terms (ge and pois-ge).
    #[arg(long = "K")]
    pub k: Option<u32>,
    /// Time steps.
    #[arg(long)]
    pub steps: Option<u32>,
    /// Strike; repeat for several strikes.
    #[arg(long)]
    pub strike: Vec<f64>,
    /// Also report the spot reconstructed from the simulated forwards.
    #[arg(long)]
    pub spot: bool,
}

#[derive(Debug, Args)]
pub struct VarswapArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Monitoring periods (one time step each).
    #[arg(long)]
    pub periods: Option<u32>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// opt1, opt2, opt3, opt4, var3, var4 or grid4.
    #[arg(long)]
    pub table: BenchTable,
    #[arg(long, default_value_t = config::DEFAULT_PATHS)]
    pub paths: u64,
    #[arg(long, default_value_t = config::DEFAULT_REPS)]
    pub reps: u32,
    #[arg(long, default_value_t = config::DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub reps_out: Option<PathBuf>,
    /// Output format: csv or md (md uses the side-by-side layout).
    #[arg(long, default_value = "md", value_parser = parse_format)]
    pub format: TableFormat,
}

fn parse_format(s: &str) -> Result<TableFormat, String> {
    s.parse().map_err(|e: heston_mc::HestonError| e.to_string())
}

impl RunArgs {
    fn overlay(&self) -> ConfigFile {
        let mut c = ConfigFile::default();
        c.model.case = self.case.map(|k| k.name().to_string());
        c.product.maturity = self.maturity;
        c.run.scheme = self.scheme.clone();
        c.run.paths = self.paths;
        c.run.reps = self.reps;
        c.run.seed = self.seed;
        c.run.threads = self.threads;
        c.run.martingale = self.martingale.clone();
        c
    }

    fn base(&self) -> Result<ConfigFile, CliError> {
        match &self.config {
            Some(p) => ConfigFile::load(p),
            None => Ok(ConfigFile::default()),
        }
    }
}

impl PriceArgs {
    /// Effective configuration: the file (if any) overlaid with the flags.
    pub fn config(&self) -> Result<ConfigFile, CliError> {
        let mut flags = self.run.overlay();
        flags.run.k = self.k;
        flags.run.steps = self.steps;
        if !self.strike.is_empty() {
            flags.product.strikes = Some(self.strike.clone());
        }
        if self.spot {
            flags.run.spot = Some(true);
        }
        Ok(self.run.base()?.merged(flags))
    }
}

impl VarswapArgs {
    pub fn config(&self) -> Result<ConfigFile, CliError> {
        let mut flags = self.run.overlay();
        flags.product.periods = self.periods;
        Ok(self.run.base()?.merged(flags))
    }
}

fn write_output(
    text: &str,
    out: Option<&PathBuf>,
    result: &ExperimentResult,
    reps_out: Option<&PathBuf>,
) -> Result<(), CliError> {
    match out {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| CliError::Runtime(format!("{}: {e}", p.display())))?;
            eprintln!("wrote {}", p.display());
        }
        None => print!("{text}"),
    }
    if let Some(p) = reps_out {
        let reps = emit_rep_estimates(result)?;
        std::fs::write(p, reps).map_err(|e| CliError::Runtime(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn run_specs(cfg: &ConfigFile, kind: ProductType, args: &RunArgs) -> Result<(), CliError> {
    let mut result: Option<ExperimentResult> = None;
    for spec in cfg.experiments(kind)? {
        let r = run_experiment(&spec)?;
        match &mut result {
            None => result = Some(r),
            Some(acc) => acc.extend(r)?,
        }
    }
    let result = result.ok_or_else(|| CliError::Runtime("no experiments to run".into()))?;
    let text = emit_table(&result, args.format)?;
    write_output(&text, args.out.as_ref(), &result, args.reps_out.as_ref())
}

fn exact(args: &ExactArgs) -> Result<(), CliError> {
    let mut cfg = match &args.params {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    if let Some(c) = args.case {
        cfg.model.case = Some(c.name().to_string());
    }
    if let Some(k) = args.strike {
        cfg.product.strike = Some(k);
        cfg.product.strikes = None;
    }
    if args.maturity.is_some() {
        cfg.product.maturity = args.maturity;
    }
    let (_, model) = cfg.model()?;
    let t = cfg.maturity()?;
    let strikes = cfg.strikes()?;
    for &k in &strikes {
        let price = price_european_exact(&model, t, k)?;
        if strikes.len() == 1 {
            println!("{price:.8}");
        } else {
            println!("{k}\t{price:.8}");
        }
    }
    Ok(())
}

/// Execute a parsed command line.
pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Exact(a) => exact(&a),
        Command::Price(a) => run_specs(&a.config()?, ProductType::Call, &a.run),
        Command::Varswap(a) => run_specs(&a.config()?, ProductType::VarianceSwap, &a.run),
        Command::Bench(a) => {
            let result = run_bench(
                a.table,
                BenchRun {
                    paths: a.paths,
                    reps: a.reps,
                    seed: a.seed,
                    threads: a.threads,
                },
            )?;
            let text = match a.format {
                TableFormat::Markdown => render_markdown(a.table, &result),
                TableFormat::Csv => emit_table(&result, TableFormat::Csv)?,
            };
            write_output(&text, a.out.as_ref(), &result, a.reps_out.as_ref())
        }
    }
}
