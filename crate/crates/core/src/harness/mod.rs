//! Repeated-experiment runner: bias, standard error across repetitions and
//! wall time per scheme configuration.
//!
//! Each repetition averages `n_paths` paths split into batches; batch `b` of
//! repetition `r` for configuration `c` always draws from substream
//! `(c, r * n_batches + b)`, so results do not depend on the thread count.

mod table;

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{price_european_exact, varswap_strike_discrete};
use crate::cases::Case;
use crate::error::{positive, HestonError, Result};
use crate::model::ModelParams;
use crate::pricing::{check_varswap_config, PathSimulator};
use crate::rng::RngStream;
use crate::schemes::{MartingaleMode, SchemeConfig};

pub use table::{emit_rep_estimates, emit_table, parse_csv, TableFormat, CSV_COLUMNS};

/// Paths per random substream.
pub const DEFAULT_BATCH_SIZE: u64 = 10_000;

/// Environment variable holding the default worker-thread count.
pub const THREADS_ENV: &str = "HESTON_MC_THREADS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Product {
    /// European calls sharing the simulated paths.
    EuropeanCall { strikes: Vec<f64> },
    /// Variance swap monitored `periods` times over the maturity.
    VarianceSwap { periods: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProductKind {
    EuropeanCall,
    VarianceSwap,
}

impl Product {
    pub fn kind(&self) -> ProductKind {
        match self {
            Product::EuropeanCall { .. } => ProductKind::EuropeanCall,
            Product::VarianceSwap { .. } => ProductKind::VarianceSwap,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchmarkSource {
    Fourier,
    VarswapClosedForm,
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    /// Label written in the `case` column.
    pub label: String,
    pub model: ModelParams,
    pub maturity: f64,
    pub product: Product,
    pub configs: Vec<SchemeConfig>,
    pub n_paths: u64,
    pub n_reps: u32,
    pub seed: u64,
    pub benchmark: BenchmarkSource,
    /// Also report the spot reconstructed from the conditional forwards.
    pub spot: bool,
    pub batch_size: u64,
    /// Worker threads; `None` uses the environment default.
    pub threads: Option<usize>,
}

impl ExperimentSpec {
    /// Preset case with its own maturity and strike, Fourier benchmark and spot rows.
    pub fn european(case: Case, configs: Vec<SchemeConfig>, n_paths: u64, n_reps: u32, seed: u64) -> Self {
        Self {
            label: case.name().to_string(),
            model: case.model(),
            maturity: case.maturity(),
            product: Product::EuropeanCall {
                strikes: vec![case.strike()],
            },
            configs,
            n_paths,
            n_reps,
            seed,
            benchmark: BenchmarkSource::Fourier,
            spot: true,
            batch_size: DEFAULT_BATCH_SIZE,
            threads: None,
        }
    }

    /// Preset case priced as a variance swap with one step per monitoring period.
    pub fn variance_swap(
        case: Case,
        configs: Vec<SchemeConfig>,
        periods: u32,
        n_paths: u64,
        n_reps: u32,
        seed: u64,
    ) -> Self {
        Self {
            label: case.name().to_string(),
            model: case.model(),
            maturity: case.maturity(),
            product: Product::VarianceSwap { periods },
            configs,
            n_paths,
            n_reps,
            seed,
            benchmark: BenchmarkSource::VarswapClosedForm,
            spot: false,
            batch_size: DEFAULT_BATCH_SIZE,
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        positive("maturity", self.maturity)?;
        if self.n_paths == 0 || self.n_reps == 0 || self.batch_size == 0 {
            return Err(HestonError::Config(
                "paths, repetitions and batch size must be at least 1".into(),
            ));
        }
        if self.configs.is_empty() {
            return Err(HestonError::Config("no scheme configurations given".into()));
        }
        let batches = self.n_paths.div_ceil(self.batch_size) * self.n_reps as u64;
        if batches > u32::MAX as u64 {
            return Err(HestonError::Config("too many batches for the substream index".into()));
        }
        match (&self.product, self.benchmark) {
            (Product::EuropeanCall { .. }, BenchmarkSource::VarswapClosedForm)
            | (Product::VarianceSwap { .. }, BenchmarkSource::Fourier) => {
                return Err(HestonError::Config(
                    "benchmark source does not match the product".into(),
                ))
            }
            _ => {}
        }
        match &self.product {
            Product::EuropeanCall { strikes } => {
                if strikes.is_empty() {
                    return Err(HestonError::Config("no strikes given".into()));
                }
                for &k in strikes {
                    positive("strike", k)?;
                }
                for cfg in &self.configs {
                    cfg.validate()?;
                    if cfg.martingale_mode == MartingaleMode::ReturnVariance {
                        return Err(HestonError::Config(
                            "return-variance correction applies to variance swaps only".into(),
                        ));
                    }
                }
            }
            Product::VarianceSwap { periods } => {
                if self.spot {
                    return Err(HestonError::Config(
                        "spot reconstruction is reported for option experiments only".into(),
                    ));
                }
                for cfg in &self.configs {
                    cfg.validate()?;
                    check_varswap_config(cfg, *periods)?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub case: String,
    pub scheme: String,
    #[serde(rename = "N")]
    pub n_steps: u32,
    #[serde(rename = "K")]
    pub k: Option<u32>,
    pub paths: u64,
    pub reps: u32,
    pub estimate: f64,
    pub benchmark: Option<f64>,
    pub bias: Option<f64>,
    pub se: f64,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub product: ProductKind,
    pub rows: Vec<ResultRow>,
    /// Per-repetition estimates, parallel to `rows`.
    pub rep_estimates: Vec<Vec<f64>>,
}

impl ExperimentResult {
    pub fn extend(&mut self, other: ExperimentResult) -> Result<()> {
        if other.product != self.product {
            return Err(HestonError::Config("cannot merge option and swap results".into()));
        }
        self.rows.extend(other.rows);
        self.rep_estimates.extend(other.rep_estimates);
        Ok(())
    }
}

/// `(mean, sqrt(E x^2 - (E x)^2))` over repetitions.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Default worker count from the environment, if set.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

fn with_pool<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    match threads.or_else(threads_from_env) {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| HestonError::Config(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

/// Sums over one batch: one slot per strike (or one for the swap), plus spot.
struct BatchSums {
    values: Vec<f64>,
    spot: f64,
}

fn run_batch(
    sim: &PathSimulator,
    product: &Product,
    n: u64,
    mut rng: RngStream,
) -> Result<BatchSums> {
    let t = sim.maturity();
    match product {
        Product::EuropeanCall { strikes } => {
            let mut values = vec![0.0; strikes.len()];
            let mut spot = 0.0;
            for _ in 0..n {
                let p = sim.simulate(&mut rng, false)?;
                for (acc, &k) in values.iter_mut().zip(strikes) {
                    *acc += sim.call_payoff(&p, k);
                }
                spot += sim.spot_payoff(&p);
            }
            Ok(BatchSums { values, spot })
        }
        Product::VarianceSwap { .. } => {
            let mut sum = 0.0;
            for _ in 0..n {
                sum += sim.simulate(&mut rng, true)?.realized / t;
            }
            Ok(BatchSums {
                values: vec![sum],
                spot: 0.0,
            })
        }
    }
}

fn benchmarks(spec: &ExperimentSpec) -> Result<Vec<Option<f64>>> {
    match (&spec.product, spec.benchmark) {
        (_, BenchmarkSource::None) => Ok(match &spec.product {
            Product::EuropeanCall { strikes } => vec![None; strikes.len()],
            Product::VarianceSwap { .. } => vec![None],
        }),
        (Product::EuropeanCall { strikes }, _) => strikes
            .iter()
            .map(|&k| price_european_exact(&spec.model, spec.maturity, k).map(Some))
            .collect(),
        (Product::VarianceSwap { periods }, _) => Ok(vec![Some(varswap_strike_discrete(
            &spec.model,
            spec.maturity,
            spec.maturity / *periods as f64,
        )?)]),
    }
}

/// Per-repetition estimates for one configuration: `[slot][rep]`, spot last.
fn run_config(spec: &ExperimentSpec, index: u32, cfg: &SchemeConfig) -> Result<(Vec<Vec<f64>>, f64)> {
    let sim = PathSimulator::new(&spec.model, spec.maturity, cfg)?;
    let n_batches = spec.n_paths.div_ceil(spec.batch_size);
    let batch_len = |b: u64| spec.batch_size.min(spec.n_paths - b * spec.batch_size);

    // Warm-up on a stream no repetition uses.
    run_batch(
        &sim,
        &spec.product,
        batch_len(0),
        RngStream::new(spec.seed, index, u32::MAX),
    )?;

    let start = Instant::now();
    let tasks: Vec<(u32, u64)> = (0..spec.n_reps)
        .flat_map(|r| (0..n_batches).map(move |b| (r, b)))
        .collect();
    let sums: Vec<BatchSums> = tasks
        .par_iter()
        .map(|&(r, b)| {
            let stream = (r as u64 * n_batches + b) as u32;
            run_batch(
                &sim,
                &spec.product,
                batch_len(b),
                RngStream::new(spec.seed, index, stream),
            )
        })
        .collect::<Result<_>>()?;
    let wall = start.elapsed().as_secs_f64();

    let slots = sums[0].values.len();
    let mut per_slot = vec![Vec::with_capacity(spec.n_reps as usize); slots + 1];
    let n = spec.n_paths as f64;
    for rep in sums.chunks(n_batches as usize) {
        for (s, out) in per_slot.iter_mut().take(slots).enumerate() {
            out.push(rep.iter().fold(0.0, |acc, b| acc + b.values[s]) / n);
        }
        per_slot[slots].push(rep.iter().fold(0.0, |acc, b| acc + b.spot) / n);
    }
    Ok((per_slot, wall))
}

/// Run every configuration of `spec`; benchmark time is not part of the reported wall time.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    spec.validate()?;
    let bench = benchmarks(spec)?;
    let strikes: Vec<Option<f64>> = match &spec.product {
        Product::EuropeanCall { strikes } => strikes.iter().map(|&k| Some(k)).collect(),
        Product::VarianceSwap { .. } => vec![None],
    };
    let mut rows = Vec::new();
    let mut reps = Vec::new();
    with_pool(spec.threads, || -> Result<()> {
        for (i, cfg) in spec.configs.iter().enumerate() {
            let (per_slot, wall) = run_config(spec, i as u32, cfg)?;
            let k = cfg.kind.truncated().then(|| cfg.truncation());
            let mut push = |case: String, scheme: String, estimates: &Vec<f64>, benchmark: Option<f64>| {
                let (estimate, se) = mean_and_se(estimates);
                rows.push(ResultRow {
                    case,
                    scheme,
                    n_steps: cfg.n_steps,
                    k,
                    paths: spec.n_paths,
                    reps: spec.n_reps,
                    estimate,
                    benchmark,
                    bias: benchmark.map(|b| estimate - b),
                    se,
                    wall_seconds: wall,
                });
                reps.push(estimates.clone());
            };
            for (s, strike) in strikes.iter().enumerate() {
                let case = match strike {
                    Some(x) if strikes.len() > 1 => match spec.label.strip_suffix(')') {
                        Some(head) => format!("{head},X={x})"),
                        None => format!("{}(X={x})", spec.label),
                    },
                    _ => spec.label.clone(),
                };
                push(case, cfg.kind.label().to_string(), &per_slot[s], bench[s]);
            }
            if spec.spot {
                push(
                    spec.label.clone(),
                    format!("{}:spot", cfg.kind.label()),
                    &per_slot[strikes.len()],
                    Some(spec.model.s0),
                );
            }
        }
        Ok(())
    })??;
    Ok(ExperimentResult {
        product: spec.product.kind(),
        rows,
        rep_estimates: reps,
    })
}
