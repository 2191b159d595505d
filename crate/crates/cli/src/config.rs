//! TOML run configuration and its merge with command-line flags.
//!
//! ```toml
//! [model]            # either a preset `case` or explicit fields (or both: fields override)
//! case = "IV"
//! s0 = 100.0
//! v0 = 0.04
//! kappa = 4.0
//! theta = 0.25
//! xi = 1.0
//! rho = -0.5
//! r = 0.01           # decimal, not percent
//! q = 0.02
//!
//! [product]
//! type = "call"      # or "variance_swap"
//! maturity = 1.0
//! strikes = [100.0, 110.0, 120.0]   # or `strike = 120.0`
//! periods = 12       # variance swaps
//!
//! [run]
//! scheme = "pois-ge"
//! K = 1
//! steps = 1
//! paths = 160000
//! reps = 20
//! seed = 1
//! threads = 8
//! martingale = "price"   # none | price | return-variance
//! spot = true
//!
//! [grid]             # cross product of the listed xi and kappa values
//! xi = [1.0, 0.25, 0.1]
//! kappa = [4.0, 1.0, 0.1]
//! ```

use std::path::Path;

use heston_mc::harness::{BenchmarkSource, ExperimentSpec, Product, DEFAULT_BATCH_SIZE};
use heston_mc::{Case, HestonError, MartingaleMode, ModelParams, SchemeConfig, SchemeKind};
use serde::Deserialize;

use crate::CliError;

pub const DEFAULT_PATHS: u64 = 160_000;
pub const DEFAULT_REPS: u32 = 20;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub product: ProductSection,
    #[serde(default)]
    pub run: RunSection,
    pub grid: Option<GridSection>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub case: Option<String>,
    pub s0: Option<f64>,
    pub v0: Option<f64>,
    pub kappa: Option<f64>,
    pub theta: Option<f64>,
    pub xi: Option<f64>,
    pub rho: Option<f64>,
    pub r: Option<f64>,
    pub q: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProductType {
    Call,
    VarianceSwap,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductSection {
    #[serde(rename = "type")]
    pub kind: Option<ProductType>,
    pub maturity: Option<f64>,
    pub strike: Option<f64>,
    pub strikes: Option<Vec<f64>>,
    pub periods: Option<u32>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub scheme: Option<String>,
    #[serde(rename = "K")]
    pub k: Option<u32>,
    pub steps: Option<u32>,
    pub paths: Option<u64>,
    pub reps: Option<u32>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub martingale: Option<String>,
    pub spot: Option<bool>,
    pub batch_size: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub xi: Vec<f64>,
    pub kappa: Vec<f64>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Runtime(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
    }

    /// Overlay `other` on top of `self`; fields set in `other` win.
    pub fn merged(mut self, other: ConfigFile) -> Self {
        macro_rules! over {
            ($sec:ident: $($f:ident),*) => { $( if other.$sec.$f.is_some() { self.$sec.$f = other.$sec.$f; } )* };
        }
        over!(model: case, s0, v0, kappa, theta, xi, rho, r, q);
        over!(product: kind, maturity, strike, strikes, periods);
        over!(run: scheme, k, steps, paths, reps, seed, threads, martingale, spot, batch_size);
        if other.grid.is_some() {
            self.grid = other.grid;
        }
        self
    }

    fn case(&self) -> Result<Option<Case>, CliError> {
        self.model
            .case
            .as_deref()
            .map(|s| s.parse::<Case>().map_err(|e| CliError::Runtime(format!("model.case: {e}"))))
            .transpose()
    }

    /// Model parameters, maturity and strikes for the `exact` subcommand and
    /// the option experiments.
    pub fn model(&self) -> Result<(String, ModelParams), CliError> {
        let case = self.case()?;
        let base = case.map(Case::model);
        let m = &self.model;
        let field = |name: &str, v: Option<f64>, preset: Option<f64>| {
            v.or(preset)
                .ok_or_else(|| CliError::Runtime(format!("model.{name}: missing (set it or give model.case)")))
        };
        let params = ModelParams {
            s0: field("s0", m.s0, base.map(|b| b.s0))?,
            v0: field("v0", m.v0, base.map(|b| b.v0))?,
            kappa: field("kappa", m.kappa, base.map(|b| b.kappa))?,
            theta: field("theta", m.theta, base.map(|b| b.theta))?,
            xi: field("xi", m.xi, base.map(|b| b.xi))?,
            rho: field("rho", m.rho, base.map(|b| b.rho))?,
            r: m.r.or(base.map(|b| b.r)).unwrap_or(0.0),
            q: m.q.or(base.map(|b| b.q)).unwrap_or(0.0),
        };
        params.validate().map_err(|e| CliError::Runtime(format!("model: {e}")))?;
        let label = case.map_or("custom", Case::name).to_string();
        Ok((label, params))
    }

    pub fn maturity(&self) -> Result<f64, CliError> {
        self.product
            .maturity
            .or(self.case()?.map(Case::maturity))
            .ok_or_else(|| CliError::Runtime("product.maturity: missing".into()))
    }

    pub fn strikes(&self) -> Result<Vec<f64>, CliError> {
        let p = &self.product;
        if p.strike.is_some() && p.strikes.is_some() {
            return Err(CliError::Usage("product.strike and product.strikes are exclusive".into()));
        }
        if let Some(s) = &p.strikes {
            return Ok(s.clone());
        }
        p.strike
            .or(self.case()?.map(Case::strike))
            .map(|k| vec![k])
            .ok_or_else(|| CliError::Runtime("product.strike: missing".into()))
    }

    fn scheme_config(&self, swap: bool) -> Result<SchemeConfig, CliError> {
        let run = &self.run;
        let kind: SchemeKind = run
            .scheme
            .as_deref()
            .ok_or_else(|| CliError::Usage("run.scheme: missing (use --scheme)".into()))?
            .parse()
            .map_err(|e: HestonError| CliError::Usage(format!("run.scheme: {e}")))?;
        if run.k.is_some() && !kind.truncated() {
            return Err(CliError::Usage(format!("run.K: scheme {kind} takes no truncation level")));
        }
        let n_steps = if swap {
            let periods = self
                .product
                .periods
                .ok_or_else(|| CliError::Usage("product.periods: missing (use --periods)".into()))?;
            if run.steps.is_some_and(|s| s != periods) {
                return Err(CliError::Usage("run.steps: must equal the number of monitoring periods".into()));
            }
            if !kind.time_discretized() {
                return Err(CliError::Usage(format!(
                    "run.scheme: variance swaps need qem or pois-td, not {kind}"
                )));
            }
            periods
        } else {
            run.steps.unwrap_or(1)
        };
        let mut cfg = SchemeConfig::new(kind, run.k, n_steps)
            .map_err(|e| CliError::Usage(format!("run: {e}")))?;
        let mode = match &run.martingale {
            Some(s) => s
                .parse::<MartingaleMode>()
                .map_err(|e| CliError::Usage(format!("run.martingale: {e}")))?,
            None if swap && kind == SchemeKind::PoisTd => MartingaleMode::ReturnVariance,
            None => cfg.martingale_mode,
        };
        cfg = cfg
            .with_mode(mode)
            .map_err(|e| CliError::Usage(format!("run.martingale: {e}")))?;
        Ok(cfg)
    }

    /// One experiment per grid point (or a single one without a grid).
    pub fn experiments(&self, kind: ProductType) -> Result<Vec<ExperimentSpec>, CliError> {
        if self.product.kind.is_some_and(|k| k != kind) {
            return Err(CliError::Usage("product.type: does not match the subcommand".into()));
        }
        let swap = kind == ProductType::VarianceSwap;
        let (label, model) = self.model()?;
        let maturity = self.maturity()?;
        let cfg = self.scheme_config(swap)?;
        let product = if swap {
            Product::VarianceSwap { periods: cfg.n_steps }
        } else {
            Product::EuropeanCall { strikes: self.strikes()? }
        };
        let run = &self.run;
        let base = ExperimentSpec {
            label,
            model,
            maturity,
            product,
            configs: vec![cfg],
            n_paths: run.paths.unwrap_or(DEFAULT_PATHS),
            n_reps: run.reps.unwrap_or(DEFAULT_REPS),
            seed: run.seed.unwrap_or(DEFAULT_SEED),
            benchmark: if swap {
                BenchmarkSource::VarswapClosedForm
            } else {
                BenchmarkSource::Fourier
            },
            spot: run.spot.unwrap_or(false),
            batch_size: run.batch_size.unwrap_or(DEFAULT_BATCH_SIZE),
            threads: run.threads,
        };
        let specs = match &self.grid {
            None => vec![base],
            Some(g) => grid_specs(&base, &g.xi, &g.kappa)?,
        };
        for s in &specs {
            s.validate().map_err(|e| CliError::Runtime(format!("{}: {e}", s.label)))?;
        }
        Ok(specs)
    }
}

/// Cross product of `xi` and `kappa` around `base`, labelled `<label>(xi=..,kappa=..)`.
pub fn grid_specs(base: &ExperimentSpec, xi: &[f64], kappa: &[f64]) -> Result<Vec<ExperimentSpec>, CliError> {
    if xi.is_empty() || kappa.is_empty() {
        return Err(CliError::Runtime("grid: xi and kappa lists must be non-empty".into()));
    }
    let mut out = Vec::with_capacity(xi.len() * kappa.len());
    for &x in xi {
        for &k in kappa {
            let mut s = base.clone();
            s.model.xi = x;
            s.model.kappa = k;
            s.model
                .validate()
                .map_err(|e| CliError::Runtime(format!("grid (xi={x}, kappa={k}): {e}")))?;
            s.label = format!("{}(xi={x},kappa={k})", base.label);
            out.push(s);
        }
    }
    Ok(out)
}
