//! Path simulation, conditional Monte Carlo call prices, spot reconstruction
//! and discretely monitored variance swaps.

use crate::analytic::bs_call_undiscounted;
use crate::error::{positive, HestonError, Result};
use crate::model::ModelParams;
use crate::rng::RngStream;
use crate::schemes::{Kernel, SchemeConfig, SchemeKind, Stepper};

/// `(rho/xi) [V' - V + kappa (I - theta h)]`.
#[inline]
fn correlation_term(v0: f64, v_next: f64, iv: f64, h: f64, model: &ModelParams) -> f64 {
    model.rho / model.xi * (v_next - v0 + model.kappa * (iv - model.theta * h))
}

/// Log-return exponent without drift and diffusion parts.
#[inline]
pub(crate) fn return_correction(
    v0: f64,
    v_next: f64,
    iv: f64,
    h: f64,
    model: &ModelParams,
    mart_price: f64,
) -> f64 {
    -0.5 * iv + correlation_term(v0, v_next, iv, h, model) + mart_price
}

/// Conditional-forward exponent without drift.
#[inline]
pub(crate) fn forward_correction(
    v0: f64,
    v_next: f64,
    iv: f64,
    h: f64,
    model: &ModelParams,
    mart_price: f64,
) -> f64 {
    -0.5 * model.rho * model.rho * iv + correlation_term(v0, v_next, iv, h, model) + mart_price
}

/// `ln(S_{i+1}/S_i)` given the variance endpoints, the integrated variance and a
/// standard normal `z`.
pub fn sample_log_return(
    v0: f64,
    v_next: f64,
    iv: f64,
    h: f64,
    model: &ModelParams,
    z: f64,
    mart_price: f64,
) -> f64 {
    (model.r - model.q) * h
        + return_correction(v0, v_next, iv, h, model, mart_price)
        + ((1.0 - model.rho * model.rho) * iv).sqrt() * z
}

/// `E[S_{i+1} | V_i, V_{i+1}, I]` starting from `s`.
pub fn cond_forward(
    s: f64,
    v0: f64,
    v_next: f64,
    iv: f64,
    h: f64,
    model: &ModelParams,
    mart_price: f64,
) -> f64 {
    s * ((model.r - model.q) * h + forward_correction(v0, v_next, iv, h, model, mart_price)).exp()
}

/// Terminal state of one simulated path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSample {
    pub v_terminal: f64,
    /// Integrated variance over `[0, T]`.
    pub iv: f64,
    /// Sum of the Poisson counts (zero for schemes without one).
    pub mu: u64,
    /// `ln F_T`, the log of the conditional forward.
    pub log_forward: f64,
    /// `sum_i [ln^2(S_{i+1}/S_i) + M'_i]`, filled only when returns are sampled.
    pub realized: f64,
}

/// Simulates paths on `[0, T]` with `n_steps` equal steps.
#[derive(Debug, Clone)]
pub struct PathSimulator {
    model: ModelParams,
    t: f64,
    h: f64,
    n_steps: u32,
    log_s0: f64,
    stepper: Stepper,
}

impl PathSimulator {
    pub fn new(model: &ModelParams, t: f64, cfg: &SchemeConfig) -> Result<Self> {
        positive("T", t)?;
        cfg.validate()?;
        let h = t / cfg.n_steps as f64;
        Ok(Self {
            model: *model,
            t,
            h,
            n_steps: cfg.n_steps,
            log_s0: model.s0.ln(),
            stepper: Stepper::new(model, h, cfg)?,
        })
    }

    pub fn model(&self) -> &ModelParams {
        &self.model
    }

    pub fn maturity(&self) -> f64 {
        self.t
    }

    /// One path. With `returns`, a normal is drawn per step (after the step's
    /// own variates) and the squared log returns are accumulated.
    pub fn simulate(&self, rng: &mut RngStream, returns: bool) -> Result<PathSample> {
        match &self.stepper {
            Stepper::Ge(k) => self.run(k, rng, returns),
            Stepper::PoisGe(k) => self.run(k, rng, returns),
            Stepper::Ig(k) => self.run(k, rng, returns),
            Stepper::Qem(k) => self.run(k, rng, returns),
            Stepper::PoisTd(k) => self.run(k, rng, returns),
        }
    }

    fn run<K: Kernel>(&self, kernel: &K, rng: &mut RngStream, returns: bool) -> Result<PathSample> {
        let m = &self.model;
        let drift = (m.r - m.q) * self.h;
        let mut v = m.v0;
        let mut iv = 0.0;
        let mut mu = 0;
        let mut log_fwd = self.log_s0;
        let mut realized = 0.0;
        for _ in 0..self.n_steps {
            let r = kernel.step_result(v, rng)?;
            log_fwd += drift + forward_correction(v, r.v_next, r.iv, self.h, m, r.mart_price);
            if returns {
                let z = rng.normal();
                let lr = sample_log_return(v, r.v_next, r.iv, self.h, m, z, r.mart_price);
                realized += lr * lr + r.mart_retvar;
            }
            iv += r.iv;
            mu += r.mu.unwrap_or(0);
            v = r.v_next;
        }
        Ok(PathSample {
            v_terminal: v,
            iv,
            mu,
            log_forward: log_fwd,
            realized,
        })
    }

    /// Discounted Black price conditional on the path.
    #[inline]
    pub fn call_payoff(&self, path: &PathSample, strike: f64) -> f64 {
        let m = &self.model;
        let sigma = ((1.0 - m.rho * m.rho) * path.iv / self.t).sqrt();
        (-m.r * self.t).exp() * bs_call_undiscounted(path.log_forward.exp(), sigma, self.t, strike)
    }

    /// `e^{(q-r)T} F_T`, whose expectation is `S_0`.
    #[inline]
    pub fn spot_payoff(&self, path: &PathSample) -> f64 {
        ((self.model.q - self.model.r) * self.t).exp() * path.log_forward.exp()
    }
}

/// Running mean with a standard error of the mean.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct MeanAcc {
    n: u64,
    sum: f64,
    sum_sq: f64,
}

impl MeanAcc {
    #[inline]
    pub(crate) fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub(crate) fn mean_se(&self) -> (f64, f64) {
        let n = self.n as f64;
        let mean = self.sum / n;
        if self.n < 2 {
            return (mean, 0.0);
        }
        let var = ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
        (mean, (var / n).sqrt())
    }
}

fn check_paths(n_paths: u64) -> Result<()> {
    if n_paths == 0 {
        return Err(HestonError::Config("at least one path is required".into()));
    }
    Ok(())
}

/// Conditional Monte Carlo call price `e^{-rT} E[BS(F_T, sqrt((1-rho^2) I / T))]`
/// with its standard error.
pub fn price_european_cmc(
    model: &ModelParams,
    t: f64,
    strike: f64,
    cfg: &SchemeConfig,
    n_paths: u64,
    rng: &mut RngStream,
) -> Result<(f64, f64)> {
    positive("strike", strike)?;
    check_paths(n_paths)?;
    let sim = PathSimulator::new(model, t, cfg)?;
    let mut acc = MeanAcc::default();
    for _ in 0..n_paths {
        let p = sim.simulate(rng, false)?;
        acc.push(sim.call_payoff(&p, strike));
    }
    Ok(acc.mean_se())
}

/// Spot price recovered as `e^{(q-r)T} E[F_T]`.
pub fn reconstruct_spot(
    model: &ModelParams,
    t: f64,
    cfg: &SchemeConfig,
    n_paths: u64,
    rng: &mut RngStream,
) -> Result<(f64, f64)> {
    check_paths(n_paths)?;
    let sim = PathSimulator::new(model, t, cfg)?;
    let mut acc = MeanAcc::default();
    for _ in 0..n_paths {
        let p = sim.simulate(rng, false)?;
        acc.push(sim.spot_payoff(&p));
    }
    Ok(acc.mean_se())
}

/// Fair strike `E[(1/T) sum_i ln^2(S_{i+1}/S_i)]` of a variance swap monitored
/// `periods` times, one simulation step per period.
pub fn varswap_fair_strike_mc(
    model: &ModelParams,
    t: f64,
    periods: u32,
    cfg: &SchemeConfig,
    n_paths: u64,
    rng: &mut RngStream,
) -> Result<(f64, f64)> {
    check_paths(n_paths)?;
    check_varswap_config(cfg, periods)?;
    let sim = PathSimulator::new(model, t, cfg)?;
    let mut acc = MeanAcc::default();
    for _ in 0..n_paths {
        let p = sim.simulate(rng, true)?;
        acc.push(p.realized / t);
    }
    Ok(acc.mean_se())
}

pub(crate) fn check_varswap_config(cfg: &SchemeConfig, periods: u32) -> Result<()> {
    if !matches!(cfg.kind, SchemeKind::Qem | SchemeKind::PoisTd) {
        return Err(HestonError::Config(format!(
            "variance swaps are priced with qem or pois-td, not {}",
            cfg.kind
        )));
    }
    if cfg.n_steps != periods {
        return Err(HestonError::Config(format!(
            "scheme has {} steps but the swap has {periods} monitoring periods",
            cfg.n_steps
        )));
    }
    Ok(())
}
