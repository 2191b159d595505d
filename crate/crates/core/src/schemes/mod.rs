//! One-step simulation kernels behind a common step contract.
//!
//! Every kernel maps `V_i` to `(V_{i+1}, I_{i,i+1})` plus optional Poisson count
//! and martingale corrections; the `step_*` functions build the kernel for a
//! single call, while [`Stepper`] keeps the precomputed constants for path loops.

mod config;
mod kernels;
mod qe;

pub use config::{MartingaleMode, SchemeConfig, SchemeKind};
pub(crate) use kernels::Kernel;
pub use kernels::{
    GeKernel, IgKernel, PoisGeKernel, PoisTdKernel, QemKernel, StepResult, Stepper,
};
pub use qe::{QeBranch, QeCoeffs, PSI_CRITICAL};

use crate::error::{positive, Result};
use crate::model::ModelParams;
use crate::rng::RngStream;

/// Poisson-conditioned gamma expansion with `K` explicit terms and an
/// inverse Gaussian for the remainder.
pub fn step_pois_ge(
    v: f64,
    h: f64,
    k: u32,
    model: &ModelParams,
    rng: &mut RngStream,
) -> Result<StepResult> {
    positive("v", v)?;
    Ok(PoisGeKernel::new(model, h, k)?.step(v, rng))
}

/// Poisson-conditioned inverse Gaussian; the `K = 0` case of [`step_pois_ge`].
pub fn step_pois_ig(v: f64, h: f64, model: &ModelParams, rng: &mut RngStream) -> Result<StepResult> {
    step_pois_ge(v, h, 0, model, rng)
}

/// Gamma expansion conditioned on the Bessel variate, with gamma remainders.
pub fn step_ge(
    v: f64,
    h: f64,
    k: u32,
    model: &ModelParams,
    rng: &mut RngStream,
) -> Result<StepResult> {
    positive("v", v)?;
    Ok(GeKernel::new(model, h, k)?.step(v, rng))
}

/// Exact variance with a moment-matched inverse Gaussian integrated variance.
pub fn step_ig(v: f64, h: f64, model: &ModelParams, rng: &mut RngStream) -> Result<StepResult> {
    positive("v", v)?;
    Ok(IgKernel::new(model, h)?.step(v, rng))
}

/// Quadratic-exponential step with trapezoidal integrated variance and
/// the price martingale correction.
pub fn step_qem(v: f64, h: f64, model: &ModelParams, rng: &mut RngStream) -> Result<StepResult> {
    positive("v", v)?;
    QemKernel::new(model, h, MartingaleMode::Price)?.step(v, rng)
}

/// Exact variance with the Poisson-conditioned mean as integrated variance
/// and both corrections computed from the conditional variance.
pub fn step_pois_td(
    v: f64,
    h: f64,
    model: &ModelParams,
    rng: &mut RngStream,
) -> Result<StepResult> {
    positive("v", v)?;
    let price = PoisTdKernel::new(model, h, MartingaleMode::Price)?;
    let mut r = price.step(v, rng)?;
    let mu = r.mu.unwrap_or(0);
    let m = crate::moments::iv_moments_pois(v, r.v_next, mu, model, h)?;
    let d = model.rho * model.kappa / model.xi - 0.5;
    r.mart_retvar = d * d * m.variance;
    Ok(r)
}
