//! Several independent CIR variances driving one price:
//! `dS/S = (r-q)dt + sum_m sqrt(V_m)(rho_m dZ_m + sqrt(1-rho_m^2) dW_m)`.
//! Each factor is sampled in one step with the Poisson-conditioned gamma expansion.

use crate::analytic::bs_call_undiscounted;
use crate::error::{positive, HestonError, Result};
use crate::model::ModelParams;
use crate::pricing::{cond_forward, forward_correction, return_correction, sample_log_return, MeanAcc};
use crate::rng::RngStream;
use crate::schemes::PoisGeKernel;

/// Terminal draw: `(ln(S_T/S_0), F_T, sqrt(sum_m (1-rho_m^2) I_m))`.
pub type TerminalSample = (f64, f64, f64);

#[derive(Debug, Clone)]
pub struct MultifactorSimulator {
    factors: Vec<(ModelParams, PoisGeKernel)>,
    t: f64,
}

impl MultifactorSimulator {
    pub fn new(models: &[ModelParams], t: f64, k: u32) -> Result<Self> {
        positive("T", t)?;
        let first = models
            .first()
            .ok_or_else(|| HestonError::Config("at least one factor is required".into()))?;
        let mut factors = Vec::with_capacity(models.len());
        for m in models {
            m.validate()?;
            if (m.s0, m.r, m.q) != (first.s0, first.r, first.q) {
                return Err(HestonError::Config(
                    "all factors must share s0, r and q".into(),
                ));
            }
            factors.push((*m, PoisGeKernel::new(m, t, k)?));
        }
        Ok(Self { factors, t })
    }

    /// Steps every factor in order, then draws one normal for the combined diffusion.
    pub fn sample(&self, rng: &mut RngStream) -> TerminalSample {
        let base = &self.factors[0].0;
        let t = self.t;
        let drift = (base.r - base.q) * t;
        let (mut ret, mut fwd, mut sig2) = (0.0, 0.0, 0.0);
        for (m, kernel) in &self.factors {
            let r = kernel.step(m.v0, rng);
            ret += return_correction(m.v0, r.v_next, r.iv, t, m, 0.0);
            fwd += forward_correction(m.v0, r.v_next, r.iv, t, m, 0.0);
            sig2 += (1.0 - m.rho * m.rho) * r.iv;
        }
        let sigma = sig2.sqrt();
        let z = rng.normal();
        (drift + ret + sigma * z, base.s0 * (drift + fwd).exp(), sigma)
    }
}

/// One terminal draw for the multifactor model.
pub fn simulate_multifactor_terminal(
    models: &[ModelParams],
    t: f64,
    k: u32,
    rng: &mut RngStream,
) -> Result<TerminalSample> {
    Ok(MultifactorSimulator::new(models, t, k)?.sample(rng))
}

/// The same draw for a single factor, through the single-factor step and
/// log-return formulas.
pub fn simulate_terminal(
    model: &ModelParams,
    t: f64,
    k: u32,
    rng: &mut RngStream,
) -> Result<TerminalSample> {
    let r = crate::schemes::step_pois_ge(model.v0, t, k, model, rng)?;
    let z = rng.normal();
    let lr = sample_log_return(model.v0, r.v_next, r.iv, t, model, z, r.mart_price);
    let f = cond_forward(model.s0, model.v0, r.v_next, r.iv, t, model, r.mart_price);
    Ok((lr, f, ((1.0 - model.rho * model.rho) * r.iv).sqrt()))
}

/// Conditional Monte Carlo call price in the multifactor model.
pub fn price_multifactor_cmc(
    models: &[ModelParams],
    t: f64,
    strike: f64,
    k: u32,
    n_paths: u64,
    rng: &mut RngStream,
) -> Result<(f64, f64)> {
    positive("strike", strike)?;
    if n_paths == 0 {
        return Err(HestonError::Config("at least one path is required".into()));
    }
    let sim = MultifactorSimulator::new(models, t, k)?;
    let disc = (-models[0].r * t).exp();
    let mut acc = MeanAcc::default();
    for _ in 0..n_paths {
        let (_, f, sigma) = sim.sample(rng);
        acc.push(disc * bs_call_undiscounted(f, sigma / t.sqrt(), t, strike));
    }
    Ok(acc.mean_se())
}
