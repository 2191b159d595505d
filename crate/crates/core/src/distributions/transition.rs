use crate::distributions::{poisson_unchecked, std_gamma_unchecked};
use crate::error::{positive, Result};
use crate::model::ModelParams;
use crate::rng::RngStream;

/// Exact CIR transition over a fixed step `h` as a Poisson mixture of gammas:
/// `mu ~ POIS(v phi_h e^{-kappa h/2} / 2)`, `V_h = (2 e^{-kappa h/2} / phi_h) Gamma(delta/2 + mu)`.
#[derive(Debug, Clone, Copy)]
pub struct VarianceTransition {
    /// Poisson rate per unit of starting variance.
    rate_per_var: f64,
    /// Scale applied to the gamma draw.
    scale: f64,
    half_delta: f64,
}

impl VarianceTransition {
    pub fn new(model: &ModelParams, h: f64) -> Result<Self> {
        positive("h", h)?;
        let kh = model.kappa * h;
        let xi2 = model.xi * model.xi;
        // phi_h e^{-kh/2} / 2 = (2 kappa / xi^2) / expm1(kh)
        // 2 e^{-kh/2} / phi_h = xi^2 (1 - e^{-kh}) / (2 kappa)
        Ok(Self {
            rate_per_var: 2.0 * model.kappa / xi2 / kh.exp_m1(),
            scale: -(-kh).exp_m1() * xi2 / (2.0 * model.kappa),
            half_delta: 0.5 * model.delta(),
        })
    }

    #[inline]
    pub fn poisson_rate(&self, v: f64) -> f64 {
        v * self.rate_per_var
    }

    #[inline]
    pub fn gamma_scale(&self) -> f64 {
        self.scale
    }

    /// Returns `(V_next, mu)`.
    #[inline]
    pub fn sample(&self, v: f64, rng: &mut RngStream) -> (f64, u64) {
        let mu = poisson_unchecked(self.poisson_rate(v), rng);
        let g = std_gamma_unchecked(self.half_delta + mu as f64, rng);
        (self.scale * g, mu)
    }
}

/// One exact draw of `(V_h, mu)` given `V_0 = v0`.
pub fn sample_terminal_variance(
    v0: f64,
    h: f64,
    model: &ModelParams,
    rng: &mut RngStream,
) -> Result<(f64, u64)> {
    positive("v0", v0)?;
    let t = VarianceTransition::new(model, h)?;
    let rate = t.poisson_rate(v0);
    if !rate.is_finite() {
        return Err(crate::error::HestonError::Domain(format!(
            "Poisson rate {rate} for v0 = {v0}, h = {h}"
        )));
    }
    Ok(t.sample(v0, rng))
}
