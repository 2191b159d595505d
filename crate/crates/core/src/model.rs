//! Heston model parameters and closed-form moments of the CIR variance.

use serde::{Deserialize, Serialize};

use crate::error::{positive, HestonError, Result};

/// Parameters of `dS/S = (r-q)dt + sqrt(V)(rho dZ + sqrt(1-rho^2) dW)`,
/// `dV = kappa(theta - V)dt + xi sqrt(V) dZ`.
///
/// Rates are decimals (3.19% is `0.0319`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub s0: f64,
    pub v0: f64,
    pub kappa: f64,
    pub theta: f64,
    pub xi: f64,
    pub rho: f64,
    #[serde(default)]
    pub r: f64,
    #[serde(default)]
    pub q: f64,
}

impl ModelParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        s0: f64,
        v0: f64,
        kappa: f64,
        theta: f64,
        xi: f64,
        rho: f64,
        r: f64,
        q: f64,
    ) -> Result<Self> {
        let p = Self {
            s0,
            v0,
            kappa,
            theta,
            xi,
            rho,
            r,
            q,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        positive("s0", self.s0)?;
        positive("v0", self.v0)?;
        positive("kappa", self.kappa)?;
        positive("theta", self.theta)?;
        positive("xi", self.xi)?;
        if !(self.rho.abs() <= 1.0) {
            return Err(HestonError::InvalidParameter {
                name: "rho",
                value: self.rho,
                reason: "correlation must lie in [-1, 1]",
            });
        }
        for (name, value) in [("r", self.r), ("q", self.q)] {
            if !value.is_finite() {
                return Err(HestonError::InvalidParameter {
                    name,
                    value,
                    reason: "rate must be finite",
                });
            }
        }
        Ok(())
    }

    /// Degrees of freedom of the scaled noncentral chi-square, `4 kappa theta / xi^2`.
    #[inline]
    pub fn delta(&self) -> f64 {
        4.0 * self.kappa * self.theta / (self.xi * self.xi)
    }

    /// Bessel order `delta/2 - 1`.
    #[inline]
    pub fn nu(&self) -> f64 {
        0.5 * self.delta() - 1.0
    }

    /// Feller condition `2 kappa theta >= xi^2`.
    pub fn feller(&self) -> bool {
        self.delta() >= 2.0
    }

    /// Forward price `S0 e^{(r-q)T}`.
    pub fn forward(&self, t: f64) -> f64 {
        self.s0 * ((self.r - self.q) * t).exp()
    }
}

/// `phi_t(k) = (2k / xi^2) / sinh(k t / 2)`.
pub fn phi(kappa_arg: f64, t: f64, xi: f64) -> Result<f64> {
    positive("kappa", kappa_arg)?;
    positive("t", t)?;
    positive("xi", xi)?;
    let half = 0.5 * kappa_arg * t;
    if half > 700.0 {
        return Err(HestonError::Domain(format!(
            "phi: kappa*t/2 = {half} overflows sinh"
        )));
    }
    Ok(2.0 * kappa_arg / (xi * xi) / half.sinh())
}

/// `(E, Var)` of `V_t` given `V_0 = v0`.
pub fn terminal_variance_moments(v0: f64, t: f64, model: &ModelParams) -> (f64, f64) {
    let decay = (-model.kappa * t).exp();
    let one_minus = -(-model.kappa * t).exp_m1();
    let mean = model.theta + (v0 - model.theta) * decay;
    let var = model.xi * model.xi / model.kappa
        * one_minus
        * (v0 * decay + 0.5 * model.theta * one_minus);
    (mean, var)
}

/// `(E, Var)` of the average variance `R = (1/t) int_0^t V_s ds`.
pub fn avg_variance_moments(model: &ModelParams, t: f64) -> (f64, f64) {
    let kt = model.kappa * t;
    let decay = (-kt).exp();
    let ratio = -(-kt).exp_m1() / kt;
    let (v0, theta) = (model.v0, model.theta);
    let mean = theta + (v0 - theta) * ratio;
    let var = model.xi * model.xi / (model.kappa * model.kappa * t)
        * (theta - 2.0 * (v0 - theta) * decay
            + (v0 - 2.5 * theta + (v0 - 0.5 * theta) * decay) * ratio);
    (mean, var)
}
