use crate::distributions::{
    bessel_rv_moments_unchecked, bessel_rv_unchecked, invgauss_by_moments, poisson_unchecked,
    std_gamma_unchecked, VarianceTransition,
};
use crate::error::{positive, HestonError, Result};
use crate::model::{phi, ModelParams};
use crate::rng::RngStream;
use crate::schemes::config::{MartingaleMode, SchemeConfig, SchemeKind};
use crate::schemes::qe::QeStep;
use crate::series::{SeriesCoeffs, SeriesTails};

/// Outcome of one step `V_i -> V_{i+1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepResult {
    pub v_next: f64,
    /// Integrated variance over the step.
    pub iv: f64,
    /// Poisson count of the variance draw (Poisson-conditioned schemes only).
    pub mu: Option<u64>,
    /// Correction added to the forward (and log-return) exponent.
    pub mart_price: f64,
    /// Correction added to the squared log return.
    pub mart_retvar: f64,
}

impl StepResult {
    fn plain(v_next: f64, iv: f64, mu: Option<u64>) -> Self {
        Self {
            v_next,
            iv,
            mu,
            mart_price: 0.0,
            mart_retvar: 0.0,
        }
    }
}

/// Precomputed series terms `k = 1..=K`.
#[derive(Debug, Clone)]
struct Terms {
    lambda: Vec<f64>,
    inv_gamma: Vec<f64>,
    tails: SeriesTails,
}

impl Terms {
    fn new(coeffs: &SeriesCoeffs, k: u32) -> Result<Self> {
        let ks = 1..=k as u64;
        Ok(Self {
            lambda: ks.clone().map(|j| coeffs.lambda_k(j)).collect(),
            inv_gamma: ks.map(|j| 1.0 / coeffs.gamma_k(j)).collect(),
            tails: coeffs.tails(k as u64)?,
        })
    }
}

/// Gamma variate with given mean and variance; degenerates to the mean.
#[inline]
fn gamma_by_moments(mean: f64, var: f64, rng: &mut RngStream) -> f64 {
    if mean <= 0.0 {
        return 0.0;
    }
    if var < 1e-300 {
        return mean;
    }
    let shape = mean * mean / var;
    if !shape.is_finite() {
        return mean;
    }
    std_gamma_unchecked(shape, rng) * (var / mean)
}

#[derive(Debug, Clone)]
pub struct PoisGeKernel {
    trans: VarianceTransition,
    half_delta: f64,
    terms: Terms,
}

impl PoisGeKernel {
    pub fn new(model: &ModelParams, h: f64, k: u32) -> Result<Self> {
        let coeffs = SeriesCoeffs::new(model.kappa, model.xi, h)?;
        Ok(Self {
            trans: VarianceTransition::new(model, h)?,
            half_delta: 0.5 * model.delta(),
            terms: Terms::new(&coeffs, k)?,
        })
    }

    #[inline]
    pub fn step(&self, v: f64, rng: &mut RngStream) -> StepResult {
        let (v_next, mu) = self.trans.sample(v, rng);
        let v_sum = v + v_next;
        let shape = self.half_delta + 2.0 * mu as f64;
        let mut iv = 0.0;
        for (lam, ig) in self.terms.lambda.iter().zip(&self.terms.inv_gamma) {
            let n = poisson_unchecked(v_sum * lam, rng);
            iv += std_gamma_unchecked(n as f64 + shape, rng) * ig;
        }
        let rem = self.terms.tails.moments(v_sum, shape);
        iv += invgauss_by_moments(rem.mean, rem.variance, rng);
        StepResult::plain(v_next, iv, Some(mu))
    }
}

#[derive(Debug, Clone)]
pub struct GeKernel {
    trans: VarianceTransition,
    nu: f64,
    phi_h: f64,
    half_delta: f64,
    terms: Terms,
    /// Moments of the truncated `Z_{delta/2}` and `Z_2` remainders.
    zd_mean: f64,
    zd_var: f64,
    z2_mean: f64,
    z2_var: f64,
}

impl GeKernel {
    pub fn new(model: &ModelParams, h: f64, k: u32) -> Result<Self> {
        let coeffs = SeriesCoeffs::new(model.kappa, model.xi, h)?;
        let terms = Terms::new(&coeffs, k)?;
        let half_delta = 0.5 * model.delta();
        let t = terms.tails;
        Ok(Self {
            trans: VarianceTransition::new(model, h)?,
            nu: model.nu(),
            phi_h: phi(model.kappa, h, model.xi)?,
            half_delta,
            zd_mean: half_delta * t.z_mean,
            zd_var: half_delta * t.z_var,
            z2_mean: 2.0 * t.z_mean,
            z2_var: 2.0 * t.z_var,
            terms,
        })
    }

    #[inline]
    pub fn step(&self, v: f64, rng: &mut RngStream) -> StepResult {
        let (v_next, _) = self.trans.sample(v, rng);
        let z = (v * v_next).sqrt() * self.phi_h;
        let eta = if z > 0.0 {
            bessel_rv_unchecked(self.nu, z, rng)
        } else {
            0
        };
        let v_sum = v + v_next;
        let mut iv = 0.0;
        for (lam, ig) in self.terms.lambda.iter().zip(&self.terms.inv_gamma) {
            let n = poisson_unchecked(v_sum * lam, rng);
            let mut g = std_gamma_unchecked(self.half_delta, rng);
            if n > 0 {
                g += std_gamma_unchecked(n as f64, rng);
            }
            if eta > 0 {
                g += std_gamma_unchecked(2.0 * eta as f64, rng);
            }
            iv += g * ig;
        }
        let t = &self.terms.tails;
        iv += gamma_by_moments(v_sum * t.x_mean, v_sum * t.x_var, rng);
        iv += gamma_by_moments(self.zd_mean, self.zd_var, rng);
        for _ in 0..eta {
            iv += gamma_by_moments(self.z2_mean, self.z2_var, rng);
        }
        StepResult::plain(v_next, iv, None)
    }
}

#[derive(Debug, Clone)]
pub struct IgKernel {
    trans: VarianceTransition,
    coeffs: SeriesCoeffs,
    nu: f64,
    phi_h: f64,
    half_delta: f64,
}

impl IgKernel {
    pub fn new(model: &ModelParams, h: f64) -> Result<Self> {
        Ok(Self {
            trans: VarianceTransition::new(model, h)?,
            coeffs: SeriesCoeffs::new(model.kappa, model.xi, h)?,
            nu: model.nu(),
            phi_h: phi(model.kappa, h, model.xi)?,
            half_delta: 0.5 * model.delta(),
        })
    }

    #[inline]
    pub fn step(&self, v: f64, rng: &mut RngStream) -> StepResult {
        let (v_next, _) = self.trans.sample(v, rng);
        let z = (v * v_next).sqrt() * self.phi_h;
        let (e_eta, var_eta) = if z > 0.0 {
            bessel_rv_moments_unchecked(self.nu, z)
        } else {
            (0.0, 0.0)
        };
        let base = self.coeffs.pois_moments(v + v_next, self.half_delta);
        let z2_mean = 2.0 * self.coeffs.z_mean();
        let z2_var = 2.0 * self.coeffs.z_var();
        let mean = base.mean + e_eta * z2_mean;
        let var = base.variance + e_eta * z2_var + var_eta * z2_mean * z2_mean;
        StepResult::plain(v_next, invgauss_by_moments(mean, var, rng), None)
    }
}

#[derive(Debug, Clone)]
pub struct QemKernel {
    qe: QeStep,
    h: f64,
    corrected: bool,
}

impl QemKernel {
    pub fn new(model: &ModelParams, h: f64, mode: MartingaleMode) -> Result<Self> {
        positive("h", h)?;
        Ok(Self {
            qe: QeStep::new(model, h),
            h,
            corrected: mode != MartingaleMode::None,
        })
    }

    #[inline]
    pub fn step(&self, v: f64, rng: &mut RngStream) -> Result<StepResult> {
        let c = self.qe.coeffs(v);
        let draw = match c.branch {
            crate::schemes::qe::QeBranch::Quadratic { .. } => rng.normal(),
            crate::schemes::qe::QeBranch::Exponential { .. } => rng.uniform(),
        };
        let v_next = c.sample(draw);
        let iv = 0.5 * (v + v_next) * self.h;
        let mart_price = if self.corrected {
            self.qe.drift_k - self.qe.a2 * v - c.log_mgf_a1()?
        } else {
            0.0
        };
        Ok(StepResult {
            v_next,
            iv,
            mu: None,
            mart_price,
            mart_retvar: 0.0,
        })
    }
}

#[derive(Debug, Clone)]
pub struct PoisTdKernel {
    trans: VarianceTransition,
    coeffs: SeriesCoeffs,
    half_delta: f64,
    price_coef: f64,
    retvar_coef: f64,
    mode: MartingaleMode,
}

impl PoisTdKernel {
    pub fn new(model: &ModelParams, h: f64, mode: MartingaleMode) -> Result<Self> {
        let ModelParams { kappa, xi, rho, .. } = *model;
        let c = rho * (kappa / xi - 0.5 * rho);
        let d = rho * kappa / xi - 0.5;
        Ok(Self {
            trans: VarianceTransition::new(model, h)?,
            coeffs: SeriesCoeffs::new(kappa, xi, h)?,
            half_delta: 0.5 * model.delta(),
            price_coef: 0.5 * c * c,
            retvar_coef: d * d,
            mode,
        })
    }

    #[inline]
    pub fn step(&self, v: f64, rng: &mut RngStream) -> Result<StepResult> {
        let rate = self.trans.poisson_rate(v);
        if !rate.is_finite() {
            return Err(HestonError::InvalidParameter {
                name: "v",
                value: v,
                reason: "Poisson rate overflows; use fewer steps or smaller variance",
            });
        }
        let (v_next, mu) = self.trans.sample(v, rng);
        let m = self
            .coeffs
            .pois_moments(v + v_next, self.half_delta + 2.0 * mu as f64);
        let (mart_price, mart_retvar) = match self.mode {
            MartingaleMode::None => (0.0, 0.0),
            MartingaleMode::Price => (self.price_coef * m.variance, 0.0),
            MartingaleMode::ReturnVariance => (0.0, self.retvar_coef * m.variance),
        };
        Ok(StepResult {
            v_next,
            iv: m.mean,
            mu: Some(mu),
            mart_price,
            mart_retvar,
        })
    }
}

/// Common step interface, so path loops can be monomorphized per scheme.
pub(crate) trait Kernel {
    fn step_result(&self, v: f64, rng: &mut RngStream) -> Result<StepResult>;
}

impl Kernel for PoisGeKernel {
    #[inline]
    fn step_result(&self, v: f64, rng: &mut RngStream) -> Result<StepResult> {
        Ok(self.step(v, rng))
    }
}

impl Kernel for GeKernel {
    #[inline]
    fn step_result(&self, v: f64, rng: &mut RngStream) -> Result<StepResult> {
        Ok(self.step(v, rng))
    }
}

impl Kernel for IgKernel {
    #[inline]
    fn step_result(&self, v: f64, rng: &mut RngStream) -> Result<StepResult> {
        Ok(self.step(v, rng))
    }
}

impl Kernel for QemKernel {
    #[inline]
    fn step_result(&self, v: f64, rng: &mut RngStream) -> Result<StepResult> {
        self.step(v, rng)
    }
}

impl Kernel for PoisTdKernel {
    #[inline]
    fn step_result(&self, v: f64, rng: &mut RngStream) -> Result<StepResult> {
        self.step(v, rng)
    }
}

/// A step kernel for one scheme and step length, with all path-independent
/// constants precomputed.
#[derive(Debug, Clone)]
pub enum Stepper {
    Ge(GeKernel),
    PoisGe(PoisGeKernel),
    Ig(IgKernel),
    Qem(QemKernel),
    PoisTd(PoisTdKernel),
}

impl Stepper {
    pub fn new(model: &ModelParams, h: f64, cfg: &SchemeConfig) -> Result<Self> {
        cfg.validate()?;
        model.validate()?;
        positive("h", h)?;
        let k = cfg.truncation();
        Ok(match cfg.kind {
            SchemeKind::Ge => Stepper::Ge(GeKernel::new(model, h, k)?),
            SchemeKind::PoisGe => Stepper::PoisGe(PoisGeKernel::new(model, h, k)?),
            SchemeKind::Ig => Stepper::Ig(IgKernel::new(model, h)?),
            SchemeKind::Qem => Stepper::Qem(QemKernel::new(model, h, cfg.martingale_mode)?),
            SchemeKind::PoisTd => {
                Stepper::PoisTd(PoisTdKernel::new(model, h, cfg.martingale_mode)?)
            }
        })
    }

    #[inline]
    pub fn step(&self, v: f64, rng: &mut RngStream) -> Result<StepResult> {
        match self {
            Stepper::Ge(k) => Ok(k.step(v, rng)),
            Stepper::PoisGe(k) => Ok(k.step(v, rng)),
            Stepper::Ig(k) => Ok(k.step(v, rng)),
            Stepper::Qem(k) => k.step(v, rng),
            Stepper::PoisTd(k) => k.step(v, rng),
        }
    }
}
