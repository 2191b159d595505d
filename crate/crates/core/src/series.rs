//! Gamma-expansion coefficients of the integrated variance over a step of length `h`.
//!
//! Conditional on the endpoints, `I = X + Z_{delta/2} + sum_{j<=eta} Z_2` with
//! `X = sum_k Gamma(n_k)/gamma_k`, `n_k ~ POIS((v0+vT) lambda_k)` and
//! `Z_alpha = sum_k Gamma(alpha)/gamma_k`.

use std::f64::consts::PI;

use crate::error::{positive, HestonError, Result};
use crate::model::ModelParams;

/// Below this value of `a = kappa h / 2` the coefficients come from their power series.
pub const SERIES_THRESHOLD: f64 = 0.5;

const MAX_A: f64 = 700.0;

// Coefficients of a^{2i}, i = 0..13.
const MX_SERIES: [f64; 14] = [
    0.33333333333333333333,
    -0.044444444444444444444,
    0.0063492063492063492063,
    -0.00084656084656084656085,
    0.00010688899577788466677,
    -0.000012986425684838383251,
    1.5348163496311644460e-6,
    -1.7771687031983743261e-7,
    2.0257061865128093569e-8,
    -2.2805151204592182866e-9,
    2.5417075858902886506e-10,
    -2.8094048183789860751e-11,
    3.0837322620303750584e-12,
    -3.3648181466630788651e-13,
];
const VX_SERIES: [f64; 14] = [
    0.022222222222222222222,
    -0.0063492063492063492063,
    0.0012698412698412698413,
    -0.00021377799155576933355,
    0.000032466064212095958128,
    -4.6044490488934933379e-6,
    6.2200904611943101413e-7,
    -8.1028247460512374275e-8,
    1.0262318042066482290e-8,
    -1.2708537929451443253e-9,
    1.5451726501084423413e-10,
    -1.8502393572182250350e-11,
    2.1871317953310012623e-12,
    -2.5569551730642537168e-13,
];
const MZ_SERIES: [f64; 14] = [
    0.083333333333333333333,
    -0.0055555555555555555556,
    0.00052910052910052910053,
    -0.000052910052910052910053,
    5.3444497888942333387e-6,
    -5.4110107020159930213e-7,
    5.4814869629684444499e-8,
    -5.5536521974949197690e-9,
    5.6269616292022482136e-10,
    -5.7012878011480457165e-11,
    5.7766081497506560241e-12,
    -5.8529267049562209898e-13,
    5.9302543500584135738e-14,
    -6.0086038333269265448e-15,
];
const VZ_SERIES: [f64; 14] = [
    0.0027777777777777777778,
    -0.00052910052910052910053,
    0.000079365079365079365079,
    -0.000010688899577788466677,
    1.3527526755039982553e-6,
    -1.6444460888905333350e-7,
    1.9437782691232219192e-8,
    -2.2507846516808992854e-9,
    2.5655795105166205724e-10,
    -2.8883040748753280121e-11,
    3.2191096877259215444e-12,
    -3.5581526100350481443e-13,
    3.9055924916625022541e-14,
    -4.2615919551070895279e-15,
];

fn poly(coeffs: &[f64; 14], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Coefficients for one step length `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesCoeffs {
    pub a: f64,
    pub c1: f64,
    pub c2: f64,
    pub m_x: f64,
    pub v_x: f64,
    pub m_z: f64,
    pub v_z: f64,
    pub h: f64,
    pub kappa: f64,
    pub xi: f64,
}

/// Tails of the expansion beyond the first `K` terms.
///
/// `x_*` are per unit of `v0 + vT`, `z_*` per unit of the gamma shape `alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesTails {
    pub x_mean: f64,
    pub x_var: f64,
    pub z_mean: f64,
    pub z_var: f64,
}

impl SeriesCoeffs {
    pub fn new(kappa: f64, xi: f64, h: f64) -> Result<Self> {
        positive("kappa", kappa)?;
        positive("xi", xi)?;
        positive("h", h)?;
        let a = 0.5 * kappa * h;
        if !(a > 0.0 && a <= MAX_A) {
            return Err(HestonError::Domain(format!(
                "kappa*h/2 = {a} outside (0, {MAX_A}]"
            )));
        }
        let e = (-2.0 * a).exp();
        let c1 = 1.0 / a.tanh();
        // 1/sinh^2(a) = 4 e^{-2a} / (1 - e^{-2a})^2 stays finite for large a.
        let om = -(-2.0 * a).exp_m1();
        let c2 = 4.0 * e / (om * om);
        let (m_x, v_x, m_z, v_z) = if a < SERIES_THRESHOLD {
            let a2 = a * a;
            (
                poly(&MX_SERIES, a2),
                poly(&VX_SERIES, a2),
                poly(&MZ_SERIES, a2),
                poly(&VZ_SERIES, a2),
            )
        } else {
            let a2 = a * a;
            (
                (c1 - a * c2) / (2.0 * a),
                (c1 + a * c2 - 2.0 * a2 * c1 * c2) / (8.0 * a2 * a),
                (a * c1 - 1.0) / (4.0 * a2),
                (a * c1 + a2 * c2 - 2.0) / (16.0 * a2 * a2),
            )
        };
        Ok(Self {
            a,
            c1,
            c2,
            m_x,
            v_x,
            m_z,
            v_z,
            h,
            kappa,
            xi,
        })
    }

    /// `lambda_k = 16 k^2 pi^2 / (xi^2 h (kappa^2 h^2 + 4 k^2 pi^2))`.
    #[inline]
    pub fn lambda_k(&self, k: u64) -> f64 {
        let kp2 = 4.0 * (k as f64 * PI).powi(2);
        4.0 * kp2 / (self.xi * self.xi * self.h * (self.kh2() + kp2))
    }

    /// `gamma_k = (kappa^2 h^2 + 4 k^2 pi^2) / (2 xi^2 h^2)`.
    #[inline]
    pub fn gamma_k(&self, k: u64) -> f64 {
        let kp2 = 4.0 * (k as f64 * PI).powi(2);
        (self.kh2() + kp2) / (2.0 * self.xi * self.xi * self.h * self.h)
    }

    #[inline]
    fn kh2(&self) -> f64 {
        let kh = self.kappa * self.h;
        kh * kh
    }

    /// `E(X) / (v0 + vT)`.
    pub fn x_mean(&self) -> f64 {
        self.m_x * self.h
    }

    /// `Var(X) / (v0 + vT)`.
    pub fn x_var(&self) -> f64 {
        self.v_x * self.xi * self.xi * self.h.powi(3)
    }

    /// `E(Z_alpha) / alpha`.
    pub fn z_mean(&self) -> f64 {
        self.m_z * (self.xi * self.h).powi(2)
    }

    /// `Var(Z_alpha) / alpha`.
    pub fn z_var(&self) -> f64 {
        self.v_z * (self.xi * self.h).powi(4)
    }

    /// Closed-form moments minus the contributions of `k = 1..=K`.
    ///
    /// Rounding can leave tiny negative values at large `K`; those clamp to zero,
    /// anything more negative than `1e-14` of the full moment is an error.
    pub fn tails(&self, k_max: u64) -> Result<SeriesTails> {
        let (mut sx, mut sxv, mut sz, mut szv) = (0.0, 0.0, 0.0, 0.0);
        for k in 1..=k_max {
            let lam = self.lambda_k(k);
            let inv_g = 1.0 / self.gamma_k(k);
            sx += lam * inv_g;
            sxv += 2.0 * lam * inv_g * inv_g;
            sz += inv_g;
            szv += inv_g * inv_g;
        }
        Ok(SeriesTails {
            x_mean: clamp_tail(self.x_mean(), sx, "E(X)")?,
            x_var: clamp_tail(self.x_var(), sxv, "Var(X)")?,
            z_mean: clamp_tail(self.z_mean(), sz, "E(Z)")?,
            z_var: clamp_tail(self.z_var(), szv, "Var(Z)")?,
        })
    }
}

fn clamp_tail(full: f64, head: f64, what: &str) -> Result<f64> {
    let tail = full - head;
    if tail >= 0.0 {
        Ok(tail)
    } else if tail >= -1e-14 * full {
        debug_assert!(tail >= -1e-14 * full);
        Ok(0.0)
    } else {
        Err(HestonError::Numerical(format!(
            "truncated {what} is negative: {full} - {head} = {tail}"
        )))
    }
}

/// Coefficient bundle for `model` over a step of length `h`.
pub fn series_coeffs(model: &ModelParams, h: f64) -> Result<SeriesCoeffs> {
    SeriesCoeffs::new(model.kappa, model.xi, h)
}
