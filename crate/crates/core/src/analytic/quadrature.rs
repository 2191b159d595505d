//! Adaptive Gauss–Lobatto quadrature with a Kronrod error estimate
//! (Gander and Gautschi).

use crate::error::{HestonError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureRule {
    AdaptiveGaussLobatto,
}

/// Settings for integrating a Fourier integrand over `[0, upper]`.
///
/// The range is cut into `panels` equal panels, each refined until the
/// Lobatto and Kronrod estimates agree to `tolerance` (relative to the
/// magnitude of the whole integral).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rule: QuadratureRule,
    pub panels: usize,
    pub upper: f64,
    pub tolerance: f64,
    pub max_depth: u32,
    /// Integrand evaluations allowed per panel before giving up.
    pub max_evals: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rule: QuadratureRule::AdaptiveGaussLobatto,
            panels: 64,
            upper: 1000.0,
            tolerance: 1e-9,
            max_depth: 30,
            max_evals: 100_000,
        }
    }
}

impl QuadratureSpec {
    /// Twice the panels, twice the range and a hundredfold tighter tolerance.
    pub fn refined(&self) -> Self {
        Self {
            panels: 2 * self.panels,
            upper: 2.0 * self.upper,
            tolerance: self.tolerance / 100.0,
            ..*self
        }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64> {
        if self.panels == 0 || !(self.upper > 0.0) || !(self.tolerance > 0.0) {
            return Err(HestonError::Config(format!("invalid quadrature spec {self:?}")));
        }
        let width = self.upper / self.panels as f64;
        // Rough magnitude first so each panel's tolerance is absolute.
        let mut scale = 0.0;
        for p in 0..self.panels {
            let a = p as f64 * width;
            scale += kronrod13(&f, a, a + width).abs();
        }
        let abs_tol = (self.tolerance * scale / self.panels as f64)
            .max(64.0 * f64::EPSILON * scale)
            .max(f64::MIN_POSITIVE);
        let mut total = 0.0;
        for p in 0..self.panels {
            let a = p as f64 * width;
            let b = a + width;
            let (fa, fb) = (f(a), f(b));
            let mut budget = self.max_evals;
            total += lobatto_step(&f, a, b, fa, fb, abs_tol, self.max_depth, &mut budget)?;
        }
        if !total.is_finite() {
            return Err(HestonError::Numerical("quadrature produced a non-finite value".into()));
        }
        Ok(total)
    }
}

const ALPHA: f64 = 0.816_496_580_927_726; // sqrt(2/3)
const BETA: f64 = 0.447_213_595_499_958; // 1/sqrt(5)

fn kronrod13<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    const X1: f64 = 0.942_882_415_695_480;
    const X2: f64 = 0.641_853_342_345_781;
    const X3: f64 = 0.236_383_199_662_150;
    let m = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let xs = [
        -1.0, -X1, -ALPHA, -X2, -BETA, -X3, 0.0, X3, BETA, X2, ALPHA, X1, 1.0,
    ];
    let ws = [
        0.015_827_191_973_480,
        0.094_273_840_218_850,
        0.155_071_987_336_585,
        0.188_821_573_960_182,
        0.199_773_405_226_859,
        0.224_926_465_333_340,
        0.242_611_071_901_408,
        0.224_926_465_333_340,
        0.199_773_405_226_859,
        0.188_821_573_960_182,
        0.155_071_987_336_585,
        0.094_273_840_218_850,
        0.015_827_191_973_480,
    ];
    h * xs
        .iter()
        .zip(ws.iter())
        .map(|(&x, &w)| w * f(m + h * x))
        .sum::<f64>()
}

#[allow(clippy::too_many_arguments)]
fn lobatto_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    tol: f64,
    depth: u32,
    budget: &mut usize,
) -> Result<f64> {
    let h = 0.5 * (b - a);
    let m = 0.5 * (a + b);
    let (mll, ml, mr, mrr) = (m - ALPHA * h, m - BETA * h, m + BETA * h, m + ALPHA * h);
    let (fmll, fml, fm, fmr, fmrr) = (f(mll), f(ml), f(m), f(mr), f(mrr));
    *budget = budget.saturating_sub(5);
    let i2 = h / 6.0 * (fa + fb + 5.0 * (fml + fmr));
    let i1 = h / 1470.0
        * (77.0 * (fa + fb) + 432.0 * (fmll + fmrr) + 625.0 * (fml + fmr) + 672.0 * fm);
    if (i1 - i2).abs() <= tol || mll <= a || b <= mrr {
        return Ok(i1);
    }
    if depth == 0 || *budget < 5 {
        return Err(HestonError::Numerical(format!(
            "quadrature did not converge on [{a}, {b}]"
        )));
    }
    let d = depth - 1;
    Ok(lobatto_step(f, a, mll, fa, fmll, tol, d, budget)?
        + lobatto_step(f, mll, ml, fmll, fml, tol, d, budget)?
        + lobatto_step(f, ml, m, fml, fm, tol, d, budget)?
        + lobatto_step(f, m, mr, fm, fmr, tol, d, budget)?
        + lobatto_step(f, mr, mrr, fmr, fmrr, tol, d, budget)?
        + lobatto_step(f, mrr, b, fmrr, fb, tol, d, budget)?)
}
