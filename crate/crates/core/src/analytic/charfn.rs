use num_complex::Complex64;

use crate::error::{positive, HestonError, Result};
use crate::model::ModelParams;

/// Characteristic function `E[exp(i u ln(S_T / S_0))]` for complex `u`.
///
/// Uses the `g = (b - d)/(b + d)` form, whose logarithm does not wrap
/// around the branch cut for long maturities.
pub fn heston_charfn(u: Complex64, model: &ModelParams, t: f64) -> Result<Complex64> {
    positive("T", t)?;
    let i = Complex64::i();
    let xi2 = model.xi * model.xi;
    let iu = i * u;
    let b = model.kappa - model.rho * model.xi * iu;
    let d = (b * b + xi2 * (iu + u * u)).sqrt();
    let bmd = b - d;
    let g = bmd / (b + d);
    let edt = (-d * t).exp();
    let one_minus_ge = 1.0 - g * edt;
    let c = model.kappa * model.theta / xi2 * (bmd * t - 2.0 * (one_minus_ge / (1.0 - g)).ln());
    let dd = bmd / xi2 * (1.0 - edt) / one_minus_ge;
    let val = (iu * (model.r - model.q) * t + c + dd * model.v0).exp();
    if !(val.re.is_finite() && val.im.is_finite()) {
        return Err(HestonError::Domain(format!(
            "characteristic function overflows at u = {u}, T = {t}"
        )));
    }
    Ok(val)
}
