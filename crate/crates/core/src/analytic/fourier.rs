use std::f64::consts::PI;

use num_complex::Complex64;

use crate::analytic::charfn::heston_charfn;
use crate::analytic::quadrature::QuadratureSpec;
use crate::error::{positive, HestonError, Result};
use crate::model::ModelParams;

/// European call from any characteristic function of `ln(S_T / S_0)`
/// via the single-integral form on the line `Im u = -1/2`:
/// `C = e^{-rT} [F - sqrt(F X)/pi int_0^inf Re(e^{i u x} phi_F(u - i/2)) / (u^2 + 1/4) du]`
/// with `x = ln(F/X)` and `phi_F` the characteristic function of `ln(S_T / F)`.
#[allow(clippy::too_many_arguments)]
pub fn price_call_fourier<C>(
    charfn: C,
    s0: f64,
    r: f64,
    q: f64,
    t: f64,
    strike: f64,
    quad: &QuadratureSpec,
) -> Result<f64>
where
    C: Fn(Complex64) -> Result<Complex64>,
{
    positive("T", t)?;
    positive("strike", strike)?;
    let drift = (r - q) * t;
    let fwd = s0 * drift.exp();
    let x = (fwd / strike).ln();
    let err = std::cell::RefCell::new(None);
    let integrand = |u: f64| {
        let w = Complex64::new(u, -0.5);
        match charfn(w) {
            Ok(phi) => {
                let phi_f = phi * (-Complex64::i() * w * drift).exp();
                ((Complex64::i() * u * x).exp() * phi_f).re / (u * u + 0.25)
            }
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };
    let integral = quad.integrate(integrand)?;
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    let price = (-r * t).exp() * (fwd - (fwd * strike).sqrt() / PI * integral);
    if !price.is_finite() {
        return Err(HestonError::Numerical(format!("non-finite call price {price}")));
    }
    Ok(price)
}

/// Heston call price by Fourier integration with the default quadrature.
pub fn price_european_exact(model: &ModelParams, t: f64, strike: f64) -> Result<f64> {
    price_european_exact_with(model, t, strike, &QuadratureSpec::default())
}

pub fn price_european_exact_with(
    model: &ModelParams,
    t: f64,
    strike: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    model.validate()?;
    price_call_fourier(
        |u| heston_charfn(u, model, t),
        model.s0,
        model.r,
        model.q,
        t,
        strike,
        quad,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::black::bs_call_undiscounted;
    use crate::cases::Case;

    #[test]
    fn reference_prices() {
        for case in Case::ALL {
            let p = price_european_exact(&case.model(), case.maturity(), case.strike()).unwrap();
            assert!(
                (p - case.reference_price()).abs() < 1e-6,
                "{case:?}: {p:.10} vs {}",
                case.reference_price()
            );
        }
    }

    #[test]
    fn stable_under_refinement() {
        for case in Case::ALL {
            let m = case.model();
            let spec = QuadratureSpec::default();
            let a = price_european_exact_with(&m, case.maturity(), case.strike(), &spec).unwrap();
            let b = price_european_exact_with(&m, case.maturity(), case.strike(), &spec.refined())
                .unwrap();
            assert!((a - b).abs() < 1e-8, "{case:?}: {a} vs {b}");
        }
    }

    #[test]
    fn monotone_and_convex_in_strike() {
        for case in Case::ALL {
            let m = case.model();
            let t = case.maturity();
            let ks: Vec<f64> = (0..25).map(|i| 60.0 + 5.0 * i as f64).collect();
            let ps: Vec<f64> = ks
                .iter()
                .map(|&k| price_european_exact(&m, t, k).unwrap())
                .collect();
            for w in ps.windows(3) {
                assert!(w[1] < w[0] && w[2] < w[1]);
                assert!(w[0] + w[2] - 2.0 * w[1] > -1e-9);
            }
        }
    }

    #[test]
    fn constant_variance_reduces_to_black() {
        // Small xi, no correlation, v0 = theta: price moves from Black by O(xi^2).
        let m = ModelParams::new(100.0, 0.04, 2.0, 0.04, 1e-3, 0.0, 0.02, 0.01).unwrap();
        let t = 2.0;
        let p = price_european_exact(&m, t, 95.0).unwrap();
        let want = (-m.r * t).exp() * bs_call_undiscounted(m.forward(t), 0.2, t, 95.0);
        assert!((p - want).abs() < 1e-5, "{p} vs {want}");
    }
}
