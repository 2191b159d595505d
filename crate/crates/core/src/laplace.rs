//! Conditional Laplace transforms `E[exp(-u I) | ...]` of the integrated variance.
//! Used only as distributional oracles.

use crate::distributions::ln_bessel_iv_scaled;
use crate::error::{non_negative, positive, HestonError, Result};
use crate::model::ModelParams;

/// `ln sinh(x)` for `x > 0` without overflow.
fn ln_sinh(x: f64) -> f64 {
    x + (-(-2.0 * x).exp_m1()).ln() - std::f64::consts::LN_2
}

struct Shift {
    /// Log of the common exponential factor in both transforms.
    ln_exp_factor: f64,
    /// `ln(phi(kappa_u) / phi(kappa))`.
    ln_phi_ratio: f64,
}

fn shift(u: f64, v0: f64, vt: f64, model: &ModelParams, h: f64) -> Result<Shift> {
    non_negative("u", u)?;
    positive("v0", v0)?;
    positive("vT", vt)?;
    positive("h", h)?;
    let xi2 = model.xi * model.xi;
    let kappa = model.kappa;
    let kappa_u = (kappa * kappa + 2.0 * xi2 * u).sqrt();
    let (x, xu) = (0.5 * kappa * h, 0.5 * kappa_u * h);
    if !xu.is_finite() || xu > 1e300 {
        return Err(HestonError::Domain(format!("kappa_u * h = {} overflows", 2.0 * xu)));
    }
    let coth = |y: f64| 1.0 / y.tanh();
    let diff = kappa_u * coth(xu) - kappa * coth(x);
    let ln_exp_factor = -(v0 + vt) / xi2 * diff;
    let ln_phi_ratio = (kappa_u / kappa).ln() - ln_sinh(xu) + ln_sinh(x);
    Ok(Shift {
        ln_exp_factor,
        ln_phi_ratio,
    })
}

/// Transform of `I | (v0, vT, mu)`.
pub fn cond_laplace_pois(
    u: f64,
    v0: f64,
    vt: f64,
    mu: u64,
    model: &ModelParams,
    h: f64,
) -> Result<f64> {
    if u == 0.0 {
        shift(u, v0, vt, model, h)?;
        return Ok(1.0);
    }
    let s = shift(u, v0, vt, model, h)?;
    let shape = 0.5 * model.delta() + 2.0 * mu as f64;
    Ok((s.ln_exp_factor + shape * s.ln_phi_ratio).exp())
}

/// Transform of `I | (v0, vT)`, with the Bessel ratio `I_nu(z_u) / I_nu(z)`.
pub fn cond_laplace_bk(u: f64, v0: f64, vt: f64, model: &ModelParams, h: f64) -> Result<f64> {
    if u == 0.0 {
        shift(u, v0, vt, model, h)?;
        return Ok(1.0);
    }
    let s = shift(u, v0, vt, model, h)?;
    let z = (v0 * vt).sqrt() * crate::model::phi(model.kappa, h, model.xi)?;
    let z_u = z * s.ln_phi_ratio.exp();
    let nu = model.nu();
    let ln_bessel = ln_bessel_iv_scaled(nu, z_u)? + z_u - ln_bessel_iv_scaled(nu, z)? - z;
    Ok((s.ln_exp_factor + s.ln_phi_ratio + ln_bessel).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cases::Case;
    use crate::distributions::BesselPmf;
    use crate::model::phi;
    use crate::moments::{iv_moments_bessel, iv_moments_pois};

    fn rel(a: f64, b: f64) -> f64 {
        (a / b - 1.0).abs()
    }

    #[test]
    fn unity_at_zero() {
        let m = Case::I.model();
        assert_eq!(cond_laplace_pois(0.0, 0.04, 0.05, 3, &m, 10.0).unwrap(), 1.0);
        assert_eq!(cond_laplace_bk(0.0, 0.04, 0.05, &m, 10.0).unwrap(), 1.0);
        assert!(cond_laplace_pois(-1.0, 0.04, 0.05, 3, &m, 10.0).is_err());
    }

    #[test]
    fn decreasing_and_log_convex() {
        let m = Case::II.model();
        let f = |u: f64| cond_laplace_pois(u, 0.04, 0.03, 2, &m, 3.0).unwrap().ln();
        let us: Vec<f64> = (0..40).map(|i| 0.25 * i as f64).collect();
        for w in us.windows(3) {
            let (a, b, c) = (f(w[0]), f(w[1]), f(w[2]));
            assert!(b < a && c < b);
            assert!(a + c - 2.0 * b >= -1e-12);
        }
    }

    #[test]
    fn derivatives_at_zero_match_pois_moments() {
        let m = Case::III.model();
        let (v0, vt, mu, h) = (0.0102, 0.019, 2, 1.0);
        let d = 1e-6;
        let l = |u: f64| cond_laplace_pois(u, v0, vt, mu, &m, h).unwrap();
        let mom = iv_moments_pois(v0, vt, mu, &m, h).unwrap();
        let first = -(l(d) - 1.0) / d;
        assert!(rel(first, mom.mean) < 1e-4, "{first} vs {}", mom.mean);
        let d2 = 1e-3;
        let second = (l(2.0 * d2) - 2.0 * l(d2) + 1.0) / (d2 * d2);
        let want = mom.mean * mom.mean + mom.variance;
        assert!(rel(second, want) < 1e-3, "{second} vs {want}");
    }

    #[test]
    fn derivative_at_zero_matches_bessel_moments() {
        let m = Case::IV.model();
        let (v0, vt, h) = (0.04, 0.2, 1.0);
        let d = 1e-6;
        let first = -(cond_laplace_bk(d, v0, vt, &m, h).unwrap() - 1.0) / d;
        let want = iv_moments_bessel(v0, vt, &m, h).unwrap().mean;
        assert!(rel(first, want) < 1e-4);
    }

    #[test]
    fn bessel_mixture_identity() {
        let m = Case::III.model();
        let h = 1.0;
        for (v0, vt) in [(0.0102f64, 0.019f64), (0.019, 0.019)] {
            let z = (v0 * vt).sqrt() * phi(m.kappa, h, m.xi).unwrap();
            let pmf = BesselPmf::new(m.nu(), z).unwrap();
            for u in [0.5, 1.0, 2.0, 5.0] {
                let mix: f64 = pmf
                    .iter()
                    .map(|(j, p)| p * cond_laplace_pois(u, v0, vt, j, &m, h).unwrap())
                    .sum();
                let bk = cond_laplace_bk(u, v0, vt, &m, h).unwrap();
                assert!(rel(mix, bk) < 1e-10, "u={u}: {mix} vs {bk}");
            }
        }
    }

    #[test]
    fn huge_argument_is_domain_error() {
        let m = Case::I.model();
        assert!(cond_laplace_pois(f64::INFINITY, 0.04, 0.04, 0, &m, 1.0).is_err());
    }
}
