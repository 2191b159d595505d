//! Conditional moments of the integrated variance `I = int_0^h V_s ds`
//! given the step endpoints, under Bessel and Poisson conditioning.

use crate::distributions::bessel_rv_moments;
use crate::error::{non_negative, positive, Result};
use crate::model::{phi, ModelParams};
use crate::series::{series_coeffs, SeriesCoeffs, SeriesTails};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IvMoments {
    pub mean: f64,
    pub variance: f64,
}

impl SeriesCoeffs {
    /// Moments of `I | (v0 + vT = v_sum, mu)`: `X + Z_{delta/2 + 2 mu}`.
    #[inline]
    pub fn pois_moments(&self, v_sum: f64, shape: f64) -> IvMoments {
        IvMoments {
            mean: v_sum * self.x_mean() + shape * self.z_mean(),
            variance: v_sum * self.x_var() + shape * self.z_var(),
        }
    }
}

impl SeriesTails {
    /// Moments of the part of `X + Z_shape` left after the first `K` terms.
    #[inline]
    pub fn moments(&self, v_sum: f64, shape: f64) -> IvMoments {
        IvMoments {
            mean: v_sum * self.x_mean + shape * self.z_mean,
            variance: v_sum * self.x_var + shape * self.z_var,
        }
    }
}

fn check_endpoints(v0: f64, vt: f64, h: f64) -> Result<()> {
    positive("v0", v0)?;
    positive("vT", vt)?;
    positive("h", h)?;
    Ok(())
}

/// Moments of `I | (v0, vT)` with the Bessel variate `eta ~ BES(nu, z)` integrated out.
pub fn iv_moments_bessel(v0: f64, vt: f64, model: &ModelParams, h: f64) -> Result<IvMoments> {
    check_endpoints(v0, vt, h)?;
    let c = series_coeffs(model, h)?;
    let z = (v0 * vt).sqrt() * phi(model.kappa, h, model.xi)?;
    let (e_eta, var_eta) = bessel_rv_moments(model.nu(), z)?;
    let base = c.pois_moments(v0 + vt, 0.5 * model.delta());
    let z2_mean = 2.0 * c.z_mean();
    let z2_var = 2.0 * c.z_var();
    Ok(IvMoments {
        mean: base.mean + e_eta * z2_mean,
        variance: base.variance + e_eta * z2_var + var_eta * z2_mean * z2_mean,
    })
}

/// Moments of `I | (v0, vT, mu)`; no Bessel function involved.
pub fn iv_moments_pois(
    v0: f64,
    vt: f64,
    mu: u64,
    model: &ModelParams,
    h: f64,
) -> Result<IvMoments> {
    check_endpoints(v0, vt, h)?;
    let c = series_coeffs(model, h)?;
    Ok(c.pois_moments(v0 + vt, 0.5 * model.delta() + 2.0 * mu as f64))
}

/// Moments of `I | (v0, vT, mu)` after removing the first `K` series terms.
pub fn iv_moments_truncated(
    k: u64,
    v0: f64,
    vt: f64,
    mu: u64,
    model: &ModelParams,
    h: f64,
) -> Result<IvMoments> {
    check_endpoints(v0, vt, h)?;
    let c = series_coeffs(model, h)?;
    let shape = 0.5 * model.delta() + 2.0 * mu as f64;
    if k == 0 {
        return Ok(c.pois_moments(v0 + vt, shape));
    }
    let m = c.tails(k)?.moments(v0 + vt, shape);
    non_negative("truncated mean", m.mean)?;
    non_negative("truncated variance", m.variance)?;
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cases::Case;
    use crate::distributions::BesselPmf;

    fn rel(a: f64, b: f64) -> f64 {
        (a / b - 1.0).abs()
    }

    #[test]
    fn pois_moments_at_zero_count() {
        let m = Case::II.model();
        let h = 1.5;
        let c = series_coeffs(&m, h).unwrap();
        let got = iv_moments_pois(0.03, 0.03, 0, &m, h).unwrap();
        let want = 2.0 * 0.03 * c.m_x * h + 0.5 * m.delta() * c.m_z * (m.xi * h).powi(2);
        assert!(rel(got.mean, want) < 1e-15);
    }

    #[test]
    fn pois_moments_increase_with_count() {
        let m = Case::III.model();
        let mut prev = iv_moments_pois(0.01, 0.02, 0, &m, 1.0).unwrap();
        for mu in 1..20 {
            let cur = iv_moments_pois(0.01, 0.02, mu, &m, 1.0).unwrap();
            assert!(cur.mean > prev.mean && cur.variance > prev.variance);
            prev = cur;
        }
    }

    #[test]
    fn bessel_mixture_of_pois_moments() {
        for case in Case::ALL {
            let m = case.model();
            let h = case.maturity();
            for (v0, vt) in [(m.v0, m.theta), (m.theta, 0.5 * m.theta), (0.1, 0.07)] {
                let z = (v0 * vt).sqrt() * phi(m.kappa, h, m.xi).unwrap();
                let pmf = BesselPmf::new(m.nu(), z).unwrap();
                let mut mean = 0.0;
                for (j, p) in pmf.iter() {
                    mean += p * iv_moments_pois(v0, vt, j, &m, h).unwrap().mean;
                }
                let want = iv_moments_bessel(v0, vt, &m, h).unwrap().mean;
                assert!(rel(mean, want) < 1e-10, "{case:?} {mean} vs {want}");
            }
        }
    }

    #[test]
    fn bessel_variance_by_total_law() {
        let m = Case::III.model();
        let (v0, vt, h) = (0.0102f64, 0.019f64, 1.0);
        let z = (v0 * vt).sqrt() * phi(m.kappa, h, m.xi).unwrap();
        let pmf = BesselPmf::new(m.nu(), z).unwrap();
        let (mut e1, mut e2, mut ev) = (0.0, 0.0, 0.0);
        for (j, p) in pmf.iter() {
            let mj = iv_moments_pois(v0, vt, j, &m, h).unwrap();
            e1 += p * mj.mean;
            e2 += p * mj.mean * mj.mean;
            ev += p * mj.variance;
        }
        let want = iv_moments_bessel(v0, vt, &m, h).unwrap().variance;
        assert!(rel(ev + e2 - e1 * e1, want) < 1e-9);
    }

    #[test]
    fn small_step_mean_tends_to_trapezoid() {
        let m = Case::III.model();
        let v = 0.019;
        for h in [1e-2, 1e-3] {
            let got = iv_moments_bessel(v, v, &m, h).unwrap().mean;
            assert!(((got - v * h) / (v * h)).abs() < 10.0 * h, "h={h}");
        }
    }

    #[test]
    fn truncation_is_additive() {
        let m = Case::I.model();
        let (v0, vt, mu, h) = (0.04, 0.03, 3u64, 2.5);
        let c = series_coeffs(&m, h).unwrap();
        let full = iv_moments_pois(v0, vt, mu, &m, h).unwrap();
        assert_eq!(iv_moments_truncated(0, v0, vt, mu, &m, h).unwrap(), full);
        for k in [1u64, 4, 16] {
            let tr = iv_moments_truncated(k, v0, vt, mu, &m, h).unwrap();
            let head: f64 = (1..=k)
                .map(|j| {
                    ((v0 + vt) * c.lambda_k(j) + 0.5 * m.delta() + 2.0 * mu as f64) / c.gamma_k(j)
                })
                .sum();
            assert!(rel(tr.mean + head, full.mean) < 1e-12);
        }
        let far = iv_moments_truncated(100_000, v0, vt, mu, &m, h).unwrap();
        assert!(far.mean / full.mean < 1e-4);
    }
}
