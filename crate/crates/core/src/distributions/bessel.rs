//! Modified Bessel function of the first kind `I_nu(z)` for `nu > -1`, `z >= 0`,
//! and the Bessel random variable BES(nu, z) whose pmf is the normalized
//! series coefficients of `I_nu(z)`.

use crate::error::{HestonError, Result};
use crate::rng::RngStream;

/// Arguments at or above this use the large-z asymptotic expansion.
pub const ASYMPTOTIC_THRESHOLD: f64 = 50.0;

const SERIES_REL_TOL: f64 = 1e-17;

fn check_order(nu: f64) -> Result<()> {
    if nu > -1.0 && nu.is_finite() {
        Ok(())
    } else {
        Err(HestonError::InvalidParameter {
            name: "nu",
            value: nu,
            reason: "Bessel order must exceed -1",
        })
    }
}

fn check_arg(z: f64) -> Result<()> {
    if z >= 0.0 && z.is_finite() {
        Ok(())
    } else {
        Err(HestonError::InvalidParameter {
            name: "z",
            value: z,
            reason: "Bessel argument must be non-negative and finite",
        })
    }
}

/// `I_nu(z)`.
pub fn bessel_iv(nu: f64, z: f64) -> Result<f64> {
    check_order(nu)?;
    check_arg(z)?;
    if z == 0.0 {
        return zero_arg(nu);
    }
    let v = (ln_iv_scaled_unchecked(nu, z) + z).exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(HestonError::Domain(format!("I_{nu}({z}) overflows f64")))
    }
}

fn zero_arg(nu: f64) -> Result<f64> {
    if nu == 0.0 {
        Ok(1.0)
    } else if nu > 0.0 {
        Ok(0.0)
    } else {
        Err(HestonError::Domain(format!(
            "I_{nu}(0) is infinite for negative order"
        )))
    }
}

/// `ln(e^{-z} I_nu(z))`, finite for all `z > 0`.
pub fn ln_bessel_iv_scaled(nu: f64, z: f64) -> Result<f64> {
    check_order(nu)?;
    check_arg(z)?;
    if z == 0.0 {
        return zero_arg(nu).map(f64::ln);
    }
    Ok(ln_iv_scaled_unchecked(nu, z))
}

#[inline]
pub(crate) fn ln_iv_scaled_unchecked(nu: f64, z: f64) -> f64 {
    if z >= ASYMPTOTIC_THRESHOLD {
        if let Some(v) = ln_iv_scaled_asymptotic(nu, z) {
            return v;
        }
    }
    ln_iv_scaled_series(nu, z)
}

/// Power series summed in scaled form: all terms are positive, so the only
/// loss is accumulated rounding.
pub(crate) fn ln_iv_scaled_series(nu: f64, z: f64) -> f64 {
    let half = 0.5 * z;
    let q = half * half;
    let ln_first = nu * half.ln() - libm::lgamma(nu + 1.0);
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut ln_scale = 0.0;
    let mut k = 0.0;
    loop {
        term *= q / ((k + 1.0) * (k + nu + 1.0));
        k += 1.0;
        sum += term;
        if sum > 1e250 {
            sum *= 1e-250;
            term *= 1e-250;
            ln_scale += 250.0 * std::f64::consts::LN_10;
        }
        // Past the peak the ratio is below one, so the tail is bounded by a geometric series.
        if k * (k + nu) > q && term < SERIES_REL_TOL * sum {
            break;
        }
    }
    ln_first + sum.ln() + ln_scale - z
}

/// Hankel expansion `e^z / sqrt(2 pi z) * sum_k (-1)^k a_k(nu) / z^k`.
/// Returns `None` when the terms start growing before reaching full precision.
pub(crate) fn ln_iv_scaled_asymptotic(nu: f64, z: f64) -> Option<f64> {
    let mu4 = 4.0 * nu * nu;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut k = 1.0;
    loop {
        let odd = 2.0 * k - 1.0;
        let next = -term * (mu4 - odd * odd) / (8.0 * k * z);
        if next == 0.0 {
            break;
        }
        if next.abs() > term.abs() {
            return None;
        }
        sum += next;
        term = next;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
        k += 1.0;
        if k > 200.0 {
            return None;
        }
    }
    if sum <= 0.0 {
        return None;
    }
    Some(sum.ln() - 0.5 * (2.0 * std::f64::consts::PI * z).ln())
}

/// Mean and variance of BES(nu, z):
/// `E = z I_{nu+1} / (2 I_nu)`, `Var = z^2 I_{nu+2} / (4 I_nu) + E - E^2`.
pub fn bessel_rv_moments(nu: f64, z: f64) -> Result<(f64, f64)> {
    check_order(nu)?;
    check_arg(z)?;
    if z == 0.0 {
        return Ok((0.0, 0.0));
    }
    Ok(bessel_rv_moments_unchecked(nu, z))
}

#[inline]
pub(crate) fn bessel_rv_moments_unchecked(nu: f64, z: f64) -> (f64, f64) {
    let l0 = ln_iv_scaled_unchecked(nu, z);
    let l1 = ln_iv_scaled_unchecked(nu + 1.0, z);
    let l2 = ln_iv_scaled_unchecked(nu + 2.0, z);
    let mean = 0.5 * z * (l1 - l0).exp();
    let var = 0.25 * z * z * (l2 - l0).exp() + mean - mean * mean;
    (mean, var.max(0.0))
}

/// Mode of BES(nu, z), `floor((sqrt(nu^2 + z^2) - nu) / 2)`.
#[inline]
fn bessel_mode(nu: f64, z: f64) -> u64 {
    (((nu * nu + z * z).sqrt() - nu) * 0.5).floor().max(0.0) as u64
}

#[inline]
fn ln_bessel_pmf_at(j: u64, nu: f64, z: f64, ln_iv: f64) -> f64 {
    let j = j as f64;
    (2.0 * j + nu) * (0.5 * z).ln() - libm::lgamma(j + 1.0) - libm::lgamma(j + nu + 1.0) - ln_iv
}

/// Normalized probability mass function of BES(nu, z), truncated where terms
/// fall below `1e-18` of the mode probability on both sides.
#[derive(Debug, Clone)]
pub struct BesselPmf {
    probs: Vec<f64>,
}

impl BesselPmf {
    pub fn new(nu: f64, z: f64) -> Result<Self> {
        check_order(nu)?;
        if !(z > 0.0 && z.is_finite()) {
            return Err(HestonError::InvalidParameter {
                name: "z",
                value: z,
                reason: "Bessel variate needs a positive argument",
            });
        }
        let ln_iv = ln_iv_scaled_unchecked(nu, z) + z;
        let mode = bessel_mode(nu, z);
        let p_mode = ln_bessel_pmf_at(mode, nu, z, ln_iv).exp();
        let q = 0.25 * z * z;

        let mut below = Vec::new();
        let mut p = p_mode;
        let mut j = mode;
        while j > 0 {
            p *= (j as f64) * (j as f64 + nu) / q;
            j -= 1;
            if p < 1e-18 * p_mode {
                break;
            }
            below.push(p);
        }
        let first = mode as usize - below.len();
        let mut probs = vec![0.0; first];
        probs.extend(below.into_iter().rev());
        probs.push(p_mode);

        let mut p = p_mode;
        let mut j = mode as f64;
        loop {
            p *= q / ((j + 1.0) * (j + nu + 1.0));
            j += 1.0;
            if p < 1e-18 * p_mode {
                break;
            }
            probs.push(p);
        }
        Ok(Self { probs })
    }

    /// `P(eta = j)`, zero beyond the truncation.
    pub fn prob(&self, j: usize) -> f64 {
        self.probs.get(j).copied().unwrap_or(0.0)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.probs.iter().enumerate().map(|(j, &p)| (j as u64, p))
    }
}

/// Draw from BES(nu, z) by inversion starting at the mode and walking outward,
/// always consuming the more probable neighbour first.
pub fn sample_bessel_rv(nu: f64, z: f64, rng: &mut RngStream) -> Result<u64> {
    check_order(nu)?;
    if !(z > 0.0 && z.is_finite()) {
        return Err(HestonError::InvalidParameter {
            name: "z",
            value: z,
            reason: "Bessel variate needs a positive argument",
        });
    }
    Ok(bessel_rv_unchecked(nu, z, rng))
}

pub(crate) fn bessel_rv_unchecked(nu: f64, z: f64, rng: &mut RngStream) -> u64 {
    let ln_iv = ln_iv_scaled_unchecked(nu, z) + z;
    let mode = bessel_mode(nu, z);
    let p_mode = ln_bessel_pmf_at(mode, nu, z, ln_iv).exp();
    let q = 0.25 * z * z;

    let mut u = rng.uniform() - p_mode;
    if u <= 0.0 {
        return mode;
    }
    let (mut up, mut p_up) = (mode, p_mode);
    let (mut down, mut p_down) = (mode, p_mode);
    loop {
        let next_up = p_up * q / ((up as f64 + 1.0) * (up as f64 + nu + 1.0));
        let next_down = if down > 0 {
            p_down * (down as f64) * (down as f64 + nu) / q
        } else {
            0.0
        };
        if next_up <= 0.0 && next_down <= 0.0 {
            // Remaining mass is below rounding; u > 0 only through accumulated error.
            return mode;
        }
        if next_up >= next_down {
            up += 1;
            p_up = next_up;
            u -= p_up;
            if u <= 0.0 {
                return up;
            }
        } else {
            down -= 1;
            p_down = next_down;
            u -= p_down;
            if u <= 0.0 {
                return down;
            }
        }
        if next_up < 1e-300 && next_down < 1e-300 {
            return mode;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn zero_argument() {
        assert_eq!(bessel_iv(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_iv(0.5, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_iv(2.3, 0.0).unwrap(), 0.0);
        assert!(bessel_iv(-0.5, 0.0).is_err());
    }

    #[test]
    fn rejects_bad_order() {
        assert!(bessel_iv(-1.0, 1.0).is_err());
        assert!(bessel_iv(-1.5, 1.0).is_err());
        assert!(bessel_iv(0.5, -1.0).is_err());
    }

    #[test]
    fn half_integer_closed_forms() {
        for &z in &[0.01, 0.5, 1.0, 7.0, 30.0, 49.9, 50.0, 120.0, 600.0] {
            let pref = (2.0 / (PI * z)).sqrt();
            let minus = bessel_iv(-0.5, z).unwrap();
            let plus = bessel_iv(0.5, z).unwrap();
            assert!(rel(minus, pref * z.cosh()) < 1e-12, "I_-1/2({z})");
            assert!(rel(plus, pref * z.sinh()) < 1e-12, "I_1/2({z})");
            let three_half = pref * (z.cosh() - z.sinh() / z);
            if z > 0.1 {
                assert!(rel(bessel_iv(1.5, z).unwrap(), three_half) < 1e-11, "I_3/2({z})");
            }
        }
        assert!((bessel_iv(-0.5, 1.0).unwrap() - 1.2312).abs() < 1e-4);
    }

    #[test]
    fn integer_order_reference_values() {
        // Abramowitz & Stegun table 9.8 values.
        assert!(rel(bessel_iv(0.0, 1.0).unwrap(), 1.266_065_877_752_008_4) < 1e-14);
        assert!(rel(bessel_iv(1.0, 1.0).unwrap(), 0.565_159_103_992_485_0) < 1e-14);
        assert!(rel(bessel_iv(0.0, 10.0).unwrap(), 2_815.716_628_466_254) < 1e-13);
    }

    #[test]
    fn asymptotic_leading_terms_at_500() {
        let nu = 0.5f64;
        let z = 500.0f64;
        let ln_scaled = ln_bessel_iv_scaled(nu, z).unwrap();
        let approx = -(2.0 * PI * z).ln() * 0.5 + (1.0 - (4.0 * nu * nu - 1.0) / (8.0 * z)).ln();
        assert!((ln_scaled.exp() / approx.exp() - 1.0).abs() < 1e-4);
    }

    #[test]
    fn branches_agree_on_overlap() {
        for &nu in &[-0.9, -0.3, 0.0, 0.37, 1.0, 2.5] {
            let mut z = 50.0;
            while z <= 400.0 {
                let series = ln_iv_scaled_series(nu, z);
                let asym = ln_iv_scaled_asymptotic(nu, z).unwrap();
                assert!(
                    (series.exp() / asym.exp() - 1.0).abs() < 1e-8,
                    "nu {nu} z {z}: {series} vs {asym}"
                );
                z += 17.5;
            }
        }
    }

    #[test]
    fn large_argument_is_finite_in_log_space() {
        let v = ln_bessel_iv_scaled(0.3, 1e4).unwrap();
        assert!(v.is_finite());
        assert!(bessel_iv(0.3, 1e4).is_err());
    }

    #[test]
    fn pmf_normalizes() {
        for &(nu, z) in &[(-0.9, 0.01), (-0.5, 1.0), (0.0, 3.0), (1.0, 25.0), (0.37, 400.0)] {
            let pmf = BesselPmf::new(nu, z).unwrap();
            let total: f64 = pmf.probs().iter().sum();
            assert!((total - 1.0).abs() < 1e-12, "nu {nu} z {z}: {total}");
            let (m, v) = bessel_rv_moments(nu, z).unwrap();
            let pm: f64 = pmf.iter().map(|(j, p)| j as f64 * p).sum();
            let pv: f64 = pmf.iter().map(|(j, p)| (j as f64 - pm).powi(2) * p).sum();
            assert!(rel(pm, m) < 1e-10, "mean {pm} vs {m}");
            if v > 1e-8 {
                assert!(rel(pv, v) < 1e-8, "var {pv} vs {v}");
            }
        }
    }

    #[test]
    fn sampler_matches_pmf_moments() {
        let (nu, z) = (0.4, 6.0);
        let (m, v) = bessel_rv_moments(nu, z).unwrap();
        let n = 400_000;
        let mut rng = RngStream::from_seed(99);
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let x = sample_bessel_rv(nu, z, &mut rng).unwrap() as f64;
            s += x;
            s2 += x * x;
        }
        let em = s / n as f64;
        let ev = s2 / n as f64 - em * em;
        assert!((em - m).abs() < 4.0 * (v / n as f64).sqrt(), "{em} vs {m}");
        assert!((ev / v - 1.0).abs() < 0.02, "{ev} vs {v}");
    }
}
