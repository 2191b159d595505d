use crate::error::{HestonError, Result};
use crate::rng::RngStream;

/// Rates below this use sequential-search inversion; above it PTRS.
const INVERSION_LIMIT: f64 = 10.0;

/// Draw a Poisson variate with the given rate.
///
/// Sequential-search inversion for small rates and Hörmann's transformed
/// rejection with squeeze (PTRS) for large ones, so cost stays O(1) as the
/// rate grows.
pub fn sample_poisson(rate: f64, rng: &mut RngStream) -> Result<u64> {
    if !(rate >= 0.0 && rate.is_finite()) {
        return Err(HestonError::InvalidParameter {
            name: "rate",
            value: rate,
            reason: "Poisson rate must be non-negative and finite",
        });
    }
    Ok(poisson_unchecked(rate, rng))
}

#[inline]
pub(crate) fn poisson_unchecked(rate: f64, rng: &mut RngStream) -> u64 {
    if rate == 0.0 {
        0
    } else if rate < INVERSION_LIMIT {
        poisson_inversion(rate, rng)
    } else {
        poisson_ptrs(rate, rng)
    }
}

fn poisson_inversion(rate: f64, rng: &mut RngStream) -> u64 {
    let u = rng.uniform();
    let mut k = 0u64;
    let mut p = (-rate).exp();
    let mut cdf = p;
    while u > cdf {
        k += 1;
        p *= rate / k as f64;
        let next = cdf + p;
        // cdf stopped moving: the remaining mass is below rounding.
        if next == cdf {
            break;
        }
        cdf = next;
    }
    k
}

fn poisson_ptrs(rate: f64, rng: &mut RngStream) -> u64 {
    let log_rate = rate.ln();
    let b = 0.931 + 2.53 * rate.sqrt();
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let v_r = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u = rng.uniform() - 0.5;
        let v = rng.uniform();
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + rate + 0.43).floor();
        if us >= 0.07 && v <= v_r {
            return k as u64;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        let lhs = v.ln() + inv_alpha.ln() - (a / (us * us) + b).ln();
        let rhs = -rate + k * log_rate - libm::lgamma(k + 1.0);
        if lhs <= rhs {
            return k as u64;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn moments(rate: f64, n: usize, seed: u64) -> (f64, f64) {
        let mut rng = RngStream::from_seed(seed);
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let x = sample_poisson(rate, &mut rng).unwrap() as f64;
            s += x;
            s2 += x * x;
        }
        let m = s / n as f64;
        (m, s2 / n as f64 - m * m)
    }

    #[test]
    fn zero_rate_is_zero() {
        let mut rng = RngStream::from_seed(3);
        for _ in 0..1000 {
            assert_eq!(sample_poisson(0.0, &mut rng).unwrap(), 0);
        }
    }

    #[test]
    fn rejects_bad_rates() {
        let mut rng = RngStream::from_seed(3);
        assert!(sample_poisson(-1.0, &mut rng).is_err());
        assert!(sample_poisson(f64::NAN, &mut rng).is_err());
        assert!(sample_poisson(f64::INFINITY, &mut rng).is_err());
    }

    #[test]
    fn small_rate_moments() {
        let (m, v) = moments(4.0, 1_000_000, 11);
        assert!((m - 4.0).abs() < 0.01, "mean {m}");
        assert!((v - 4.0).abs() < 0.05, "var {v}");
    }

    #[test]
    fn ptrs_branch_moments() {
        // Standard error of the mean is sqrt(25/1e6) = 0.005.
        let (m, v) = moments(25.0, 1_000_000, 12);
        assert!((m - 25.0).abs() < 0.02, "mean {m}");
        assert!((v - 25.0).abs() < 0.3, "var {v}");
    }

    #[test]
    fn huge_rate_mean() {
        let (m, _) = moments(1e6, 10_000, 13);
        assert!((m - 1e6).abs() < 500.0, "mean {m}");
    }

    #[test]
    fn pmf_matches_at_rate_between_branches() {
        // Compare empirical frequencies against the exact pmf at rate 9.5 and 10.5.
        for (rate, seed) in [(9.5, 21), (10.5, 22)] {
            let n = 400_000;
            let mut counts = vec![0usize; 40];
            let mut rng = RngStream::from_seed(seed);
            for _ in 0..n {
                let k = sample_poisson(rate, &mut rng).unwrap() as usize;
                if k < counts.len() {
                    counts[k] += 1;
                }
            }
            for (k, &c) in counts.iter().enumerate().take(25) {
                let p = (-rate + k as f64 * f64::ln(rate) - libm::lgamma(k as f64 + 1.0)).exp();
                let sd = (p * (1.0 - p) / n as f64).sqrt();
                let freq = c as f64 / n as f64;
                assert!((freq - p).abs() < 5.0 * sd + 1e-6, "rate {rate} k {k}: {freq} vs {p}");
            }
        }
    }
}
