use crate::error::{positive, Result};
use crate::rng::RngStream;

/// Draw IG(mu, lambda) with mean `mu` and variance `mu^3 / lambda`
/// (Michael, Schucany and Haas transformation with one normal and one uniform).
pub fn sample_invgauss(mu: f64, lambda: f64, rng: &mut RngStream) -> Result<f64> {
    positive("mu", mu)?;
    positive("lambda", lambda)?;
    Ok(invgauss_unchecked(mu, lambda, rng))
}

#[inline]
pub(crate) fn invgauss_unchecked(mu: f64, lambda: f64, rng: &mut RngStream) -> f64 {
    let n = rng.normal();
    let y = mu * n * n;
    // Smaller root mu + mu/(2 lambda) * (y - disc), rewritten without cancellation.
    let disc = (4.0 * lambda * y + y * y).sqrt();
    let x = if y == 0.0 {
        mu
    } else {
        let s = disc + y;
        (mu * 4.0 * lambda * y / (s * s)).max(f64::MIN_POSITIVE)
    };
    if rng.uniform() * (mu + x) <= mu {
        x
    } else {
        mu * mu / x
    }
}

/// Draw a variate with the given mean and variance from a moment-matched
/// inverse Gaussian. A vanishing variance (or overflowing shape) degenerates
/// to the mean.
#[inline]
pub(crate) fn invgauss_by_moments(mean: f64, var: f64, rng: &mut RngStream) -> f64 {
    if mean <= 0.0 {
        return 0.0;
    }
    if var < 1e-300 {
        return mean;
    }
    let lambda = mean * mean * mean / var;
    if !lambda.is_finite() {
        return mean;
    }
    invgauss_unchecked(mean, lambda, rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn moments(mu: f64, lambda: f64, n: usize, seed: u64) -> (f64, f64) {
        let mut rng = RngStream::from_seed(seed);
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let x = sample_invgauss(mu, lambda, &mut rng).unwrap();
            assert!(x > 0.0);
            s += x;
            s2 += x * x;
        }
        let m = s / n as f64;
        (m, s2 / n as f64 - m * m)
    }

    #[test]
    fn unit_moments() {
        let (m, v) = moments(1.0, 1.0, 1_000_000, 31);
        assert!((m - 1.0).abs() < 0.005, "mean {m}");
        assert!((v - 1.0).abs() < 0.02, "var {v}");
    }

    #[test]
    fn concentrated_variance() {
        let (_, v) = moments(0.5, 8.0, 1_000_000, 32);
        let exact = 0.5f64.powi(3) / 8.0;
        assert!((v / exact - 1.0).abs() < 0.05, "var {v} vs {exact}");
    }

    #[test]
    fn huge_lambda_collapses_to_mean() {
        let mu = 0.7;
        let (m, v) = moments(mu, 1e6 * mu * mu * mu, 100_000, 33);
        assert!(v.sqrt() < mu / 100.0, "sd {}", v.sqrt());
        assert!((m - mu).abs() < 1e-3);
    }

    #[test]
    fn rejects_non_positive() {
        let mut rng = RngStream::from_seed(1);
        assert!(sample_invgauss(0.0, 1.0, &mut rng).is_err());
        assert!(sample_invgauss(1.0, -1.0, &mut rng).is_err());
    }

    #[test]
    fn degenerate_moments_return_mean() {
        let mut rng = RngStream::from_seed(1);
        assert_eq!(invgauss_by_moments(0.3, 0.0, &mut rng), 0.3);
        assert_eq!(invgauss_by_moments(0.3, 1e-320, &mut rng), 0.3);
    }
}
