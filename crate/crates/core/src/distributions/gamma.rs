use crate::error::{HestonError, Result};
use crate::rng::RngStream;

/// Draw a unit-scale gamma variate with the given shape.
///
/// Marsaglia–Tsang squeeze/rejection for shape >= 1; smaller shapes use
/// `Gamma(shape) = Gamma(shape + 1) * U^(1/shape)`.
pub fn sample_std_gamma(shape: f64, rng: &mut RngStream) -> Result<f64> {
    if !(shape > 0.0 && shape.is_finite()) {
        return Err(HestonError::InvalidParameter {
            name: "shape",
            value: shape,
            reason: "gamma shape must be positive and finite",
        });
    }
    Ok(std_gamma_unchecked(shape, rng))
}

#[inline]
pub(crate) fn std_gamma_unchecked(shape: f64, rng: &mut RngStream) -> f64 {
    if shape >= 1.0 {
        marsaglia_tsang(shape, rng)
    } else {
        let g = marsaglia_tsang(shape + 1.0, rng);
        let boost = (rng.uniform().ln() / shape).exp();
        // U^(1/shape) underflows for tiny shapes; keep the draw strictly positive.
        (g * boost).max(f64::MIN_POSITIVE)
    }
}

fn marsaglia_tsang(shape: f64, rng: &mut RngStream) -> f64 {
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x = rng.normal();
        let t = 1.0 + c * x;
        if t <= 0.0 {
            continue;
        }
        let v = t * t * t;
        let u = rng.uniform();
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 {
            return d * v;
        }
        if u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn moments(shape: f64, n: usize, seed: u64) -> (f64, f64) {
        let mut rng = RngStream::from_seed(seed);
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let x = sample_std_gamma(shape, &mut rng).unwrap();
            assert!(x > 0.0);
            s += x;
            s2 += x * x;
        }
        let m = s / n as f64;
        (m, s2 / n as f64 - m * m)
    }

    #[test]
    fn rejects_non_positive_shape() {
        let mut rng = RngStream::from_seed(1);
        assert!(sample_std_gamma(0.0, &mut rng).is_err());
        assert!(sample_std_gamma(-2.0, &mut rng).is_err());
        assert!(sample_std_gamma(f64::NAN, &mut rng).is_err());
    }

    #[test]
    fn small_shape_mean() {
        // sd of the mean = sqrt(0.04 / 1e6) = 2e-4
        let (m, v) = moments(0.04, 1_000_000, 5);
        assert!((m - 0.04).abs() < 0.001, "mean {m}");
        assert!((v - 0.04).abs() < 0.004, "var {v}");
    }

    #[test]
    fn shape_two_moments() {
        let (m, v) = moments(2.0, 1_000_000, 6);
        assert!((m - 2.0).abs() < 0.01, "mean {m}");
        assert!((v - 2.0).abs() < 0.05, "var {v}");
    }

    #[test]
    fn shape_one_is_exponential() {
        let n = 1_000_000;
        let mut rng = RngStream::from_seed(7);
        let above = (0..n)
            .filter(|_| sample_std_gamma(1.0, &mut rng).unwrap() > std::f64::consts::LN_2)
            .count();
        let frac = above as f64 / n as f64;
        assert!((frac - 0.5).abs() < 3.0 * 0.0005, "P(X > ln 2) = {frac}");
    }
}
