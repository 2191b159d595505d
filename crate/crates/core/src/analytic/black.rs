/// Standard normal distribution function.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Undiscounted Black call `F N(d1) - X N(d2)`; zero volatility gives the intrinsic value.
pub fn bs_call_undiscounted(forward: f64, sigma: f64, t: f64, strike: f64) -> f64 {
    let sd = sigma * t.sqrt();
    if !(sd > 0.0) {
        return (forward - strike).max(0.0);
    }
    let d1 = (forward / strike).ln() / sd + 0.5 * sd;
    forward * norm_cdf(d1) - strike * norm_cdf(d1 - sd)
}
