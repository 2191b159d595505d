//! Closed-form benchmarks: Fourier call prices, the Black formula and variance-swap strikes.

mod black;
mod charfn;
mod fourier;
mod quadrature;
mod varswap;

pub use black::{bs_call_undiscounted, norm_cdf};
pub use charfn::heston_charfn;
pub use fourier::{price_call_fourier, price_european_exact, price_european_exact_with};
pub use quadrature::{QuadratureRule, QuadratureSpec};
pub use varswap::{monitoring_periods, varswap_strike_continuous, varswap_strike_discrete};
