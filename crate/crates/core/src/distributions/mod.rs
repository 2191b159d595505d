//! Random-variate samplers and the special functions they need.

mod bessel;
mod gamma;
mod invgauss;
mod poisson;
mod transition;

pub use bessel::{
    bessel_iv, bessel_rv_moments, ln_bessel_iv_scaled, sample_bessel_rv, BesselPmf,
    ASYMPTOTIC_THRESHOLD,
};
pub use gamma::sample_std_gamma;
pub use invgauss::sample_invgauss;
pub use poisson::sample_poisson;
pub use transition::{sample_terminal_variance, VarianceTransition};

pub(crate) use bessel::{bessel_rv_moments_unchecked, bessel_rv_unchecked};
pub(crate) use gamma::std_gamma_unchecked;
pub(crate) use invgauss::invgauss_by_moments;
pub(crate) use poisson::poisson_unchecked;
