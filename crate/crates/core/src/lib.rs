//! Monte Carlo simulation of the Heston stochastic volatility model.

pub mod analytic;
pub mod cases;
pub mod distributions;
pub mod error;
pub mod harness;
pub mod laplace;
pub mod model;
pub mod moments;
pub mod multifactor;
pub mod pricing;
pub mod rng;
pub mod schemes;
pub mod series;

pub use cases::Case;
pub use error::{HestonError, Result};
pub use model::ModelParams;
pub use rng::RngStream;
pub use schemes::{MartingaleMode, SchemeConfig, SchemeKind};
