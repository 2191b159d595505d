//! The four benchmark parameter sets (Cases I to IV).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::HestonError;
use crate::model::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    I,
    II,
    III,
    IV,
}

impl Case {
    pub const ALL: [Case; 4] = [Case::I, Case::II, Case::III, Case::IV];

    pub fn model(self) -> ModelParams {
        let (v0, theta, xi, rho, kappa, r, q) = match self {
            Case::I => (0.04, 0.04, 1.0, -0.9, 0.5, 0.0, 0.0),
            Case::II => (0.04, 0.04, 0.9, -0.5, 0.3, 0.0, 0.0),
            Case::III => (0.010201, 0.019, 0.61, -0.7, 6.21, 0.0319, 0.0),
            Case::IV => (0.04, 0.25, 1.0, -0.5, 4.0, 0.01, 0.02),
        };
        ModelParams {
            s0: 100.0,
            v0,
            kappa,
            theta,
            xi,
            rho,
            r,
            q,
        }
    }

    pub fn maturity(self) -> f64 {
        match self {
            Case::I => 10.0,
            Case::II => 15.0,
            Case::III | Case::IV => 1.0,
        }
    }

    pub fn strike(self) -> f64 {
        match self {
            Case::IV => 120.0,
            _ => 100.0,
        }
    }

    /// Reference call price at `(maturity, strike)`.
    pub fn reference_price(self) -> f64 {
        match self {
            Case::I => 13.08467014,
            Case::II => 16.64922292,
            Case::III => 6.80611331,
            Case::IV => 9.02491348,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Case::I => "I",
            Case::II => "II",
            Case::III => "III",
            Case::IV => "IV",
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Case {
    type Err = HestonError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(Case::I),
            "II" | "2" => Ok(Case::II),
            "III" | "3" => Ok(Case::III),
            "IV" | "4" => Ok(Case::IV),
            other => Err(HestonError::Config(format!(
                "unknown case `{other}` (expected I, II, III or IV)"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid_and_parse() {
        for c in Case::ALL {
            c.model().validate().unwrap();
            assert_eq!(c.name().parse::<Case>().unwrap(), c);
        }
        assert_eq!(Case::III.model().r, 0.0319);
        assert!("V".parse::<Case>().is_err());
    }
}
