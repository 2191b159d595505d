use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{HestonError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    /// Gamma expansion with Bessel-variate conditioning.
    Ge,
    /// Gamma expansion conditioned on the Poisson count of the variance draw.
    PoisGe,
    /// Moment-matched inverse Gaussian for the integrated variance.
    Ig,
    /// Quadratic-exponential variance with trapezoidal integrated variance
    /// and martingale correction.
    Qem,
    /// Exact variance with the Poisson-conditioned mean as integrated variance.
    PoisTd,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 5] = [
        SchemeKind::Ge,
        SchemeKind::PoisGe,
        SchemeKind::Ig,
        SchemeKind::Qem,
        SchemeKind::PoisTd,
    ];

    pub fn label(self) -> &'static str {
        match self {
            SchemeKind::Ge => "ge",
            SchemeKind::PoisGe => "pois-ge",
            SchemeKind::Ig => "ig",
            SchemeKind::Qem => "qem",
            SchemeKind::PoisTd => "pois-td",
        }
    }

    /// Whether the scheme takes a truncation level.
    pub fn truncated(self) -> bool {
        matches!(self, SchemeKind::Ge | SchemeKind::PoisGe)
    }

    /// Whether the scheme discretizes time (as opposed to exact one-step sampling).
    pub fn time_discretized(self) -> bool {
        matches!(self, SchemeKind::Qem | SchemeKind::PoisTd)
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SchemeKind {
    type Err = HestonError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "ge" => Ok(SchemeKind::Ge),
            "pois-ge" => Ok(SchemeKind::PoisGe),
            "ig" => Ok(SchemeKind::Ig),
            "qem" | "qe" => Ok(SchemeKind::Qem),
            "pois-td" => Ok(SchemeKind::PoisTd),
            other => Err(HestonError::Config(format!(
                "unknown scheme `{other}` (expected ge, pois-ge, ig, qem or pois-td)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MartingaleMode {
    None,
    /// Correct the conditional forward so that the discounted price is a martingale.
    Price,
    /// Correct the squared log return (variance swaps).
    ReturnVariance,
}

impl FromStr for MartingaleMode {
    type Err = HestonError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "none" => Ok(MartingaleMode::None),
            "price" => Ok(MartingaleMode::Price),
            "return-variance" | "retvar" => Ok(MartingaleMode::ReturnVariance),
            other => Err(HestonError::Config(format!(
                "unknown martingale correction `{other}` (expected none, price or return-variance)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub kind: SchemeKind,
    /// Truncation level; only for GE and POIS-GE.
    pub k: Option<u32>,
    pub n_steps: u32,
    pub martingale_mode: MartingaleMode,
}

impl SchemeConfig {
    /// Default correction for option pricing: `Price` for the time-discretized
    /// schemes, none for the exact ones.
    pub fn new(kind: SchemeKind, k: Option<u32>, n_steps: u32) -> Result<Self> {
        let mode = if kind.time_discretized() {
            MartingaleMode::Price
        } else {
            MartingaleMode::None
        };
        let k = if kind.truncated() { Some(k.unwrap_or(0)) } else { k };
        let cfg = Self {
            kind,
            k,
            n_steps,
            martingale_mode: mode,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_mode(mut self, mode: MartingaleMode) -> Result<Self> {
        self.martingale_mode = mode;
        self.validate()?;
        Ok(self)
    }

    pub fn pois_ge(k: u32, n_steps: u32) -> Self {
        Self {
            kind: SchemeKind::PoisGe,
            k: Some(k),
            n_steps,
            martingale_mode: MartingaleMode::None,
        }
    }

    pub fn truncation(&self) -> u32 {
        self.k.unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_steps == 0 {
            return Err(HestonError::Config("number of steps must be at least 1".into()));
        }
        if !self.kind.truncated() && self.k.is_some_and(|k| k != 0) {
            return Err(HestonError::Config(format!(
                "scheme {} takes no truncation level (got K = {})",
                self.kind,
                self.k.unwrap_or(0)
            )));
        }
        if self.martingale_mode == MartingaleMode::ReturnVariance && !self.kind.time_discretized()
        {
            return Err(HestonError::Config(format!(
                "return-variance correction applies to qem and pois-td only, not {}",
                self.kind
            )));
        }
        Ok(())
    }
}

impl fmt::Display for SchemeConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} N={}", self.kind, self.n_steps)?;
        if self.kind.truncated() {
            write!(f, " K={}", self.truncation())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_labels() {
        for kind in SchemeKind::ALL {
            assert_eq!(kind.label().parse::<SchemeKind>().unwrap(), kind);
        }
        assert_eq!("POIS_TD".parse::<SchemeKind>().unwrap(), SchemeKind::PoisTd);
        assert!("bk".parse::<SchemeKind>().is_err());
    }

    #[test]
    fn validation() {
        assert!(SchemeConfig::new(SchemeKind::Ig, Some(2), 1).is_err());
        assert!(SchemeConfig::new(SchemeKind::Qem, None, 0).is_err());
        let ge = SchemeConfig::new(SchemeKind::Ge, None, 1).unwrap();
        assert_eq!(ge.k, Some(0));
        assert!(ge.with_mode(MartingaleMode::ReturnVariance).is_err());
        let td = SchemeConfig::new(SchemeKind::PoisTd, None, 4).unwrap();
        assert_eq!(td.martingale_mode, MartingaleMode::Price);
        assert!(td.with_mode(MartingaleMode::ReturnVariance).is_ok());
    }
}
