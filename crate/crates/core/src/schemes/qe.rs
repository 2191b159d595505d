use crate::error::{HestonError, Result};
use crate::model::ModelParams;

/// Switch between the quadratic and exponential branches.
pub const PSI_CRITICAL: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QeBranch {
    /// `V' = a (b + Z)^2`.
    Quadratic { a: f64, b: f64 },
    /// `V' = 0` with probability `p`, else exponential with rate `beta`.
    Exponential { p: f64, beta: f64 },
}

/// Moment-matched quadratic-exponential transition from `v` over `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QeCoeffs {
    pub mean: f64,
    pub var: f64,
    pub psi: f64,
    pub branch: QeBranch,
    pub a1: f64,
    pub a2: f64,
}

/// Step constants that do not depend on the starting variance.
#[derive(Debug, Clone, Copy)]
pub(crate) struct QeStep {
    decay: f64,
    var_v: f64,
    var_const: f64,
    theta: f64,
    pub(crate) a1: f64,
    pub(crate) a2: f64,
    /// `rho kappa theta h / xi`.
    pub(crate) drift_k: f64,
}

impl QeStep {
    pub(crate) fn new(model: &ModelParams, h: f64) -> Self {
        let ModelParams {
            kappa,
            theta,
            xi,
            rho,
            ..
        } = *model;
        let decay = (-kappa * h).exp();
        let om = -(-kappa * h).exp_m1();
        let xi2 = xi * xi;
        let base = 0.25 * rho * h * (2.0 * kappa / xi - rho);
        Self {
            decay,
            var_v: xi2 * decay * om / kappa,
            var_const: theta * xi2 * om * om / (2.0 * kappa),
            theta,
            a1: base + rho / xi,
            a2: base - rho / xi,
            drift_k: rho * kappa * theta * h / xi,
        }
    }

    #[inline]
    pub(crate) fn coeffs(&self, v: f64) -> QeCoeffs {
        let mean = self.theta + (v - self.theta) * self.decay;
        let var = v * self.var_v + self.var_const;
        let psi = var / (mean * mean);
        let branch = if psi <= PSI_CRITICAL {
            let two_psi = 2.0 / psi;
            let b2 = two_psi - 1.0 + two_psi.sqrt() * (two_psi - 1.0).sqrt();
            QeBranch::Quadratic {
                a: mean / (1.0 + b2),
                b: b2.sqrt(),
            }
        } else {
            let p = (psi - 1.0) / (psi + 1.0);
            QeBranch::Exponential {
                p,
                beta: (1.0 - p) / mean,
            }
        };
        QeCoeffs {
            mean,
            var,
            psi,
            branch,
            a1: self.a1,
            a2: self.a2,
        }
    }
}

impl QeCoeffs {
    pub fn new(v: f64, h: f64, model: &ModelParams) -> Self {
        QeStep::new(model, h).coeffs(v)
    }

    /// `ln E[exp(A1 V')]` under the branch distribution.
    pub fn log_mgf_a1(&self) -> Result<f64> {
        match self.branch {
            QeBranch::Quadratic { a, b } => {
                let d = 1.0 - 2.0 * self.a1 * a;
                if d <= 0.0 {
                    return Err(HestonError::Numerical(format!(
                        "martingale correction undefined: 1 - 2 A1 a = {d}"
                    )));
                }
                Ok(self.a1 * b * b * a / d - 0.5 * d.ln())
            }
            QeBranch::Exponential { p, beta } => {
                if beta <= self.a1 {
                    return Err(HestonError::Numerical(format!(
                        "martingale correction undefined: beta = {beta} <= A1 = {}",
                        self.a1
                    )));
                }
                Ok((p + beta * (1.0 - p) / (beta - self.a1)).ln())
            }
        }
    }

    /// Draw `V'` from the uniform `u` (exponential branch) or normal `z` (quadratic branch).
    #[inline]
    pub fn sample(&self, z_or_u: f64) -> f64 {
        match self.branch {
            QeBranch::Quadratic { a, b } => {
                let x = b + z_or_u;
                a * x * x
            }
            QeBranch::Exponential { p, beta } => {
                if z_or_u <= p {
                    0.0
                } else {
                    ((1.0 - p) / (1.0 - z_or_u)).ln() / beta
                }
            }
        }
    }

    /// Mean and variance of `V'` implied by the branch parameters.
    pub fn branch_moments(&self) -> (f64, f64) {
        match self.branch {
            QeBranch::Quadratic { a, b } => {
                let b2 = b * b;
                (a * (1.0 + b2), 2.0 * a * a * (1.0 + 2.0 * b2))
            }
            QeBranch::Exponential { p, beta } => {
                ((1.0 - p) / beta, (1.0 - p * p) / (beta * beta))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cases::Case;
    use crate::model::terminal_variance_moments;

    #[test]
    fn branches_reproduce_moments() {
        let m = Case::I.model();
        let h = 0.25;
        let mut seen = (false, false);
        for v in [1e-4, 0.001, 0.01, 0.04, 0.2, 1.0] {
            let c = QeCoeffs::new(v, h, &m);
            match c.branch {
                QeBranch::Quadratic { .. } => seen.0 = true,
                QeBranch::Exponential { .. } => seen.1 = true,
            }
            let (mean, var) = terminal_variance_moments(v, h, &m);
            let (bm, bv) = c.branch_moments();
            assert!((bm / mean - 1.0).abs() < 1e-12, "v={v}");
            assert!((bv / var - 1.0).abs() < 1e-12, "v={v}: {bv} vs {var}");
        }
        assert!(seen.0 && seen.1);
    }

    #[test]
    fn trapezoid_exponent_coefficients() {
        // A1 V' + A2 V equals the forward exponent with I = (V + V') h / 2, less the theta term.
        let m = Case::IV.model();
        let h = 0.125;
        let c = QeCoeffs::new(0.05, h, &m);
        let (v, vn) = (0.05, 0.07);
        let iv = 0.5 * (v + vn) * h;
        let expo = -0.5 * m.rho * m.rho * iv + m.rho / m.xi * (vn - v + m.kappa * iv);
        assert!((c.a1 * vn + c.a2 * v - expo).abs() < 1e-15);
    }
}
