use crate::error::{positive, HestonError, Result};
use crate::model::{avg_variance_moments, ModelParams};

/// Fair strike of a continuously monitored variance swap, `E(R_{0,T})`.
pub fn varswap_strike_continuous(model: &ModelParams, t: f64) -> Result<f64> {
    positive("T", t)?;
    Ok(avg_variance_moments(model, t).0)
}

/// Number of monitoring periods `T/h`, which must be a positive integer.
pub fn monitoring_periods(t: f64, h: f64) -> Result<u64> {
    positive("T", t)?;
    positive("h", h)?;
    let n = (t / h).round();
    if n < 1.0 || ((n * h - t) / t).abs() > 1e-9 {
        return Err(HestonError::InvalidParameter {
            name: "h",
            value: h,
            reason: "maturity must be an integer multiple of the monitoring interval",
        });
    }
    Ok(n as u64)
}

/// Fair strike of a variance swap on `(1/T) sum_i ln(S_{i+1}/S_i)^2`,
/// monitored every `h`: the continuous strike plus a discreteness adjustment.
pub fn varswap_strike_discrete(model: &ModelParams, t: f64, h: f64) -> Result<f64> {
    monitoring_periods(t, h)?;
    let ModelParams {
        v0,
        kappa,
        theta,
        xi,
        rho,
        r,
        q,
        ..
    } = *model;
    let kt = kappa * t;
    let kh = kappa * h;
    let e = -(-kt).exp_m1() / kt;
    let cont = theta + (v0 - theta) * e;
    let carry = theta + 2.0 * q - 2.0 * r;
    let term1 = 0.25 * h * carry * (carry + 2.0 * (v0 - theta) * e);
    let term2 = theta * xi / kappa * (xi / (4.0 * kappa) - rho) * (1.0 + (-kh).exp_m1() / kh);
    let term3 = (v0 - theta) * xi / kappa
        * (xi / (2.0 * kappa) - rho)
        * e
        * (1.0 - kh / kh.exp_m1());
    let term4 = (xi * xi / (kappa * kappa) * (theta - 2.0 * v0)
        + 2.0 / kappa * (v0 - theta).powi(2))
        * -(-2.0 * kt).exp_m1()
        / (8.0 * kt)
        * (0.5 * kh).tanh();
    Ok(cont + term1 + term2 + term3 + term4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cases::Case;

    #[test]
    fn continuous_strike() {
        let k = varswap_strike_continuous(&Case::III.model(), 1.0).unwrap();
        assert_eq!(format!("{k:.6}"), "0.017586");
        let m = Case::I.model();
        assert_eq!(varswap_strike_continuous(&m, 7.0).unwrap(), m.theta);
        let fast = ModelParams { kappa: 1e-9, ..Case::IV.model() };
        assert!((varswap_strike_continuous(&fast, 1.0).unwrap() - fast.v0).abs() < 1e-9);
    }

    #[test]
    fn discrete_table_values() {
        let periods = [2.0, 4.0, 12.0, 52.0];
        let want3 = ["1.870", "1.832", "1.790", "1.767"];
        let want4 = ["21.930", "21.132", "20.356", "19.973"];
        for (case, want) in [(Case::III, want3), (Case::IV, want4)] {
            for (n, w) in periods.iter().zip(want) {
                let k = varswap_strike_discrete(&case.model(), 1.0, 1.0 / n).unwrap();
                assert_eq!(format!("{:.3}", 100.0 * k), w, "{case:?} N={n}");
            }
        }
    }

    #[test]
    fn discrete_converges_to_continuous() {
        for case in Case::ALL {
            let m = case.model();
            let t = case.maturity();
            let c = varswap_strike_continuous(&m, t).unwrap();
            let d = varswap_strike_discrete(&m, t, t / (t * 1e4).round()).unwrap();
            assert!(((d - c) / c).abs() < 1e-3, "{case:?}");
        }
    }

    #[test]
    fn discrete_decreases_toward_continuous() {
        for case in Case::ALL {
            let m = case.model();
            let t = case.maturity();
            let c = varswap_strike_continuous(&m, t).unwrap();
            let ks: Vec<f64> = [2.0, 4.0, 12.0, 52.0]
                .iter()
                .map(|n| varswap_strike_discrete(&m, t, t / n).unwrap())
                .collect();
            for w in ks.windows(2) {
                assert!(w[1] < w[0], "{case:?} {ks:?}");
            }
            assert!(ks[3] > c);
        }
    }

    #[test]
    fn non_integer_periods_rejected() {
        assert!(varswap_strike_discrete(&Case::III.model(), 1.0, 0.3).is_err());
    }
}
