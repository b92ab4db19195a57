use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Non-decreasing gauge on [0, 1) with `f(0+) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GaugeFunction {
    /// `f_k(u) = (log 1/u)^-k`
    LogPower { k: f64 },
    /// `u^alpha`
    Power { alpha: f64 },
    /// `c (log 1/u)^-k`
    ScaledLogPower { scale: f64, k: f64 },
    /// `c u^alpha`
    ScaledPower { scale: f64, alpha: f64 },
}

impl GaugeFunction {
    pub fn log_power(k: f64) -> Result<Self> {
        if !(k > 0.0) {
            return Err(Error::invalid("k", format!("must be positive, got {k}")));
        }
        Ok(GaugeFunction::LogPower { k })
    }

    pub fn power(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::invalid("alpha", format!("must be positive, got {alpha}")));
        }
        Ok(GaugeFunction::Power { alpha })
    }

    pub fn scaled_log_power(scale: f64, k: f64) -> Result<Self> {
        if !(scale > 0.0 && k > 0.0) {
            return Err(Error::invalid("gauge", "scale and k must be positive"));
        }
        Ok(GaugeFunction::ScaledLogPower { scale, k })
    }

    pub fn scaled_power(scale: f64, alpha: f64) -> Result<Self> {
        if !(scale > 0.0 && alpha > 0.0) {
            return Err(Error::invalid("gauge", "scale and alpha must be positive"));
        }
        Ok(GaugeFunction::ScaledPower { scale, alpha })
    }

    /// Evaluates the gauge for `u` in (0, 1).
    pub fn eval(&self, u: f64) -> f64 {
        match *self {
            GaugeFunction::LogPower { k } => (1.0 / u).ln().powf(-k),
            GaugeFunction::Power { alpha } => u.powf(alpha),
            GaugeFunction::ScaledLogPower { scale, k } => scale * (1.0 / u).ln().powf(-k),
            GaugeFunction::ScaledPower { scale, alpha } => scale * u.powf(alpha),
        }
    }
}

pub fn gauge_eval(f: &GaugeFunction, u: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::invalid("u", format!("gauge argument must lie in (0, 1), got {u}")));
    }
    Ok(f.eval(u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, LN_2};

    #[test]
    fn log_power_values() {
        for k in [0.3, 1.0, 2.5] {
            let f = GaugeFunction::log_power(k).unwrap();
            assert!((gauge_eval(&f, 1.0 / E).unwrap() - 1.0).abs() < 1e-15);
        }
        let f1 = GaugeFunction::log_power(1.0).unwrap();
        let v = gauge_eval(&f1, 0.5f64.powi(10)).unwrap();
        assert!((v - 1.0 / (10.0 * LN_2)).abs() < 1e-15);
        assert!((v - 0.144270).abs() < 1e-6);
    }

    #[test]
    fn monotone_on_a_grid() {
        for f in [
            GaugeFunction::log_power(0.4).unwrap(),
            GaugeFunction::log_power(3.0).unwrap(),
            GaugeFunction::power(0.5).unwrap(),
            GaugeFunction::scaled_log_power(2.0, 1.0).unwrap(),
        ] {
            let vals: Vec<f64> = (1..1000).map(|i| f.eval(i as f64 / 1000.0)).collect();
            assert!(vals.windows(2).all(|w| w[0] <= w[1]), "{f:?}");
            assert!(f.eval(1e-300) < f.eval(1e-3) && f.eval(1e-300) > 0.0);
        }
    }

    #[test]
    fn domain_errors() {
        let f = GaugeFunction::log_power(1.0).unwrap();
        assert!(gauge_eval(&f, 0.0).is_err());
        assert!(gauge_eval(&f, 1.0).is_err());
        assert!(GaugeFunction::log_power(0.0).is_err());
        assert!(GaugeFunction::power(-1.0).is_err());
    }
}
