//! Small statistical toolkit used by the verification suites.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Sample mean and its standard error.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailIndex {
    pub index: f64,
    pub standard_error: f64,
    pub exceedances: usize,
    pub threshold: f64,
}

/// Minimum number of order statistics the Hill estimator is allowed to use.
pub const MIN_EXCEEDANCES: usize = 100;

/// Hill estimator of the tail index from the largest `top_fraction` of the
/// samples, with asymptotic standard error `index / sqrt(k)`.
pub fn hill_tail_index(samples: &[f64], top_fraction: f64) -> Result<TailIndex> {
    if !(top_fraction > 0.0 && top_fraction < 1.0) {
        return Err(Error::invalid("top_fraction", format!("must lie in (0, 1), got {top_fraction}")));
    }
    if samples.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(Error::invalid("samples", "must be finite and positive"));
    }
    let k = (samples.len() as f64 * top_fraction).floor() as usize;
    if k < MIN_EXCEEDANCES || k >= samples.len() {
        return Err(Error::InsufficientData(format!(
            "{k} exceedances, at least {MIN_EXCEEDANCES} needed"
        )));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let threshold = sorted[k];
    let log_threshold = threshold.ln();
    let mean_excess = sorted[..k].iter().map(|x| x.ln() - log_threshold).sum::<f64>() / k as f64;
    if !(mean_excess > 0.0) {
        return Err(Error::InsufficientData("no spread above the tail threshold".into()));
    }
    let index = 1.0 / mean_excess;
    Ok(TailIndex {
        index,
        standard_error: index / (k as f64).sqrt(),
        exceedances: k,
        threshold,
    })
}

/// Minimum sample size accepted by the Kolmogorov–Smirnov tests.
pub const MIN_KS_SAMPLES: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// Kolmogorov distribution tail `Q(λ) = 2 Σ (-1)^(j-1) exp(-2 j² λ²)`.
fn kolmogorov_tail(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=200 {
        let term = sign * (-2.0 * (j * j) as f64 * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-16 * sum.abs().max(1e-300) {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn p_from_statistic(d: f64, effective_n: f64) -> f64 {
    let sqrt_n = effective_n.sqrt();
    kolmogorov_tail((sqrt_n + 0.12 + 0.11 / sqrt_n) * d)
}

/// Two-sample Kolmogorov–Smirnov test with the asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    if a.len() < MIN_KS_SAMPLES || b.len() < MIN_KS_SAMPLES {
        return Err(Error::InsufficientData(format!(
            "two-sample KS needs {MIN_KS_SAMPLES} values per side, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.iter().chain(b).any(|x| x.is_nan()) {
        return Err(Error::invalid("samples", "NaN in KS input"));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(KsResult {
        statistic: d,
        p_value: p_from_statistic(d, na * nb / (na + nb)),
    })
}

/// One-sample Kolmogorov–Smirnov test against `N(mean, variance)`.
pub fn ks_normal(samples: &[f64], mean: f64, variance: f64) -> Result<KsResult> {
    if samples.len() < MIN_KS_SAMPLES {
        return Err(Error::InsufficientData(format!(
            "one-sample KS needs {MIN_KS_SAMPLES} values, got {}",
            samples.len()
        )));
    }
    let law = Normal::new(mean, variance.sqrt()).map_err(|e| Error::invalid("variance", e.to_string()))?;
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = law.cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max);
    Ok(KsResult {
        statistic: d,
        p_value: p_from_statistic(d, n),
    })
}
