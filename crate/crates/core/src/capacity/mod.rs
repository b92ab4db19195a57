//! Logarithmic and Riesz energies of dyadic measures, pullbacks under
//! monotone maps, and equilibrium measures of dyadic sets.
//!
//! Measures are taken to be uniform inside each cell, so every energy below
//! is the exact double integral of the kernel against that piecewise-constant
//! density (off-diagonal cells included), not a midpoint approximation.

mod equilibrium;
mod io;
mod kernel;

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::chaos::{DyadicMeasure, Provenance};
use crate::error::{Error, Result};
use crate::numeric::ols_slope;
use crate::welding::MonotoneMap;
use crate::fractal::IntervalSelection;

pub use equilibrium::{equilibrium_measure, equilibrium_measure_with, Equilibrium, SolverOptions};
pub use io::write_density_csv;

use kernel::{mean_log_offset, mean_riesz_offset, Toeplitz};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EnergyKernel {
    /// `log(2 / |x - y|)`
    Log,
    /// `|x - y|^(-s)`
    Riesz { s: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagonalModel {
    UniformInCell,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub kernel: EnergyKernel,
    pub value: f64,
    pub infinite: bool,
    pub diagonal_model: DiagonalModel,
    pub resolution: u32,
}

impl EnergyReport {
    fn new(kernel: EnergyKernel, value: f64, resolution: u32) -> Self {
        Self {
            kernel,
            value,
            infinite: !value.is_finite(),
            diagonal_model: DiagonalModel::UniformInCell,
            resolution,
        }
    }
}

/// Interaction table for the log kernel between cells of level `n`.
pub(crate) fn log_table(n: u32) -> Vec<f64> {
    let len = 1usize << n;
    let base = LN_2 + f64::from(n) * LN_2;
    (0..len).map(|k| base - mean_log_offset(k)).collect()
}

pub(crate) fn riesz_table(n: u32, s: f64) -> Vec<f64> {
    let len = 1usize << n;
    let scale = 2f64.powf(f64::from(n) * s);
    (0..len).map(|k| scale * mean_riesz_offset(k, s)).collect()
}

fn require_probability(measure: &DyadicMeasure) -> Result<()> {
    if measure.is_probability() {
        Ok(())
    } else {
        Err(Error::NotProbability {
            total: measure.total(),
        })
    }
}

/// `∫∫ log(2/|x-y|) dν(x) dν(y)` for a probability measure.
pub fn log_energy(measure: &DyadicMeasure) -> Result<EnergyReport> {
    require_probability(measure)?;
    let n = measure.resolution();
    let value = Toeplitz::new(log_table(n)).quadratic_form(measure.masses());
    Ok(EnergyReport::new(EnergyKernel::Log, value, n))
}

/// `∫∫ |x-y|^(-s) dν(x) dν(y)` for a probability measure and `0 < s < 1`.
pub fn riesz_energy(measure: &DyadicMeasure, s: f64) -> Result<EnergyReport> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::UnsupportedExponent(s));
    }
    require_probability(measure)?;
    let n = measure.resolution();
    let value = Toeplitz::new(riesz_table(n, s)).quadratic_form(measure.masses());
    Ok(EnergyReport::new(EnergyKernel::Riesz { s }, value, n))
}

/// `ν(map(I))` for every cell `I` of `nu`'s resolution.
pub fn pullback(nu: &DyadicMeasure, map: &MonotoneMap) -> Result<DyadicMeasure> {
    pullback_at(nu, map, nu.resolution())
}

/// Pullback onto the cells of an arbitrary domain resolution.
///
/// `ν` is read as uniform inside its cells, so `ν(map(I))` is a difference of
/// its piecewise-linear distribution function at the images of the endpoints.
pub fn pullback_at(nu: &DyadicMeasure, map: &MonotoneMap, resolution: u32) -> Result<DyadicMeasure> {
    require_probability(nu)?;
    if resolution == 0 || resolution > crate::logfield::MAX_RESOLUTION {
        return Err(Error::InvalidScale(format!("pullback resolution {resolution}")));
    }
    if map.values().first() != Some(&0.0) || map.values().last() != Some(&1.0) {
        return Err(Error::DegenerateMap("map does not fix the endpoints".into()));
    }
    let masses = nu.masses();
    let cells = masses.len();
    let mut cumulative = Vec::with_capacity(cells + 1);
    cumulative.push(0.0);
    let mut acc = 0.0;
    for m in masses {
        acc += m;
        cumulative.push(acc);
    }
    let distribution = |y: f64| {
        let pos = (y * cells as f64).clamp(0.0, cells as f64);
        let j = (pos.floor() as usize).min(cells - 1);
        cumulative[j] + (pos - j as f64) * masses[j]
    };
    let count = 1usize << resolution;
    let h = 1.0 / count as f64;
    let ends: Vec<f64> = (0..=count)
        .map(|j| match j {
            0 => 0.0,
            j if j == count => acc,
            j => distribution(map.eval(j as f64 * h)),
        })
        .collect();
    let pulled: Vec<f64> = ends.windows(2).map(|w| (w[1] - w[0]).max(0.0)).collect();
    let pulled_total: f64 = pulled.iter().sum();
    // telescoping leaves only rounding; put it back on the heaviest cell
    let mut pulled = pulled;
    if let Some((arg, _)) = pulled
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
    {
        pulled[arg] += acc - pulled_total;
    }
    DyadicMeasure::from_masses(
        pulled,
        Provenance::Synthetic {
            tag: "pullback".into(),
        },
    )
}

/// Equilibrium energies across resolutions and their growth rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarityScore {
    pub resolutions: Vec<u32>,
    pub energies: Vec<f64>,
    /// Slope of the minimal energy against `n log 2`: near 0 on a plateau
    /// (positive capacity), near 1 when the set shrinks to a point.
    pub score: f64,
}

pub fn polarity_score(selections: &[IntervalSelection]) -> Result<PolarityScore> {
    polarity_score_with(selections, &SolverOptions::default())
}

pub fn polarity_score_with(
    selections: &[IntervalSelection],
    options: &SolverOptions,
) -> Result<PolarityScore> {
    if selections.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "polarity score needs at least 3 resolutions, got {}",
            selections.len()
        )));
    }
    if selections
        .windows(2)
        .any(|w| w[1].resolution() <= w[0].resolution())
    {
        return Err(Error::invalid("selections", "resolutions must increase strictly"));
    }
    let mut energies = Vec::with_capacity(selections.len());
    for sel in selections {
        let eq = equilibrium_measure_with(sel, options)
            .map_err(|e| e.context(format!("equilibrium at resolution {}", sel.resolution())))?;
        energies.push(eq.energy.value);
    }
    let resolutions: Vec<u32> = selections.iter().map(|s| s.resolution()).collect();
    let xs: Vec<f64> = resolutions.iter().map(|&n| f64::from(n) * LN_2).collect();
    let score = ols_slope(&xs, &energies).unwrap_or(0.0);
    Ok(PolarityScore {
        resolutions,
        energies,
        score,
    })
}
