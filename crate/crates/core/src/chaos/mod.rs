//! Gaussian multiplicative chaos measures as dyadic mass vectors.
//!
//! For `γ < 2` a cell of the level-n grid receives mass
//! `2^-n exp((γ/2) X_ε(x_j) - (γ²/8) E[X_ε²])`; at the critical point `γ = 2`
//! the Seneta–Heyde renormalisation `sqrt(log 1/ε) exp(X_ε(x_j) - E[X_ε²]/2)`
//! is used instead.

mod io;

pub use io::{write_csv, MeasureMetadata};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logfield::{FieldSample, FieldSampler, ScaleParameter, MAX_RESOLUTION};
use crate::numeric::{dyadic_sum, halve};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    Raw,
    Probability,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GmcParameters {
    pub gamma: f64,
    pub epsilon: ScaleParameter,
    pub normalization: Normalization,
}

impl GmcParameters {
    pub fn new(gamma: f64, epsilon: ScaleParameter, normalization: Normalization) -> Result<Self> {
        if !(0.0..=2.0).contains(&gamma) {
            return Err(Error::invalid("gamma", format!("must lie in [0, 2], got {gamma}")));
        }
        Ok(Self {
            gamma,
            epsilon,
            normalization,
        })
    }

    pub fn is_critical(&self) -> bool {
        self.gamma == 2.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Gmc { seed: u64, params: GmcParameters },
    Synthetic { tag: String },
}

/// A closed-open dyadic interval `[index 2^-level, (index + 1) 2^-level)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DyadicInterval {
    pub level: u32,
    pub index: usize,
}

impl DyadicInterval {
    pub fn new(level: u32, index: usize) -> Result<Self> {
        if level > MAX_RESOLUTION || index >= 1usize << level {
            return Err(Error::invalid(
                "interval",
                format!("index {index} out of range at level {level}"),
            ));
        }
        Ok(Self { level, index })
    }

    /// The unit interval itself.
    pub fn unit() -> Self {
        Self { level: 0, index: 0 }
    }

    /// Recognises `[left, right)` as a dyadic interval.
    pub fn from_endpoints(left: f64, right: f64) -> Result<Self> {
        let non_dyadic = Error::NonDyadicInterval {
            left,
            right,
            max_level: MAX_RESOLUTION,
        };
        if !(left >= 0.0 && right <= 1.0 && left < right) {
            return Err(non_dyadic);
        }
        let length = right - left;
        let level = -length.log2();
        if level.fract() != 0.0 || level > f64::from(MAX_RESOLUTION) {
            return Err(non_dyadic);
        }
        let index = left / length;
        if index.fract() != 0.0 {
            return Err(non_dyadic);
        }
        Ok(Self {
            level: level as u32,
            index: index as usize,
        })
    }

    pub fn length(&self) -> f64 {
        0.5f64.powi(self.level as i32)
    }

    pub fn left(&self) -> f64 {
        self.index as f64 * self.length()
    }

    pub fn right(&self) -> f64 {
        (self.index + 1) as f64 * self.length()
    }
}

/// Nonnegative masses on the 2^n dyadic cells of [0, 1].
///
/// `total` is the dyadic pairwise sum of the masses, so coarsening and
/// interval masses agree with it bit-for-bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyadicMeasure {
    resolution: u32,
    masses: Vec<f64>,
    total: f64,
    provenance: Provenance,
}

impl DyadicMeasure {
    pub fn from_masses(masses: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if masses.is_empty() || !masses.len().is_power_of_two() {
            return Err(Error::invalid(
                "masses",
                format!("length must be a power of two, got {}", masses.len()),
            ));
        }
        let resolution = masses.len().trailing_zeros();
        if resolution > MAX_RESOLUTION {
            return Err(Error::invalid("masses", "resolution too fine"));
        }
        if let Some((j, m)) = masses
            .iter()
            .enumerate()
            .find(|(_, m)| !(m.is_finite() && **m >= 0.0))
        {
            return Err(Error::DegenerateMeasure(format!("cell {j} has mass {m}")));
        }
        let total = dyadic_sum(&masses);
        Ok(Self {
            resolution,
            masses,
            total,
            provenance,
        })
    }

    /// Lebesgue measure at resolution `n`.
    pub fn lebesgue(resolution: u32) -> Result<Self> {
        if resolution > MAX_RESOLUTION {
            return Err(Error::invalid("resolution", "too fine"));
        }
        let cell = 0.5f64.powi(resolution as i32);
        Self::from_masses(
            vec![cell; 1 << resolution],
            Provenance::Synthetic {
                tag: "lebesgue".into(),
            },
        )
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn cell_length(&self) -> f64 {
        0.5f64.powi(self.resolution as i32)
    }

    pub fn is_probability(&self) -> bool {
        (self.total - 1.0).abs() <= 1e-12
    }

    /// Divides every mass by the realised total.
    pub fn normalized(&self) -> Result<Self> {
        if !(self.total > 0.0) {
            return Err(Error::DegenerateMeasure(format!(
                "cannot normalise a measure of total {}",
                self.total
            )));
        }
        let masses = self.masses.iter().map(|m| m / self.total).collect();
        let mut out = Self::from_masses(masses, self.provenance.clone())?;
        if let Provenance::Gmc { params, .. } = &mut out.provenance {
            params.normalization = Normalization::Probability;
        }
        Ok(out)
    }

    /// The image of the measure under `x -> 1 - x`.
    pub fn reflected(&self) -> Self {
        let masses: Vec<f64> = self.masses.iter().rev().copied().collect();
        let total = dyadic_sum(&masses);
        Self {
            resolution: self.resolution,
            masses,
            total,
            provenance: self.provenance.clone(),
        }
    }

    /// Masses of the level-`n_target` cells; each is the exact dyadic sum of its children.
    pub fn coarsen(&self, n_target: u32) -> Result<Self> {
        if n_target > self.resolution {
            return Err(Error::ResolutionMismatch(format!(
                "cannot coarsen resolution {} to finer level {n_target}",
                self.resolution
            )));
        }
        let mut masses = self.masses.clone();
        for _ in n_target..self.resolution {
            masses = halve(&masses);
        }
        Ok(Self {
            resolution: n_target,
            total: self.total,
            masses,
            provenance: self.provenance.clone(),
        })
    }

    pub fn interval_mass(&self, interval: DyadicInterval) -> Result<f64> {
        if interval.level > self.resolution {
            return Err(Error::ResolutionMismatch(format!(
                "interval level {} finer than measure resolution {}",
                interval.level, self.resolution
            )));
        }
        let width = 1usize << (self.resolution - interval.level);
        let start = interval.index * width;
        Ok(dyadic_sum(&self.masses[start..start + width]))
    }

    /// Mass of `[left, right)` for dyadic endpoints.
    pub fn mass_between(&self, left: f64, right: f64) -> Result<f64> {
        self.interval_mass(DyadicInterval::from_endpoints(left, right)?)
    }
}

/// Exponential weights of the chaos density at each grid point.
pub fn density_weights(field: &FieldSample, params: &GmcParameters) -> Result<Vec<f64>> {
    weights_from_values(&field.values, field.epsilon, params)
}

fn weights_from_values(
    values: &[f64],
    field_eps: ScaleParameter,
    params: &GmcParameters,
) -> Result<Vec<f64>> {
    if field_eps != params.epsilon {
        return Err(Error::ResolutionMismatch(format!(
            "field sampled at ε = 2^-{} but parameters use ε = 2^-{}",
            field_eps.exponent(),
            params.epsilon.exponent()
        )));
    }
    let var = params.epsilon.point_variance();
    if params.is_critical() {
        if params.epsilon.exponent() == 0 {
            return Err(Error::InvalidScale(
                "critical renormalisation needs ε < 1".into(),
            ));
        }
        let prefactor = params.epsilon.log_inverse().sqrt();
        Ok(values
            .iter()
            .map(|v| prefactor * (v - 0.5 * var).exp())
            .collect())
    } else {
        let g = params.gamma;
        Ok(values
            .iter()
            .map(|v| (0.5 * g * v - g * g / 8.0 * var).exp())
            .collect())
    }
}

/// Midpoint-rule discretisation of the chaos measure on the field's grid.
pub fn build_measure(field: &FieldSample, params: &GmcParameters) -> Result<DyadicMeasure> {
    measure_from_values(&field.values, field.grid.resolution(), field.epsilon, field.seed, params)
}

fn measure_from_values(
    values: &[f64],
    resolution: u32,
    field_eps: ScaleParameter,
    seed: u64,
    params: &GmcParameters,
) -> Result<DyadicMeasure> {
    if resolution < params.epsilon.exponent() {
        return Err(Error::ResolutionMismatch(format!(
            "grid spacing 2^-{resolution} is coarser than ε = 2^-{}",
            params.epsilon.exponent()
        )));
    }
    let cell = 0.5f64.powi(resolution as i32);
    let masses: Vec<f64> = weights_from_values(values, field_eps, params)?
        .into_iter()
        .map(|w| w * cell)
        .collect();
    let raw_params = GmcParameters {
        normalization: Normalization::Raw,
        ..*params
    };
    let raw = DyadicMeasure::from_masses(
        masses,
        Provenance::Gmc {
            seed,
            params: raw_params,
        },
    )?;
    if !(raw.total > 0.0) {
        return Err(Error::DegenerateMeasure(format!(
            "total mass {} for seed {seed}",
            raw.total
        )));
    }
    match params.normalization {
        Normalization::Raw => Ok(raw),
        Normalization::Probability => raw.normalized(),
    }
}

/// Samples chaos measures replica by replica from a shared field sampler.
#[derive(Debug)]
pub struct ChaosSampler {
    field: FieldSampler,
    params: GmcParameters,
}

impl ChaosSampler {
    pub fn new(field: FieldSampler, params: GmcParameters) -> Result<Self> {
        if field.epsilon() != params.epsilon {
            return Err(Error::ResolutionMismatch(
                "sampler and parameters disagree on ε".into(),
            ));
        }
        if field.grid().resolution() < params.epsilon.exponent() {
            return Err(Error::ResolutionMismatch(
                "grid coarser than the regularisation scale".into(),
            ));
        }
        Ok(Self { field, params })
    }

    pub fn params(&self) -> &GmcParameters {
        &self.params
    }

    pub fn resolution(&self) -> u32 {
        self.field.grid().resolution()
    }

    pub fn measure(&self, seed: u64) -> Result<DyadicMeasure> {
        let values = self.field.sample_values(seed);
        measure_from_values(
            &values,
            self.resolution(),
            self.field.epsilon(),
            seed,
            &self.params,
        )
    }
}
