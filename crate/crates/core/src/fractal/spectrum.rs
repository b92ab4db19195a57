use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::ols_slope;
use crate::welding::MonotoneMap;

/// Finest level at which local exponents are taken; beyond it dyadic
/// endpoints stop being exact in f64 arithmetic relative to cell sizes.
const MAX_EXPONENT_LEVEL: u32 = 40;

/// `log|map(I)| / log|I|` for each of the `2^n` level-`n` cells `I`.
pub fn local_exponents(map: &MonotoneMap, n: u32) -> Result<Vec<f64>> {
    if n == 0 || n > MAX_EXPONENT_LEVEL {
        return Err(Error::InvalidScale(format!(
            "exponent level must lie in 1..={MAX_EXPONENT_LEVEL}, got {n}"
        )));
    }
    let h = 0.5f64.powi(n as i32);
    let nf = f64::from(n);
    Ok((0..1usize << n)
        .map(|j| -map.image_length_unchecked(j as f64 * h, (j + 1) as f64 * h).log2() / nf)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LevelSide {
    /// exponent ≥ δ − bandwidth
    AtLeast,
    /// exponent ≤ δ + bandwidth
    AtMost,
    /// |exponent − δ| ≤ bandwidth
    Equal,
}

impl LevelSide {
    fn admits(self, exponent: f64, delta: f64, bandwidth: f64) -> bool {
        match self {
            LevelSide::AtLeast => exponent >= delta - bandwidth,
            LevelSide::AtMost => exponent <= delta + bandwidth,
            LevelSide::Equal => (exponent - delta).abs() <= bandwidth,
        }
    }
}

/// Level-set cell counts accumulated over replicas, before the slope fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumCounts {
    pub deltas: Vec<f64>,
    pub side: LevelSide,
    pub bandwidth: f64,
    pub scales: Vec<u32>,
    /// `counts[d][s]`: summed count for `deltas[d]` at `scales[s]`.
    pub counts: Vec<Vec<u64>>,
    pub replicas: usize,
}

impl SpectrumCounts {
    /// Adds another replica batch taken with identical parameters.
    pub fn merge(&mut self, other: &SpectrumCounts) -> Result<()> {
        if self.deltas != other.deltas
            || self.side != other.side
            || self.bandwidth != other.bandwidth
            || self.scales != other.scales
        {
            return Err(Error::invalid("counts", "cannot merge counts taken with different parameters"));
        }
        for (mine, theirs) in self.counts.iter_mut().zip(&other.counts) {
            for (a, b) in mine.iter_mut().zip(theirs) {
                *a += b;
            }
        }
        self.replicas += other.replicas;
        Ok(())
    }

    /// Fits `log2(mean count)` against `n` for each δ.
    pub fn estimate(&self) -> Result<SpectrumEstimate> {
        let reps = self.replicas.max(1) as f64;
        let mut points = Vec::with_capacity(self.deltas.len());
        for (&delta, row) in self.deltas.iter().zip(&self.counts) {
            let (xs, ys): (Vec<f64>, Vec<f64>) = self
                .scales
                .iter()
                .zip(row)
                .filter(|(_, &c)| c > 0)
                .map(|(&n, &c)| (f64::from(n), (c as f64 / reps).log2()))
                .unzip();
            let point = match xs.len() {
                0 => SpectrumPoint {
                    delta,
                    dimension: 0.0,
                    empty: true,
                    scales_used: 0,
                },
                1 | 2 => {
                    return Err(Error::InsufficientData(format!(
                        "level set near delta = {delta} is nonempty at only {} scale(s)",
                        xs.len()
                    )))
                }
                used => {
                    let slope = ols_slope(&xs, &ys).unwrap_or(0.0);
                    SpectrumPoint {
                        delta,
                        dimension: slope.clamp(0.0, 1.0),
                        empty: false,
                        scales_used: used,
                    }
                }
            };
            points.push(point);
        }
        Ok(SpectrumEstimate {
            side: self.side,
            bandwidth: self.bandwidth,
            scales: self.scales.clone(),
            replicas: self.replicas,
            points,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub delta: f64,
    /// Box-counting slope, clamped to `[0, 1]`.
    pub dimension: f64,
    /// No cell matched at any scale; `dimension` is then 0.
    pub empty: bool,
    pub scales_used: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEstimate {
    pub side: LevelSide,
    pub bandwidth: f64,
    pub scales: Vec<u32>,
    pub replicas: usize,
    pub points: Vec<SpectrumPoint>,
}

impl SpectrumEstimate {
    pub fn dimension(&self, delta: f64) -> Option<f64> {
        self.points.iter().find(|p| p.delta == delta).map(|p| p.dimension)
    }
}

fn validate(deltas: &[f64], n_max: u32, bandwidth: f64) -> Result<Vec<u32>> {
    if deltas.is_empty() {
        return Err(Error::invalid("deltas", "empty list"));
    }
    if let Some(d) = deltas.iter().find(|d| !(**d > 0.0 && **d < 4.0)) {
        return Err(Error::invalid("deltas", format!("{d} is outside (0, 4)")));
    }
    if !(bandwidth > 0.0) {
        return Err(Error::invalid("bandwidth", format!("must be positive, got {bandwidth}")));
    }
    if !(2..=MAX_EXPONENT_LEVEL).contains(&n_max) {
        return Err(Error::InvalidScale(format!("n_max must lie in 2..={MAX_EXPONENT_LEVEL}")));
    }
    Ok((n_max.div_ceil(2)..=n_max).collect())
}

/// Counts of level-`n` cells in each exponent level set, for `n` in `[n_max/2, n_max]`.
pub fn spectrum_counts(
    map: &MonotoneMap,
    deltas: &[f64],
    side: LevelSide,
    n_max: u32,
    bandwidth: f64,
) -> Result<SpectrumCounts> {
    let scales = validate(deltas, n_max, bandwidth)?;
    let mut counts = vec![vec![0u64; scales.len()]; deltas.len()];
    for (s, &n) in scales.iter().enumerate() {
        let exps = local_exponents(map, n)?;
        for (d, &delta) in deltas.iter().enumerate() {
            counts[d][s] = exps.iter().filter(|&&e| side.admits(e, delta, bandwidth)).count() as u64;
        }
    }
    Ok(SpectrumCounts {
        deltas: deltas.to_vec(),
        side,
        bandwidth,
        scales,
        counts,
        replicas: 1,
    })
}

pub fn spectrum_estimate(
    map: &MonotoneMap,
    deltas: &[f64],
    side: LevelSide,
    n_max: u32,
    bandwidth: f64,
) -> Result<SpectrumEstimate> {
    spectrum_counts(map, deltas, side, n_max, bandwidth)?.estimate()
}
