use serde::{Deserialize, Serialize};

use super::GaugeFunction;
use crate::chaos::DyadicMeasure;
use crate::error::{Error, Result};
use crate::numeric::dyadic_sum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParityFilter {
    All,
    Even,
}

/// A set of level-n dyadic cells, stored as sorted distinct indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalSelection {
    resolution: u32,
    selected: Vec<usize>,
    parity_filter: ParityFilter,
}

impl IntervalSelection {
    pub fn new(resolution: u32, mut indices: Vec<usize>, parity_filter: ParityFilter) -> Result<Self> {
        if resolution > crate::logfield::MAX_RESOLUTION {
            return Err(Error::invalid("resolution", "too fine"));
        }
        indices.sort_unstable();
        indices.dedup();
        if let Some(&j) = indices.last() {
            if j >= 1usize << resolution {
                return Err(Error::invalid(
                    "selection",
                    format!("index {j} out of range at level {resolution}"),
                ));
            }
        }
        if parity_filter == ParityFilter::Even && indices.iter().any(|j| j % 2 == 1) {
            return Err(Error::invalid("selection", "odd index under the even filter"));
        }
        Ok(Self {
            resolution,
            selected: indices,
            parity_filter,
        })
    }

    pub fn all(resolution: u32) -> Self {
        Self {
            resolution,
            selected: (0..1usize << resolution).collect(),
            parity_filter: ParityFilter::All,
        }
    }

    pub fn empty(resolution: u32) -> Self {
        Self {
            resolution,
            selected: Vec::new(),
            parity_filter: ParityFilter::All,
        }
    }

    /// The even cells `[2j 2^-n, (2j+1) 2^-n)`.
    pub fn even(resolution: u32) -> Self {
        Self {
            resolution,
            selected: (0..1usize << resolution).step_by(2).collect(),
            parity_filter: ParityFilter::Even,
        }
    }

    pub fn single(resolution: u32, index: usize) -> Result<Self> {
        Self::new(resolution, vec![index], ParityFilter::All)
    }

    /// Level-`resolution` cells meeting the quarter Cantor set of the given
    /// depth: at each of the first `depth` base-4 digits only 0 and 3 are kept.
    /// Its limit has dimension 1/2.
    pub fn cantor_quarters(resolution: u32, depth: u32) -> Result<Self> {
        let depth = depth.min(resolution / 2);
        let cells = 1usize << resolution;
        let shift = resolution - 2 * depth;
        let selected = (0..cells)
            .filter(|&j| {
                let prefix = j >> shift;
                (0..depth).all(|d| matches!((prefix >> (2 * d)) & 3, 0 | 3))
            })
            .collect();
        Self::new(resolution, selected, ParityFilter::All)
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn indices(&self) -> &[usize] {
        &self.selected
    }

    pub fn parity_filter(&self) -> ParityFilter {
        self.parity_filter
    }

    pub fn len(&self) -> usize {
        self.selected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.selected.binary_search(&index).is_ok()
    }

    /// Cells of the same level not in the selection (respecting the parity filter).
    pub fn complement(&self) -> Self {
        let step = match self.parity_filter {
            ParityFilter::All => 1,
            ParityFilter::Even => 2,
        };
        let selected = (0..1usize << self.resolution)
            .step_by(step)
            .filter(|j| !self.contains(*j))
            .collect();
        Self {
            resolution: self.resolution,
            selected,
            parity_filter: self.parity_filter,
        }
    }
}

/// `E_n^f`: the level-n cells `I` with `μ(I) >= f(|I|)`.
pub fn exceptional_intervals(
    measure: &DyadicMeasure,
    f: &GaugeFunction,
    n: u32,
) -> Result<IntervalSelection> {
    if n == 0 || n > measure.resolution() {
        return Err(Error::ResolutionMismatch(format!(
            "level {n} outside 1..={}",
            measure.resolution()
        )));
    }
    let threshold = f.eval(0.5f64.powi(n as i32));
    let coarse = measure.coarsen(n)?;
    let selected = coarse
        .masses()
        .iter()
        .enumerate()
        .filter(|(_, &m)| m >= threshold)
        .map(|(j, _)| j)
        .collect();
    Ok(IntervalSelection {
        resolution: n,
        selected,
        parity_filter: ParityFilter::All,
    })
}

/// `S_n = Σ_{I even} (sqrt(n) μ(I))^β` over the even level-n cells.
pub fn partition_sum(measure: &DyadicMeasure, n: u32, beta: f64) -> Result<f64> {
    if n == 0 || n > measure.resolution() {
        return Err(Error::ResolutionMismatch(format!(
            "level {n} outside 1..={}",
            measure.resolution()
        )));
    }
    if !(beta >= 0.0) {
        return Err(Error::invalid("beta", format!("must be nonnegative, got {beta}")));
    }
    let root = f64::from(n).sqrt();
    let coarse = measure.coarsen(n)?;
    let terms: Vec<f64> = coarse
        .masses()
        .iter()
        .step_by(2)
        .map(|m| (root * m).powf(beta))
        .collect();
    Ok(dyadic_sum(&terms))
}
