use serde::{Deserialize, Serialize};

use super::{GaugeFunction, IntervalSelection};
use crate::error::{Error, Result};
use crate::numeric::ols_slope;
use crate::welding::MonotoneMap;

/// `Σ lengths^alpha`.
pub fn covering_sum(lengths: &[f64], alpha: f64) -> f64 {
    lengths.iter().map(|l| l.powf(alpha)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleSum {
    pub n: u32,
    pub sum: f64,
    pub cells: usize,
}

/// Per-scale covering sums with a log-log trend.
///
/// `trend_slope` is the least-squares slope of `log(sum)` against
/// `n log 2 = log(1/scale)` over the scales with a positive sum, so a negative
/// slope means the sums shrink as the cells get finer. `vanished` records that
/// the sums drop to zero at the finest scales after being positive, and
/// `empty` that every sum is zero, so the covering proxy already vanishes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringReport {
    pub alpha: f64,
    pub sums: Vec<ScaleSum>,
    pub trend_slope: Option<f64>,
    pub vanished: bool,
    pub empty: bool,
}

impl CoveringReport {
    pub fn from_sums(alpha: f64, sums: Vec<ScaleSum>) -> Result<Self> {
        if sums.windows(2).any(|w| w[1].n <= w[0].n) {
            return Err(Error::invalid("scales", "must be strictly increasing"));
        }
        let positive: Vec<&ScaleSum> = sums.iter().filter(|s| s.sum > 0.0).collect();
        let xs: Vec<f64> = positive
            .iter()
            .map(|s| f64::from(s.n) * std::f64::consts::LN_2)
            .collect();
        let ys: Vec<f64> = positive.iter().map(|s| s.sum.ln()).collect();
        let trend_slope = ols_slope(&xs, &ys);
        let vanished = !positive.is_empty() && sums.last().is_some_and(|s| s.sum == 0.0);
        let empty = positive.is_empty();
        Ok(Self {
            alpha,
            sums,
            trend_slope,
            vanished,
            empty,
        })
    }

    pub fn is_decreasing(&self) -> bool {
        self.vanished || self.empty || self.trend_slope.is_some_and(|s| s < 0.0)
    }

    pub fn is_non_decreasing(&self) -> bool {
        !self.vanished && !self.empty && self.trend_slope.is_some_and(|s| s >= 0.0)
    }
}

fn cell_image(map: &MonotoneMap, n: u32, j: usize) -> f64 {
    let h = 0.5f64.powi(n as i32);
    map.image_length_unchecked(j as f64 * h, (j + 1) as f64 * h)
}

/// Covering sums `Σ_{I selected} |h₊(I)|^alpha` for a family of selections at increasing scales.
pub fn image_covering_report(
    h_plus: &MonotoneMap,
    selections: &[IntervalSelection],
    alpha: f64,
) -> Result<CoveringReport> {
    let sums = selections
        .iter()
        .map(|sel| {
            let lengths: Vec<f64> = sel
                .indices()
                .iter()
                .map(|&j| cell_image(h_plus, sel.resolution(), j))
                .collect();
            ScaleSum {
                n: sel.resolution(),
                sum: covering_sum(&lengths, alpha),
                cells: lengths.len(),
            }
        })
        .collect();
    CoveringReport::from_sums(alpha, sums)
}

/// Covering sums over the cells with `f_k(|I|) < |h₊(I)|` and `|h(I)| >= |h₊(I)|^(1/2 + eta)`.
pub fn intersection_covering_report(
    h_plus: &MonotoneMap,
    h: &MonotoneMap,
    k: f64,
    eta: f64,
    alpha: f64,
    scales: &[u32],
) -> Result<CoveringReport> {
    if !(k > 0.5) {
        return Err(Error::invalid("k", format!("must exceed 1/2, got {k}")));
    }
    if !(eta > 0.0) {
        return Err(Error::invalid("eta", format!("must be positive, got {eta}")));
    }
    let gauge = GaugeFunction::log_power(k)?;
    let mut sums = Vec::with_capacity(scales.len());
    for &n in scales {
        if n == 0 {
            return Err(Error::invalid("scales", "level 0 has no gauge value"));
        }
        let threshold = gauge.eval(0.5f64.powi(n as i32));
        let mut lengths = Vec::new();
        for j in 0..1usize << n {
            let lp = cell_image(h_plus, n, j);
            if lp > threshold && cell_image(h, n, j) >= lp.powf(0.5 + eta) {
                lengths.push(lp);
            }
        }
        sums.push(ScaleSum {
            n,
            sum: covering_sum(&lengths, alpha),
            cells: lengths.len(),
        });
    }
    CoveringReport::from_sums(alpha, sums)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaos::DyadicMeasure;
    use crate::fractal::exceptional_intervals;
    use proptest::prelude::*;

    #[test]
    fn covering_sum_basics() {
        let n = 7;
        let lengths = vec![0.5f64.powi(n); 1 << n];
        assert!((covering_sum(&lengths, 1.0) - 1.0).abs() < 1e-15);
        assert_eq!(covering_sum(&[], 0.7), 0.0);
        assert_eq!(covering_sum(&[0.1, 0.2, 0.3], 0.0), 3.0);
    }

    #[test]
    fn identity_covering_reports() {
        let id = MonotoneMap::identity(10);
        let empty: Vec<IntervalSelection> = (2..8).map(IntervalSelection::empty).collect();
        let r = image_covering_report(&id, &empty, 0.5).unwrap();
        assert!(r.sums.iter().all(|s| s.sum == 0.0));
        assert!(r.trend_slope.is_none() && r.empty);
        assert!(r.is_decreasing() && !r.is_non_decreasing());

        let full: Vec<IntervalSelection> = (2..8).map(IntervalSelection::all).collect();
        let r = image_covering_report(&id, &full, 1.0).unwrap();
        assert!(r.sums.iter().all(|s| (s.sum - 1.0).abs() < 1e-12));
        assert!(r.trend_slope.unwrap().abs() < 1e-10);

        let bad: Vec<IntervalSelection> = vec![IntervalSelection::all(4), IntervalSelection::all(3)];
        assert!(image_covering_report(&id, &bad, 1.0).is_err());
    }

    #[test]
    fn identity_intersection_vanishes() {
        let id = MonotoneMap::identity(12);
        let scales: Vec<u32> = (4..=12).collect();
        let r = intersection_covering_report(&id, &id, 1.0, 0.05, 0.2, &scales).unwrap();
        // f_1(2^-n) = 1/(n log 2) exceeds 2^-n from n = 1 on
        assert!(r.sums.iter().all(|s| s.sum == 0.0));
        assert!(intersection_covering_report(&id, &id, 0.5, 0.05, 0.2, &scales).is_err());
        assert!(intersection_covering_report(&id, &id, 1.0, 0.0, 0.2, &scales).is_err());
    }

    #[test]
    fn zero_alpha_counts_cells() {
        let masses: Vec<f64> = (0..256).map(|j| if j % 17 == 0 { 1.0 } else { 1e-4 }).collect();
        let mu = DyadicMeasure::from_masses(masses, crate::chaos::Provenance::Synthetic { tag: "z".into() })
            .unwrap()
            .normalized()
            .unwrap();
        let h = crate::welding::cdf(&mu).unwrap();
        let scales = [3, 4, 5];
        let r = intersection_covering_report(&h, &h, 1.0, 0.05, 0.0, &scales).unwrap();
        for s in &r.sums {
            assert_eq!(s.sum, s.cells as f64);
        }
        let sels: Vec<_> = scales
            .iter()
            .map(|&n| exceptional_intervals(&mu, &GaugeFunction::log_power(1.0).unwrap(), n).unwrap())
            .collect();
        let r = image_covering_report(&h, &sels, 0.0).unwrap();
        for (s, sel) in r.sums.iter().zip(&sels) {
            assert_eq!(s.sum, sel.len() as f64);
        }
    }

    #[test]
    fn vanishing_counts_as_decreasing() {
        let sums = vec![
            ScaleSum { n: 4, sum: 0.5, cells: 1 },
            ScaleSum { n: 5, sum: 0.6, cells: 1 },
            ScaleSum { n: 6, sum: 0.0, cells: 0 },
        ];
        let r = CoveringReport::from_sums(0.5, sums).unwrap();
        assert!(r.vanished && r.is_decreasing() && !r.is_non_decreasing());
    }

    proptest! {
        #[test]
        fn covering_sum_monotone_in_alpha(
            lengths in prop::collection::vec(1e-9f64..=1.0, 0..50),
            a in 0.0f64..2.0,
            b in 0.0f64..2.0,
        ) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(covering_sum(&lengths, lo) >= covering_sum(&lengths, hi) * (1.0 - 1e-12));
        }
    }
}
