//! Monotone piecewise-linear maps of [0, 1]: the homeomorphisms `h₊`, `h₋`
//! induced by chaos measures, their inverses, and compositions such as the
//! welding map `h = h₋⁻¹ ∘ h₊`.
//!
//! A [`MonotoneMap`] keeps, next to its breakpoints and values, the exact
//! positive run and rise of every linear segment. Critical chaos produces
//! cells whose mass is far below the spacing of doubles near 1/2, so the
//! rounded cumulative values may repeat while the underlying map is still
//! strictly increasing; lengths of images are computed from the rises and
//! never by subtracting nearly equal values.

mod io;

pub use io::{read_csv, write_csv};

use serde::{Deserialize, Serialize};

use crate::chaos::DyadicMeasure;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneMap {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    runs: Vec<f64>,
    rises: Vec<f64>,
}

fn cumulative(steps: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(steps.len() + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for s in steps {
        acc += s;
        out.push(acc.min(1.0));
    }
    *out.last_mut().expect("nonempty") = 1.0;
    out
}

fn check_steps(name: &'static str, steps: &[f64]) -> Result<()> {
    if steps.is_empty() {
        return Err(Error::DegenerateMap(format!("{name}: no segments")));
    }
    if let Some((i, s)) = steps
        .iter()
        .enumerate()
        .find(|(_, s)| !(s.is_finite() && **s > 0.0))
    {
        return Err(Error::DegenerateMap(format!(
            "{name}: segment {i} has non-positive length {s}"
        )));
    }
    let total: f64 = steps.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::DegenerateMap(format!(
            "{name}: segments sum to {total}, not 1"
        )));
    }
    Ok(())
}

impl MonotoneMap {
    /// Builds a map from strictly increasing breakpoints and values running from 0 to 1.
    pub fn from_points(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.len() != values.len() || breakpoints.len() < 2 {
            return Err(Error::DegenerateMap(
                "need at least two breakpoints and as many values".into(),
            ));
        }
        for (name, v) in [("breakpoints", &breakpoints), ("values", &values)] {
            if v[0] != 0.0 || *v.last().unwrap() != 1.0 {
                return Err(Error::DegenerateMap(format!("{name} must run from 0 to 1")));
            }
            if let Some(w) = v.windows(2).find(|w| !(w[1] > w[0])) {
                return Err(Error::DegenerateMap(format!(
                    "{name} not strictly increasing at {} -> {}",
                    w[0], w[1]
                )));
            }
        }
        let diffs = |v: &[f64]| v.windows(2).map(|w| w[1] - w[0]).collect::<Vec<_>>();
        Ok(Self {
            runs: diffs(&breakpoints),
            rises: diffs(&values),
            breakpoints,
            values,
        })
    }

    /// Builds a map from positive segment runs and rises, each summing to 1.
    pub fn from_increments(runs: Vec<f64>, rises: Vec<f64>) -> Result<Self> {
        if runs.len() != rises.len() {
            return Err(Error::DegenerateMap("runs and rises differ in length".into()));
        }
        check_steps("runs", &runs)?;
        check_steps("rises", &rises)?;
        Ok(Self {
            breakpoints: cumulative(&runs),
            values: cumulative(&rises),
            runs,
            rises,
        })
    }

    /// The identity with breakpoints at the level-n dyadic points.
    pub fn identity(resolution: u32) -> Self {
        let h = 0.5f64.powi(resolution as i32);
        let cells = 1usize << resolution;
        let points: Vec<f64> = (0..=cells).map(|j| j as f64 * h).collect();
        Self {
            breakpoints: points.clone(),
            values: points,
            runs: vec![h; cells],
            rises: vec![h; cells],
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Exact image length of each segment.
    pub fn rises(&self) -> &[f64] {
        &self.rises
    }

    pub fn runs(&self) -> &[f64] {
        &self.runs
    }

    pub fn segments(&self) -> usize {
        self.runs.len()
    }

    /// Segment containing `x` and the fractional position inside it.
    fn locate(&self, x: f64) -> (usize, f64) {
        let last = self.breakpoints.len() - 1;
        if x >= self.breakpoints[last] {
            return (last - 1, 1.0);
        }
        if x <= 0.0 {
            return (0, 0.0);
        }
        let i = self.breakpoints.partition_point(|&b| b <= x) - 1;
        let width = self.breakpoints[i + 1] - self.breakpoints[i];
        (i, (x - self.breakpoints[i]) / width)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (i, t) = self.locate(x);
        if t == 0.0 {
            return self.values[i];
        }
        if t == 1.0 {
            return self.values[i + 1];
        }
        (self.values[i] + t * self.rises[i]).min(self.values[i + 1])
    }

    /// Local slope of the segment containing `x`.
    pub fn slope_at(&self, x: f64) -> f64 {
        let (i, _) = self.locate(x);
        self.rises[i] / self.runs[i]
    }

    /// `|map([a, b])| = map(b) - map(a)`, computed from segment rises.
    pub fn image_length(&self, a: f64, b: f64) -> Result<f64> {
        if !(a < b) {
            return Err(Error::invalid(
                "interval",
                format!("need a < b, got [{a}, {b}]"),
            ));
        }
        Ok(self.image_length_unchecked(a.max(0.0), b.min(1.0)))
    }

    /// Position `(segment, fraction)` of the point lying `offset` beyond the
    /// double `x`, where `offset` may be far below the spacing of doubles at
    /// `x`. Segments of zero double width starting at `x` are walked through
    /// using their exact runs.
    fn position_after(&self, x: f64, offset: f64) -> (usize, f64) {
        let segments = self.segments();
        let t = self.breakpoints.partition_point(|&bp| bp < x);
        if t == 0 {
            return (0, 0.0);
        }
        if t > segments || (t == segments && self.breakpoints[t] == x) {
            return (segments - 1, 1.0);
        }
        if self.breakpoints[t] != x {
            let i = t - 1;
            let width = self.breakpoints[t] - self.breakpoints[i];
            return (i, ((x - self.breakpoints[i]) / width).min(1.0));
        }
        let mut k = t;
        let mut acc = 0.0;
        while k + 1 < segments && self.breakpoints[k + 1] == x && offset >= acc + self.runs[k] {
            acc += self.runs[k];
            k += 1;
        }
        (k, ((offset - acc) / self.runs[k]).clamp(0.0, 1.0))
    }

    /// Position of `x` taken as the end of everything below it: a point equal
    /// to several stalled breakpoints sits before the stall.
    fn position_before(&self, x: f64) -> (usize, f64) {
        let segments = self.segments();
        let t = self.breakpoints.partition_point(|&bp| bp < x);
        if t == 0 {
            return (0, 0.0);
        }
        if t > segments {
            return (segments - 1, 1.0);
        }
        let i = t - 1;
        let width = self.breakpoints[t] - self.breakpoints[i];
        (i, ((x - self.breakpoints[i]) / width).min(1.0))
    }

    /// Image length of `[x + offset, b]`, see [`Self::position_after`].
    fn image_between(&self, a: f64, offset: f64, b: f64) -> f64 {
        let (ia, ta) = self.position_after(a, offset);
        let (ib, tb) = self.position_before(b);
        if ib < ia {
            return 0.0;
        }
        if ia == ib {
            if offset == 0.0 || self.breakpoints[ia] != a {
                let width = self.breakpoints[ia + 1] - self.breakpoints[ia];
                return self.rises[ia] * ((b - a) / width).min(1.0);
            }
            return self.rises[ia] * (tb - ta).max(0.0);
        }
        let inner: f64 = self.rises[ia + 1..ib].iter().sum();
        self.rises[ia] * (1.0 - ta) + inner + self.rises[ib] * tb
    }

    pub(crate) fn image_length_unchecked(&self, a: f64, b: f64) -> f64 {
        self.image_between(a, 0.0, b)
    }

    /// Local slope at the point lying `offset` beyond `x`.
    fn slope_after(&self, x: f64, offset: f64) -> f64 {
        let (k, _) = self.position_after(x, offset);
        self.rises[k] / self.runs[k]
    }

    /// Exchanges the roles of breakpoints and values.
    pub fn invert(&self) -> MonotoneMap {
        MonotoneMap {
            breakpoints: self.values.clone(),
            values: self.breakpoints.clone(),
            runs: self.rises.clone(),
            rises: self.runs.clone(),
        }
    }

    /// `outer ∘ inner`, on the breakpoints of `inner`.
    pub fn compose(outer: &MonotoneMap, inner: &MonotoneMap) -> MonotoneMap {
        let values: Vec<f64> = inner.values.iter().map(|&y| outer.eval(y)).collect();
        let mut rises = Vec::with_capacity(inner.segments());
        // exact distance of the current segment start beyond the double `inner.values[i]`
        let mut offset = 0.0;
        for i in 0..inner.segments() {
            let (a, b) = (inner.values[i], inner.values[i + 1]);
            if i > 0 && inner.values[i - 1] != a {
                offset = 0.0;
            }
            let mut len = 0.0;
            if a < b {
                len = outer.image_between(a, offset, b);
            }
            if len <= 0.0 {
                // below double resolution: linearise the outer map at the exact position
                len = outer.slope_after(a, offset) * inner.rises[i];
            }
            if a == b {
                offset += inner.rises[i];
            }
            rises.push(len);
        }
        MonotoneMap {
            breakpoints: inner.breakpoints.clone(),
            values,
            runs: inner.runs.clone(),
            rises,
        }
    }
}

/// The normalised cumulative mass function `x -> μ[0, x] / μ[0, 1]`.
pub fn cdf(measure: &DyadicMeasure) -> Result<MonotoneMap> {
    let total = measure.total();
    if !(total > 0.0) {
        return Err(Error::DegenerateMap(format!("measure has total {total}")));
    }
    if let Some(j) = measure.masses().iter().position(|&m| m <= 0.0) {
        return Err(Error::DegenerateMap(format!("cell {j} has zero mass")));
    }
    let h = measure.cell_length();
    let cells = measure.masses().len();
    let breakpoints: Vec<f64> = (0..=cells).map(|j| j as f64 * h).collect();
    let rises: Vec<f64> = measure.masses().iter().map(|m| m / total).collect();
    Ok(MonotoneMap {
        breakpoints,
        values: cumulative(&rises),
        runs: vec![h; cells],
        rises,
    })
}

pub fn invert(map: &MonotoneMap) -> MonotoneMap {
    map.invert()
}

pub fn compose(outer: &MonotoneMap, inner: &MonotoneMap) -> MonotoneMap {
    MonotoneMap::compose(outer, inner)
}

pub fn image_length(map: &MonotoneMap, a: f64, b: f64) -> Result<f64> {
    map.image_length(a, b)
}

/// The welding homeomorphism `h₋⁻¹ ∘ h₊` of two measures.
pub fn welding_map(plus: &DyadicMeasure, minus: &DyadicMeasure) -> Result<MonotoneMap> {
    let h_plus = cdf(plus)?;
    let h_minus = cdf(minus)?;
    Ok(compose(&h_minus.invert(), &h_plus))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaos::Provenance;
    use rand::{Rng, SeedableRng};

    fn two_cell() -> MonotoneMap {
        let mu = DyadicMeasure::from_masses(
            vec![0.75, 0.25],
            Provenance::Synthetic { tag: "t".into() },
        )
        .unwrap();
        cdf(&mu).unwrap()
    }

    #[test]
    fn lebesgue_cdf_is_identity() {
        let m = cdf(&DyadicMeasure::lebesgue(6).unwrap()).unwrap();
        assert_eq!(m, MonotoneMap::identity(6));
        for x in [0.0, 0.1, 0.5, 0.77, 1.0] {
            assert_eq!(m.eval(x), x);
        }
    }

    #[test]
    fn two_cell_map_and_inverse() {
        let m = two_cell();
        assert_eq!(m.eval(0.5), 0.75);
        assert_eq!(m.eval(1.0), 1.0);
        assert!((m.eval(0.25) - 0.375).abs() < 1e-15);
        let inv = m.invert();
        assert!((inv.eval(0.6) - 0.4).abs() < 1e-15);
        assert_eq!(inv.invert(), m);
    }

    #[test]
    fn zero_mass_cells_are_degenerate() {
        let mu = DyadicMeasure::from_masses(
            vec![0.5, 0.0, 0.5, 0.0],
            Provenance::Synthetic { tag: "t".into() },
        )
        .unwrap();
        assert!(matches!(cdf(&mu), Err(Error::DegenerateMap(_))));
        assert!(MonotoneMap::from_points(vec![0.0, 0.5, 1.0], vec![0.0, 0.0, 1.0]).is_err());
        assert!(MonotoneMap::from_points(vec![0.0, 0.5, 0.9], vec![0.0, 0.2, 1.0]).is_err());
    }

    #[test]
    fn composition_identities() {
        let m = two_cell();
        let id = MonotoneMap::identity(1);
        let c = compose(&id, &m);
        for x in [0.0, 0.2, 0.5, 0.9, 1.0] {
            assert!((c.eval(x) - m.eval(x)).abs() < 1e-15);
        }
        let cancel = compose(&m.invert(), &m);
        for (b, v) in cancel.breakpoints().iter().zip(cancel.values()) {
            assert!((b - v).abs() < 1e-12);
        }
    }

    #[test]
    fn image_lengths() {
        let id = MonotoneMap::identity(4);
        assert!((id.image_length(0.2, 0.5).unwrap() - 0.3).abs() < 1e-15);
        assert_eq!(id.image_length(0.0, 1.0).unwrap(), 1.0);
        assert!(id.image_length(0.5, 0.5).is_err());
        assert!(id.image_length(0.6, 0.5).is_err());

        let m = two_cell();
        let ab = m.image_length(0.1, 0.6).unwrap();
        let bc = m.image_length(0.6, 0.9).unwrap();
        let ac = m.image_length(0.1, 0.9).unwrap();
        assert!((ab + bc - ac).abs() < 1e-15);
    }

    #[test]
    fn round_trip_on_random_points() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let masses: Vec<f64> = (0..256).map(|_| rng.random::<f64>() + 1e-3).collect();
        let mu = DyadicMeasure::from_masses(masses, Provenance::Synthetic { tag: "r".into() }).unwrap();
        let m = cdf(&mu).unwrap();
        let back = m.invert().invert();
        for _ in 0..100 {
            let x: f64 = rng.random();
            assert_eq!(back.eval(x), m.eval(x));
        }
    }

    #[test]
    fn tiny_cells_keep_positive_image_lengths() {
        // masses spanning 40 orders of magnitude: cumulative values stall in f64
        let mut masses = vec![1.0; 64];
        for j in (1..64).step_by(3) {
            masses[j] = 1e-40;
        }
        let mu = DyadicMeasure::from_masses(masses, Provenance::Synthetic { tag: "s".into() }).unwrap();
        let m = cdf(&mu).unwrap();
        let h = 1.0 / 64.0;
        let tiny = m.image_length(h, 2.0 * h).unwrap();
        assert!(tiny > 0.0 && (tiny / (1e-40 / mu.total()) - 1.0).abs() < 1e-12);
        let inv = m.invert();
        let back = compose(&inv, &m);
        assert!(back.rises().iter().all(|&r| r > 0.0));
        for (r, run) in back.rises().iter().zip(back.runs()) {
            assert!((r / run - 1.0).abs() < 1e-9, "{r} {run} {:?}", back.rises());
        }
    }
}
