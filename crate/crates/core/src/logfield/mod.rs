//! The regularised log-correlated Gaussian field on dyadic grids.
//!
//! The field `X_ε` is centred with covariance
//!
//! ```text
//! E[X_ε(x) X_ε(y)] = 2 log(1/|x-y|)                 if ε <= |x-y| <= 1
//!                  = 2 (log(1/ε) + 1 - |x-y|/ε)      if |x-y| < ε
//! ```
//!
//! which is the exactly scale-invariant kernel truncated at unit range. It is
//! evaluated at the midpoints of the dyadic cells of a [`DyadicGrid`].

mod dump;
mod sampler;

pub use dump::{read_binary, write_binary};
pub use sampler::{
    sample_coarse_gaussian, sample_field, FieldSample, FieldSampler, SamplerOptions,
    SamplingMethod, DEFAULT_CLIP_TOLERANCE, DENSE_RESOLUTION_LIMIT,
};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finest resolution supported by the grids (2^24 cells).
pub const MAX_RESOLUTION: u32 = 24;

/// The 2^n midpoints `(j + 1/2) 2^-n` of the level-n dyadic cells of [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DyadicGrid {
    resolution: u32,
}

impl DyadicGrid {
    pub fn new(resolution: u32) -> Result<Self> {
        if resolution == 0 || resolution > MAX_RESOLUTION {
            return Err(Error::invalid(
                "resolution",
                format!("must lie in 1..={MAX_RESOLUTION}, got {resolution}"),
            ));
        }
        Ok(Self { resolution })
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    /// Number of cells, 2^n.
    pub fn len(&self) -> usize {
        1usize << self.resolution
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Cell length 2^-n.
    pub fn spacing(&self) -> f64 {
        0.5f64.powi(self.resolution as i32)
    }

    pub fn point(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.point(j)).collect()
    }
}

/// Regularisation scale ε = 2^-m.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ScaleParameter {
    exponent: u32,
}

impl ScaleParameter {
    pub fn from_exponent(exponent: u32) -> Result<Self> {
        if exponent > 52 {
            return Err(Error::InvalidScale(format!(
                "exponent {exponent} is below double precision resolution"
            )));
        }
        Ok(Self { exponent })
    }

    /// The exponent m in ε = 2^-m.
    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn epsilon(&self) -> f64 {
        0.5f64.powi(self.exponent as i32)
    }

    /// log(1/ε) = m log 2.
    pub fn log_inverse(&self) -> f64 {
        f64::from(self.exponent) * std::f64::consts::LN_2
    }

    /// One-point variance of the regularised field, 2 (log(1/ε) + 1).
    pub fn point_variance(&self) -> f64 {
        2.0 * (self.log_inverse() + 1.0)
    }
}

/// Covariance of the regularised field as a function of the separation `r = |x - y|`.
pub fn kernel_at_distance(r: f64, eps: ScaleParameter) -> f64 {
    let e = eps.epsilon();
    if r >= e {
        -2.0 * r.ln()
    } else {
        2.0 * (eps.log_inverse() + 1.0 - r / e)
    }
}

/// `E[X_ε(x) X_ε(y)]` for `x, y` in [0, 1].
pub fn regularized_covariance(x: f64, y: f64, eps: ScaleParameter) -> f64 {
    kernel_at_distance((x - y).abs(), eps)
}

/// Dense covariance matrix of the field on `grid`.
///
/// Entries depend only on `|i - j|` and are tabulated once, so the result is
/// exactly symmetric.
pub fn build_covariance(grid: DyadicGrid, eps: ScaleParameter) -> Result<DMatrix<f64>> {
    if grid.resolution() > DENSE_RESOLUTION_LIMIT {
        return Err(Error::DenseCapacity {
            requested: grid.resolution(),
            limit: DENSE_RESOLUTION_LIMIT,
        });
    }
    let h = grid.spacing();
    let table: Vec<f64> = (0..grid.len())
        .map(|k| kernel_at_distance(k as f64 * h, eps))
        .collect();
    let n = grid.len();
    Ok(DMatrix::from_fn(n, n, |i, j| table[i.abs_diff(j)]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::LN_2;

    fn eps(m: u32) -> ScaleParameter {
        ScaleParameter::from_exponent(m).unwrap()
    }

    #[test]
    fn kernel_branches() {
        let far = regularized_covariance(0.25, 0.75, ScaleParameter::from_exponent(6).unwrap());
        assert!((far - 2.0 * LN_2).abs() < 1e-15);
        assert!((far - 1.386294).abs() < 1e-6);

        let diag = regularized_covariance(0.3, 0.3, eps(10));
        assert!((diag - 2.0 * (10.0 * LN_2 + 1.0)).abs() < 1e-12);
        assert!((diag - 15.86294).abs() < 1e-5);

        // both branches meet at |x - y| = ε
        let e = eps(5);
        let at = kernel_at_distance(e.epsilon(), e);
        let below = 2.0 * (e.log_inverse() + 1.0 - 1.0);
        assert!((at - below).abs() < 1e-12);
        assert!((at - 2.0 * e.log_inverse()).abs() < 1e-12);
    }

    #[test]
    fn small_covariances() {
        let g = DyadicGrid::new(1).unwrap();
        assert_eq!(g.points(), vec![0.25, 0.75]);
        let c = build_covariance(g, eps(0)).unwrap();
        assert_eq!(c[(0, 0)], 2.0);
        assert!((c[(0, 1)] - 1.0).abs() < 1e-15);

        let c = build_covariance(g, eps(1)).unwrap();
        assert!((c[(0, 1)] - 2.0 * LN_2).abs() < 1e-15);

        let g = DyadicGrid::new(6).unwrap();
        let c = build_covariance(g, eps(6)).unwrap();
        assert_eq!(c, c.transpose());
        for i in 0..g.len() {
            assert!((c[(i, i)] - eps(6).point_variance()).abs() < 1e-12);
        }
    }

    #[test]
    fn dense_capacity_is_reported() {
        let g = DyadicGrid::new(DENSE_RESOLUTION_LIMIT + 1).unwrap();
        match build_covariance(g, eps(4)) {
            Err(Error::DenseCapacity { limit, .. }) => assert_eq!(limit, DENSE_RESOLUTION_LIMIT),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn invalid_grid_and_scale() {
        assert!(DyadicGrid::new(0).is_err());
        assert!(DyadicGrid::new(MAX_RESOLUTION + 1).is_err());
        assert!(ScaleParameter::from_exponent(60).is_err());
        assert_eq!(eps(0).epsilon(), 1.0);
    }

    proptest! {
        #[test]
        fn kernel_is_symmetric_and_continuous(x in 0.0f64..=1.0, y in 0.0f64..=1.0, m in 0u32..20) {
            let e = eps(m);
            prop_assert_eq!(regularized_covariance(x, y, e), regularized_covariance(y, x, e));
            let r = e.epsilon();
            let lo = kernel_at_distance(r * (1.0 - 1e-13), e);
            let hi = kernel_at_distance(r, e);
            prop_assert!((lo - hi).abs() < 1e-12);
        }
    }
}
