use std::sync::Arc;

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::{build_covariance, kernel_at_distance, DyadicGrid, ScaleParameter};
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Largest resolution sampled by dense factorisation under [`SamplingMethod::auto`].
pub const DENSE_RESOLUTION_LIMIT: u32 = 12;

/// Default bound on the magnitude of clipped negative circulant eigenvalues.
pub const DEFAULT_CLIP_TOLERANCE: f64 = 1e-6;

/// Relative diagonal jitter added when the first factorisation attempt fails.
const JITTER: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingMethod {
    DenseFactorization,
    CirculantEmbedding,
}

impl SamplingMethod {
    /// Dense factorisation up to [`DENSE_RESOLUTION_LIMIT`], circulant embedding above.
    pub fn auto(grid: DyadicGrid) -> Self {
        if grid.resolution() <= DENSE_RESOLUTION_LIMIT {
            SamplingMethod::DenseFactorization
        } else {
            SamplingMethod::CirculantEmbedding
        }
    }

    pub(crate) fn code(self) -> u64 {
        match self {
            SamplingMethod::DenseFactorization => 0,
            SamplingMethod::CirculantEmbedding => 1,
        }
    }

    pub(crate) fn from_code(code: u64) -> Option<Self> {
        match code {
            0 => Some(SamplingMethod::DenseFactorization),
            1 => Some(SamplingMethod::CirculantEmbedding),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SamplerOptions {
    pub clip_tolerance: f64,
}

impl Default for SamplerOptions {
    fn default() -> Self {
        Self {
            clip_tolerance: DEFAULT_CLIP_TOLERANCE,
        }
    }
}

/// One realisation of the regularised field on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub grid: DyadicGrid,
    pub epsilon: ScaleParameter,
    pub values: Vec<f64>,
    pub seed: u64,
    pub method: SamplingMethod,
    /// Magnitude of the most negative eigenvalue clipped by circulant embedding.
    pub clip_magnitude: f64,
    /// Relative diagonal jitter used by dense factorisation (0 if none).
    pub jitter: f64,
}

enum Engine {
    Dense {
        factor: DMatrix<f64>,
    },
    Circulant {
        sqrt_eigenvalues: Vec<f64>,
        fft: Arc<dyn Fft<f64>>,
    },
}

/// Reusable sampler: the factorisation (or embedding spectrum) is computed
/// once and shared read-only between replicas and threads.
pub struct FieldSampler {
    grid: DyadicGrid,
    eps: ScaleParameter,
    method: SamplingMethod,
    engine: Engine,
    clip_magnitude: f64,
    jitter: f64,
}

impl std::fmt::Debug for FieldSampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FieldSampler")
            .field("grid", &self.grid)
            .field("eps", &self.eps)
            .field("method", &self.method)
            .field("clip_magnitude", &self.clip_magnitude)
            .field("jitter", &self.jitter)
            .finish()
    }
}

impl FieldSampler {
    pub fn new(grid: DyadicGrid, eps: ScaleParameter, method: SamplingMethod) -> Result<Self> {
        Self::with_options(grid, eps, method, SamplerOptions::default())
    }

    pub fn with_options(
        grid: DyadicGrid,
        eps: ScaleParameter,
        method: SamplingMethod,
        options: SamplerOptions,
    ) -> Result<Self> {
        match method {
            SamplingMethod::DenseFactorization => Self::dense(grid, eps),
            SamplingMethod::CirculantEmbedding => Self::circulant(grid, eps, options),
        }
    }

    fn dense(grid: DyadicGrid, eps: ScaleParameter) -> Result<Self> {
        let cov = build_covariance(grid, eps)?;
        let (factor, jitter) = match Cholesky::new(cov.clone()) {
            Some(c) => (c.l(), 0.0),
            None => {
                let mut jittered = cov.clone();
                for i in 0..jittered.nrows() {
                    jittered[(i, i)] *= 1.0 + JITTER;
                }
                match Cholesky::new(jittered) {
                    Some(c) => (c.l(), JITTER),
                    None => {
                        let min_eigenvalue = SymmetricEigen::new(cov)
                            .eigenvalues
                            .iter()
                            .copied()
                            .fold(f64::INFINITY, f64::min);
                        return Err(Error::NotPositiveDefinite { min_eigenvalue });
                    }
                }
            }
        };
        Ok(Self {
            grid,
            eps,
            method: SamplingMethod::DenseFactorization,
            engine: Engine::Dense { factor },
            clip_magnitude: 0.0,
            jitter,
        })
    }

    fn circulant(grid: DyadicGrid, eps: ScaleParameter, options: SamplerOptions) -> Result<Self> {
        let n = grid.len();
        let m = 2 * n;
        let h = grid.spacing();
        // first row of the circulant: c_k = K(k h) for k <= n, mirrored above.
        let mut row: Vec<Complex<f64>> = (0..m)
            .map(|k| {
                let lag = k.min(m - k);
                Complex::new(kernel_at_distance(lag as f64 * h, eps), 0.0)
            })
            .collect();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(m);
        fft.process(&mut row);

        let min_eigenvalue = row.iter().map(|c| c.re).fold(f64::INFINITY, f64::min);
        let clip_magnitude = (-min_eigenvalue).max(0.0);
        if clip_magnitude > options.clip_tolerance {
            return Err(Error::EmbeddingClip {
                magnitude: clip_magnitude,
                tolerance: options.clip_tolerance,
            });
        }
        let sqrt_eigenvalues = row
            .iter()
            .map(|c| (c.re.max(0.0) / m as f64).sqrt())
            .collect();
        Ok(Self {
            grid,
            eps,
            method: SamplingMethod::CirculantEmbedding,
            engine: Engine::Circulant {
                sqrt_eigenvalues,
                fft,
            },
            clip_magnitude,
            jitter: 0.0,
        })
    }

    pub fn grid(&self) -> DyadicGrid {
        self.grid
    }

    pub fn epsilon(&self) -> ScaleParameter {
        self.eps
    }

    pub fn method(&self) -> SamplingMethod {
        self.method
    }

    pub fn clip_magnitude(&self) -> f64 {
        self.clip_magnitude
    }

    /// Field values for `seed`, without the metadata wrapper.
    pub fn sample_values(&self, seed: u64) -> Vec<f64> {
        let mut rng = rng_from_seed(seed);
        match &self.engine {
            Engine::Dense { factor } => {
                let z = DVector::from_iterator(
                    factor.nrows(),
                    (0..factor.nrows()).map(|_| rng.sample::<f64, _>(StandardNormal)),
                );
                (factor * z).data.into()
            }
            Engine::Circulant {
                sqrt_eigenvalues,
                fft,
            } => {
                // Re(F (sqrt(λ/M) ξ)) with ξ complex standard normal has
                // covariance exactly the circulant row.
                let mut buf: Vec<Complex<f64>> = sqrt_eigenvalues
                    .iter()
                    .map(|&s| {
                        let a: f64 = rng.sample(StandardNormal);
                        let b: f64 = rng.sample(StandardNormal);
                        Complex::new(s * a, s * b)
                    })
                    .collect();
                fft.process(&mut buf);
                buf.truncate(self.grid.len());
                buf.into_iter().map(|c| c.re).collect()
            }
        }
    }

    pub fn sample(&self, seed: u64) -> FieldSample {
        FieldSample {
            grid: self.grid,
            epsilon: self.eps,
            values: self.sample_values(seed),
            seed,
            method: self.method,
            clip_magnitude: self.clip_magnitude,
            jitter: self.jitter,
        }
    }
}

/// Samples the field once. Build a [`FieldSampler`] instead when drawing many replicas.
pub fn sample_field(
    grid: DyadicGrid,
    eps: ScaleParameter,
    seed: u64,
    method: SamplingMethod,
) -> Result<FieldSample> {
    Ok(FieldSampler::new(grid, eps, method)?.sample(seed))
}

/// One draw of the coarse field value `X_I ~ N(0, 2 log(1/|I|))`.
pub fn sample_coarse_gaussian(interval_length: f64, seed: u64) -> Result<f64> {
    if !(interval_length > 0.0 && interval_length < 1.0) {
        return Err(Error::InvalidScale(format!(
            "interval length must lie in (0, 1), got {interval_length}"
        )));
    }
    let sd = (2.0 * (1.0 / interval_length).ln()).sqrt();
    let z: f64 = rng_from_seed(seed).sample(StandardNormal);
    Ok(sd * z)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(n: u32, m: u32) -> (DyadicGrid, ScaleParameter) {
        (
            DyadicGrid::new(n).unwrap(),
            ScaleParameter::from_exponent(m).unwrap(),
        )
    }

    #[test]
    fn sampling_is_deterministic() {
        let (g, e) = setup(6, 6);
        for method in [SamplingMethod::DenseFactorization, SamplingMethod::CirculantEmbedding] {
            let a = sample_field(g, e, 99, method).unwrap();
            let b = sample_field(g, e, 99, method).unwrap();
            assert_eq!(a, b);
            let c = sample_field(g, e, 100, method).unwrap();
            assert_ne!(a.values, c.values);
            assert_eq!(a.values.len(), 64);
            assert!(a.values.iter().all(|v| v.is_finite()));
        }
    }

    #[test]
    fn auto_method_switches_at_the_dense_limit() {
        let (g, _) = setup(DENSE_RESOLUTION_LIMIT, 1);
        assert_eq!(SamplingMethod::auto(g), SamplingMethod::DenseFactorization);
        let (g, _) = setup(DENSE_RESOLUTION_LIMIT + 1, 1);
        assert_eq!(SamplingMethod::auto(g), SamplingMethod::CirculantEmbedding);
    }

    #[test]
    fn embedding_spectrum_is_nonnegative() {
        for (n, m) in [(4, 4), (8, 8), (10, 6), (14, 14)] {
            let (g, e) = setup(n, m);
            let s = FieldSampler::new(g, e, SamplingMethod::CirculantEmbedding).unwrap();
            assert!(s.clip_magnitude() < 1e-9, "n={n} m={m}: {}", s.clip_magnitude());
        }
    }

    #[test]
    fn clip_tolerance_is_enforced() {
        let (g, e) = setup(8, 8);
        let opts = SamplerOptions {
            clip_tolerance: -1.0,
        };
        assert!(matches!(
            FieldSampler::with_options(g, e, SamplingMethod::CirculantEmbedding, opts),
            Err(Error::EmbeddingClip { .. })
        ));
    }

    #[test]
    fn coarse_gaussian_domain() {
        assert!(sample_coarse_gaussian(1.0, 1).is_err());
        assert!(sample_coarse_gaussian(0.0, 1).is_err());
        assert_eq!(
            sample_coarse_gaussian(0.25, 5).unwrap(),
            sample_coarse_gaussian(0.25, 5).unwrap()
        );
        assert!(sample_coarse_gaussian(1.0 - 1e-15, 3).unwrap().abs() < 1e-6);
    }
}
