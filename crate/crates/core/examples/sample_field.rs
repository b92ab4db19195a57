//! Draws the regularised log-correlated field with both samplers and compares
//! the empirical variance with `2 (log 1/ε + 1)`.

use chaoslab::logfield::{regularized_covariance, DyadicGrid, FieldSampler, SamplingMethod, ScaleParameter};
use chaoslab::rng::derive_seed;

fn main() -> chaoslab::Result<()> {
    let grid = DyadicGrid::new(8)?;
    let eps = ScaleParameter::from_exponent(8)?;
    println!("ε = {}, kernel at distance 0: {:.6}", eps.epsilon(), regularized_covariance(0.3, 0.3, eps));
    for method in [SamplingMethod::DenseFactorization, SamplingMethod::CirculantEmbedding] {
        let sampler = FieldSampler::new(grid, eps, method)?;
        let replicas = 2000;
        let mut sum_sq = 0.0;
        for r in 0..replicas {
            let sample = sampler.sample(derive_seed(7, "example/field", r));
            sum_sq += sample.values[100] * sample.values[100];
        }
        println!(
            "{method:?}: variance at x = {:.4} is {:.3} (kernel {:.3}), clip {:e}",
            grid.point(100),
            sum_sq / replicas as f64,
            eps.point_variance(),
            sampler.clip_magnitude()
        );
    }
    Ok(())
}
