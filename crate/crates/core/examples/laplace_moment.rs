//! Fractional moments of partition sums computed directly and through the
//! empirical Laplace transform.

use chaoslab::chaos::{ChaosSampler, GmcParameters, Normalization};
use chaoslab::fractal::{moment_via_laplace, partition_sum};
use chaoslab::logfield::{DyadicGrid, FieldSampler, SamplingMethod, ScaleParameter};
use chaoslab::rng::derive_seed;

fn main() -> chaoslab::Result<()> {
    let (q, beta) = (0.3, 1.2);
    for n in [8, 10, 12] {
        let grid = DyadicGrid::new(n)?;
        let eps = ScaleParameter::from_exponent(n)?;
        let field = FieldSampler::new(grid, eps, SamplingMethod::CirculantEmbedding)?;
        let sampler = ChaosSampler::new(field, GmcParameters::new(2.0, eps, Normalization::Raw)?)?;
        let sums = (0..2000)
            .map(|r| partition_sum(&sampler.measure(derive_seed(9, "example/laplace", r))?, n, beta))
            .collect::<chaoslab::Result<Vec<f64>>>()?;
        let direct = sums.iter().map(|s| s.powf(q)).sum::<f64>() / sums.len() as f64;
        let laplace = moment_via_laplace(&sums, q)?;
        println!("n = {n}: E[S^q] direct {direct:.5}, via Laplace {:.5}", laplace.value);
    }
    Ok(())
}
