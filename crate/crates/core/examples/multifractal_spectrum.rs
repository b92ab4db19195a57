//! Estimates the exponent spectrum of critical distribution functions by
//! box counting and prints it next to `δ − δ²/4`.

use chaoslab::chaos::{ChaosSampler, GmcParameters, Normalization};
use chaoslab::fractal::{spectrum_counts, LevelSide};
use chaoslab::logfield::{DyadicGrid, FieldSampler, SamplingMethod, ScaleParameter};
use chaoslab::rng::derive_seed;
use chaoslab::welding::cdf;

fn main() -> chaoslab::Result<()> {
    let n = 14;
    let grid = DyadicGrid::new(n)?;
    let eps = ScaleParameter::from_exponent(n)?;
    let field = FieldSampler::new(grid, eps, SamplingMethod::auto(grid))?;
    let sampler = ChaosSampler::new(field, GmcParameters::new(2.0, eps, Normalization::Probability)?)?;
    let deltas = [0.5, 1.0, 1.5, 2.0, 2.5];
    let mut merged = None;
    for r in 0..40 {
        let h = cdf(&sampler.measure(derive_seed(3, "example/spectrum", r))?)?;
        let counts = spectrum_counts(&h, &deltas, LevelSide::Equal, n, 0.1)?;
        match merged.as_mut() {
            None => merged = Some(counts),
            Some(m) => m.merge(&counts)?,
        }
    }
    let estimate = merged.expect("at least one replica").estimate()?;
    for p in &estimate.points {
        println!(
            "δ = {:.1}: dimension {:.3} (δ − δ²/4 = {:.3}){}",
            p.delta,
            p.dimension,
            p.delta - p.delta * p.delta / 4.0,
            if p.empty { ", empty" } else { "" }
        );
    }
    Ok(())
}
