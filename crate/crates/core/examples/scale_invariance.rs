//! Compares the mass of `[0, 1/4)` with its rescaled law
//! `|I| e^{(γ/2) X_I − (γ²/8) 2 log(1/|I|)} μ'([0, 1])` by a two-sample KS test.

use chaoslab::chaos::{ChaosSampler, DyadicInterval, GmcParameters, Normalization};
use chaoslab::lab::ks_two_sample;
use chaoslab::logfield::{sample_coarse_gaussian, DyadicGrid, FieldSampler, SamplingMethod, ScaleParameter};
use chaoslab::rng::derive_seed;

fn sampler(n: u32, gamma: f64) -> chaoslab::Result<ChaosSampler> {
    let grid = DyadicGrid::new(n)?;
    let eps = ScaleParameter::from_exponent(n)?;
    let field = FieldSampler::new(grid, eps, SamplingMethod::auto(grid))?;
    ChaosSampler::new(field, GmcParameters::new(gamma, eps, Normalization::Raw)?)
}

fn main() -> chaoslab::Result<()> {
    let (gamma, n, level) = (1.0, 10, 2);
    let interval = DyadicInterval::new(level, 0)?;
    let len = interval.length();
    let fine = sampler(n, gamma)?;
    let coarse = sampler(n - level, gamma)?;
    let replicas = 1000;
    let mut restricted = Vec::with_capacity(replicas);
    let mut rescaled = Vec::with_capacity(replicas);
    for r in 0..replicas {
        restricted.push(fine.measure(derive_seed(4, "example/fine", r as u64))?.interval_mass(interval)?);
        let x = sample_coarse_gaussian(len, derive_seed(4, "example/coarse", r as u64))?;
        let total = coarse.measure(derive_seed(4, "example/copy", r as u64))?.total();
        let factor = (gamma / 2.0 * x - gamma * gamma / 8.0 * 2.0 * (1.0 / len).ln()).exp();
        rescaled.push(len * factor * total);
    }
    let ks = ks_two_sample(&restricted, &rescaled)?;
    println!("KS D = {:.4}, p = {:.3}", ks.statistic, ks.p_value);
    Ok(())
}
