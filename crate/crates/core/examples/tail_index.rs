//! Hill estimates of the tail index: Pareto oracles, then the total mass of
//! critical chaos.

use chaoslab::chaos::{ChaosSampler, GmcParameters, Normalization};
use chaoslab::lab::hill_tail_index;
use chaoslab::logfield::{DyadicGrid, FieldSampler, SamplingMethod, ScaleParameter};
use chaoslab::rng::{derive_seed, rng_from_seed};
use rand::Rng;

fn main() -> chaoslab::Result<()> {
    let mut rng = rng_from_seed(1);
    for index in [0.5, 1.0, 2.0] {
        let pareto: Vec<f64> = (0..10_000).map(|_| rng.random::<f64>().powf(-1.0 / index)).collect();
        let est = hill_tail_index(&pareto, 0.05)?;
        println!("Pareto({index}): Hill {:.3} ± {:.3}", est.index, est.standard_error);
    }

    let grid = DyadicGrid::new(12)?;
    let eps = ScaleParameter::from_exponent(12)?;
    let field = FieldSampler::new(grid, eps, SamplingMethod::CirculantEmbedding)?;
    let sampler = ChaosSampler::new(field, GmcParameters::new(2.0, eps, Normalization::Raw)?)?;
    let totals = (0..10_000)
        .map(|r| Ok(sampler.measure(derive_seed(2, "example/tail", r))?.total()))
        .collect::<chaoslab::Result<Vec<f64>>>()?;
    let est = hill_tail_index(&totals, 0.01)?;
    println!(
        "critical totals: Hill {:.3} ± {:.3} over {} exceedances",
        est.index, est.standard_error, est.exceedances
    );
    Ok(())
}
