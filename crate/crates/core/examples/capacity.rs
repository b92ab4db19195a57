//! Logarithmic and Riesz energies, the equilibrium measure of [0, 1], polarity
//! scores, and the energy of a measure pulled back through a welding map.

use chaoslab::capacity::{equilibrium_measure, log_energy, polarity_score, pullback, riesz_energy};
use chaoslab::chaos::{ChaosSampler, DyadicMeasure, GmcParameters, Normalization};
use chaoslab::fractal::IntervalSelection;
use chaoslab::logfield::{DyadicGrid, FieldSampler, SamplingMethod, ScaleParameter};
use chaoslab::welding::cdf;

fn main() -> chaoslab::Result<()> {
    let uniform = DyadicMeasure::lebesgue(10)?;
    println!("uniform log energy {:.8} (log 2 + 3/2 = {:.8})", log_energy(&uniform)?.value, 2f64.ln() + 1.5);
    println!("uniform Riesz(1/2) energy {:.6}", riesz_energy(&uniform, 0.5)?.value);

    let eq = equilibrium_measure(&IntervalSelection::all(10))?;
    println!(
        "equilibrium energy {:.5} (log 8 = {:.5}) after {} iterations",
        eq.energy.value,
        8f64.ln(),
        eq.iterations
    );

    let full: Vec<_> = (6..=8).map(IntervalSelection::all).collect();
    let point: Vec<_> = (6..=8).map(|n| IntervalSelection::single(n, 0)).collect::<chaoslab::Result<_>>()?;
    println!("polarity: interval {:.3}, point {:.3}", polarity_score(&full)?.score, polarity_score(&point)?.score);

    let grid = DyadicGrid::new(12)?;
    let eps = ScaleParameter::from_exponent(12)?;
    let field = FieldSampler::new(grid, eps, SamplingMethod::auto(grid))?;
    let sampler = ChaosSampler::new(field, GmcParameters::new(2.0, eps, Normalization::Probability)?)?;
    let h = cdf(&sampler.measure(5)?)?;
    let pulled = pullback(&DyadicMeasure::lebesgue(12)?, &h)?;
    println!("Lebesgue pulled back through a critical map: log energy {:.4}", log_energy(&pulled)?.value);
    Ok(())
}
