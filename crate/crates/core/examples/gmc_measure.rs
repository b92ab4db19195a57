//! Builds subcritical and critical chaos measures from one field sample and
//! prints their largest cells and the masses of a few dyadic intervals.

use chaoslab::chaos::{build_measure, DyadicInterval, GmcParameters, Normalization};
use chaoslab::logfield::{sample_field, DyadicGrid, SamplingMethod, ScaleParameter};

fn main() -> chaoslab::Result<()> {
    let grid = DyadicGrid::new(14)?;
    let eps = ScaleParameter::from_exponent(14)?;
    let field = sample_field(grid, eps, 42, SamplingMethod::auto(grid))?;
    for gamma in [0.5, 1.0, 1.5, 2.0] {
        let raw = build_measure(&field, &GmcParameters::new(gamma, eps, Normalization::Raw)?)?;
        let mu = raw.normalized()?;
        let (argmax, max) = mu
            .masses()
            .iter()
            .copied()
            .enumerate()
            .fold((0, 0.0), |best, (j, m)| if m > best.1 { (j, m) } else { best });
        let halves: Vec<String> = (0..4)
            .map(|j| DyadicInterval::new(2, j).and_then(|i| mu.interval_mass(i)).map(|m| format!("{m:.3}")))
            .collect::<chaoslab::Result<_>>()?;
        println!(
            "γ = {gamma}: raw total {:.4}, heaviest cell {argmax} with mass {max:.2e}, quarters [{}]",
            raw.total(),
            halves.join(", ")
        );
    }
    Ok(())
}
