//! Welds two independent critical measures and checks the composition
//! `h₋ ∘ h = h₊` on a few points.

use chaoslab::chaos::{ChaosSampler, GmcParameters, Normalization};
use chaoslab::logfield::{DyadicGrid, FieldSampler, SamplingMethod, ScaleParameter};
use chaoslab::welding::{cdf, welding_map};

fn main() -> chaoslab::Result<()> {
    let grid = DyadicGrid::new(12)?;
    let eps = ScaleParameter::from_exponent(12)?;
    let field = FieldSampler::new(grid, eps, SamplingMethod::auto(grid))?;
    let sampler = ChaosSampler::new(field, GmcParameters::new(2.0, eps, Normalization::Probability)?)?;
    let (plus, minus) = (sampler.measure(1)?, sampler.measure(2)?);
    let (h_plus, h_minus) = (cdf(&plus)?, cdf(&minus)?);
    let h = welding_map(&plus, &minus)?;
    println!("h has {} linear pieces", h.segments());
    for x in [0.1, 0.25, 0.5, 0.75, 0.9] {
        let y = h.eval(x);
        println!(
            "x = {x}: h(x) = {y:.6}, h₋(h(x)) = {:.6}, h₊(x) = {:.6}",
            h_minus.eval(y),
            h_plus.eval(x)
        );
    }
    let quarter = h.image_length(0.0, 0.25)?;
    println!("|h([0, 1/4))| = {quarter:.6}");
    Ok(())
}
