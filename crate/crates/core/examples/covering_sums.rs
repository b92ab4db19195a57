//! Covering sums of the images of mass-exceptional intervals under h₊, at
//! exponents on both sides of `1 − 1/(2k)`.

use chaoslab::chaos::{ChaosSampler, GmcParameters, Normalization};
use chaoslab::fractal::{exceptional_intervals, image_covering_report, GaugeFunction};
use chaoslab::logfield::{DyadicGrid, FieldSampler, SamplingMethod, ScaleParameter};
use chaoslab::welding::cdf;

fn main() -> chaoslab::Result<()> {
    let n = 16;
    let grid = DyadicGrid::new(n)?;
    let eps = ScaleParameter::from_exponent(n)?;
    let field = FieldSampler::new(grid, eps, SamplingMethod::auto(grid))?;
    let sampler = ChaosSampler::new(field, GmcParameters::new(2.0, eps, Normalization::Probability)?)?;
    let mu = sampler.measure(11)?;
    let h_plus = cdf(&mu)?;
    let k = 1.0;
    let gauge = GaugeFunction::log_power(k)?;
    let selections = (8..=n)
        .map(|level| exceptional_intervals(&mu, &gauge, level))
        .collect::<chaoslab::Result<Vec<_>>>()?;
    for alpha in [0.3, 0.6, 0.9] {
        let report = image_covering_report(&h_plus, &selections, alpha)?;
        let sums: Vec<String> = report.sums.iter().map(|s| format!("{}:{:.3}", s.n, s.sum)).collect();
        println!(
            "α = {alpha} (bound {:.2}): slope {:?}, decreasing {}; {}",
            1.0 - 1.0 / (2.0 * k),
            report.trend_slope,
            report.is_decreasing(),
            sums.join(" ")
        );
    }
    Ok(())
}
