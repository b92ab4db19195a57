//! Log-energy of measures pulled back through critical distribution functions,
//! for ν carried by the image of non-exceptional cells.

use chaoslab::capacity::{log_energy, pullback_at, riesz_energy};
use chaoslab::chaos::{ChaosSampler, DyadicMeasure, GmcParameters, Normalization, Provenance};
use chaoslab::fractal::{exceptional_intervals, GaugeFunction};
use chaoslab::logfield::{DyadicGrid, FieldSampler, SamplingMethod, ScaleParameter};
use chaoslab::rng::derive_seed;
use chaoslab::welding::{cdf, MonotoneMap};

const K: f64 = 5.0;
const K_PRIME: f64 = 4.5;
const MEASURE_RESOLUTION: u32 = 14;
const SELECTION_LEVEL: u32 = 10;
const IMAGE_RESOLUTION: u32 = 18;

/// Normalised Lebesgue measure on `h(F)`, `F` the level-`SELECTION_LEVEL` cells
/// outside the exceptional set, discretised by cell midpoints.
fn image_measure(h: &MonotoneMap, outside: &[usize]) -> DyadicMeasure {
    let step = 0.5f64.powi(SELECTION_LEVEL as i32);
    let intervals: Vec<(f64, f64)> = outside
        .iter()
        .map(|&j| (h.eval(j as f64 * step), h.eval((j + 1) as f64 * step)))
        .collect();
    let cells = 1usize << IMAGE_RESOLUTION;
    let width = 1.0 / cells as f64;
    let mut masses = vec![0.0; cells];
    for &(a, b) in &intervals {
        let first = (a / width).floor() as usize;
        let last = ((b / width).ceil() as usize).min(cells);
        for (j, m) in masses.iter_mut().enumerate().take(last).skip(first) {
            let lo = (j as f64 * width).max(a);
            let hi = ((j + 1) as f64 * width).min(b);
            if hi > lo {
                *m += hi - lo;
            }
        }
    }
    let total: f64 = masses.iter().sum();
    masses.iter_mut().for_each(|m| *m /= total);
    DyadicMeasure::from_masses(masses, Provenance::Synthetic { tag: "image of F".into() }).unwrap()
}

#[test]
fn pullback_energy_is_finite_and_stable() {
    let grid = DyadicGrid::new(MEASURE_RESOLUTION).unwrap();
    let eps = ScaleParameter::from_exponent(MEASURE_RESOLUTION).unwrap();
    let field = FieldSampler::new(grid, eps, SamplingMethod::auto(grid)).unwrap();
    let sampler =
        ChaosSampler::new(field, GmcParameters::new(2.0, eps, Normalization::Probability).unwrap()).unwrap();
    let gauge = GaugeFunction::log_power(K).unwrap();
    let mut worst_drift: f64 = 0.0;
    let mut constants = Vec::new();
    for r in 0..50 {
        let mu = sampler.measure(derive_seed(17, "tests/pullback", r)).unwrap();
        let h_plus = cdf(&mu).unwrap();
        let exceptional = exceptional_intervals(&mu, &gauge, SELECTION_LEVEL).unwrap();
        let outside = exceptional.complement();
        assert!(!outside.is_empty(), "replica {r}: every cell is exceptional");
        let nu = image_measure(&h_plus, outside.indices());
        let riesz = riesz_energy(&nu, 1.0 / K_PRIME).unwrap();
        assert!(!riesz.infinite && riesz.value.is_finite());
        let energies: Vec<f64> = [10, 12, 14]
            .iter()
            .map(|&n| {
                let pulled = pullback_at(&nu, &h_plus, n).unwrap();
                assert!((pulled.total() - 1.0).abs() < 1e-12);
                log_energy(&pulled).unwrap().value
            })
            .collect();
        assert!(energies.iter().all(|e| e.is_finite() && *e > 0.0), "replica {r}: {energies:?}");
        let drift = (energies[2] - energies[1]).abs() / energies[1];
        worst_drift = worst_drift.max(drift);
        constants.push(energies[2] / riesz.value);
    }
    let largest = constants.iter().copied().fold(0.0, f64::max);
    println!("worst relative drift 12 -> 14: {worst_drift:.4}, largest C: {largest:.3}");
    assert!(worst_drift < 0.05, "pullback energy not stable: drift {worst_drift}");
    assert!(largest.is_finite());
}
