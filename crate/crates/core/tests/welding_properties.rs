//! Properties of distribution functions of chaos measures and their welding.

use chaoslab::chaos::{ChaosSampler, DyadicMeasure, GmcParameters, Normalization, Provenance};
use chaoslab::fractal::local_exponents;
use chaoslab::logfield::{DyadicGrid, FieldSampler, SamplingMethod, ScaleParameter};
use chaoslab::rng::derive_seed;
use chaoslab::welding::{cdf, compose, welding_map, MonotoneMap};
use proptest::prelude::*;

fn sampler(n: u32, gamma: f64) -> ChaosSampler {
    let grid = DyadicGrid::new(n).unwrap();
    let eps = ScaleParameter::from_exponent(n).unwrap();
    let field = FieldSampler::new(grid, eps, SamplingMethod::auto(grid)).unwrap();
    ChaosSampler::new(field, GmcParameters::new(gamma, eps, Normalization::Probability).unwrap()).unwrap()
}

fn assert_valid(map: &MonotoneMap) {
    let bp = map.breakpoints();
    let vals = map.values();
    assert_eq!(bp[0], 0.0);
    assert_eq!(*bp.last().unwrap(), 1.0);
    assert_eq!(vals[0], 0.0);
    assert_eq!(*vals.last().unwrap(), 1.0);
    assert!(map.runs().iter().all(|&r| r > 0.0 && r.is_finite()));
    assert!(map.rises().iter().all(|&r| r > 0.0 && r.is_finite()));
    assert!(bp.windows(2).all(|w| w[0] <= w[1]) && vals.windows(2).all(|w| w[0] <= w[1]));
}

fn min_exponent(map: &MonotoneMap, levels: std::ops::RangeInclusive<u32>) -> f64 {
    levels
        .map(|n| local_exponents(map, n).unwrap().into_iter().fold(f64::INFINITY, f64::min))
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn critical_welding_maps_are_homeomorphisms() {
    let s = sampler(14, 2.0);
    for r in 0..10 {
        let plus = s.measure(derive_seed(5, "tests/welding/plus", r)).unwrap();
        let minus = s.measure(derive_seed(5, "tests/welding/minus", r)).unwrap();
        let h = welding_map(&plus, &minus).unwrap();
        assert_valid(&h);
        assert_valid(&h.invert());
        let h_plus = cdf(&plus).unwrap();
        let h_minus = cdf(&minus).unwrap();
        // h₋ ∘ h = h₊
        let back = compose(&h_minus, &h);
        for j in 0..=64 {
            let x = j as f64 / 64.0;
            assert!((back.eval(x) - h_plus.eval(x)).abs() < 1e-9, "replica {r}, x = {x}");
        }
    }
}

#[test]
fn subcritical_maps_have_positive_holder_floors() {
    let s = sampler(14, 1.0);
    let mut forward = Vec::new();
    let mut inverse = Vec::new();
    for r in 0..20 {
        let h = cdf(&s.measure(derive_seed(6, "tests/welding/subcritical", r)).unwrap()).unwrap();
        forward.push(min_exponent(&h, 4..=14));
        inverse.push(min_exponent(&h.invert(), 4..=14));
    }
    let lowest = |xs: &[f64]| xs.iter().copied().fold(f64::INFINITY, f64::min);
    println!("floors: h₊ {:.3}, h₊⁻¹ {:.3}", lowest(&forward), lowest(&inverse));
    assert!(lowest(&forward) > 0.1);
    assert!(lowest(&inverse) > 0.1);
}

fn measure_from(masses: Vec<f64>) -> DyadicMeasure {
    DyadicMeasure::from_masses(masses, Provenance::Synthetic { tag: "proptest".into() })
        .unwrap()
        .normalized()
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 64,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn inverse_undoes_the_map(
        masses in prop::collection::vec(1e-6f64..1.0, 16),
        xs in prop::collection::vec(0.0f64..=1.0, 10),
    ) {
        let h = cdf(&measure_from(masses)).unwrap();
        let inv = h.invert();
        for x in xs {
            prop_assert!((inv.eval(h.eval(x)) - x).abs() < 1e-12);
        }
    }

    #[test]
    fn composition_is_exact_on_inner_breakpoints(
        a in prop::collection::vec(1e-3f64..1.0, 8),
        b in prop::collection::vec(1e-3f64..1.0, 16),
    ) {
        let (f, g) = (cdf(&measure_from(a)).unwrap(), cdf(&measure_from(b)).unwrap());
        let fg = compose(&f, &g);
        prop_assert_eq!(fg.breakpoints(), g.breakpoints());
        for (&x, &v) in g.breakpoints().iter().zip(fg.values()) {
            prop_assert!((v - f.eval(g.eval(x))).abs() < 1e-15);
        }
        // f ∘ (f⁻¹ ∘ g) = g on the breakpoints of g
        let back = compose(&f, &compose(&f.invert(), &g));
        for (&x, &v) in g.breakpoints().iter().zip(back.values()) {
            prop_assert!((v - g.eval(x)).abs() < 1e-10);
        }
    }

    #[test]
    fn image_lengths_add_up(masses in prop::collection::vec(1e-6f64..1.0, 32), cut in 1usize..32) {
        let mu = measure_from(masses);
        let h = cdf(&mu).unwrap();
        let t = cut as f64 / 32.0;
        let left = h.image_length(0.0, t).unwrap();
        let right = h.image_length(t, 1.0).unwrap();
        prop_assert!((left + right - 1.0).abs() < 1e-12);
        let direct: f64 = mu.masses()[..cut].iter().sum();
        prop_assert!((left - direct).abs() < 1e-12);
    }
}
