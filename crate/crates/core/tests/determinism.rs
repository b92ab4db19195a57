//! Suite results depend on the configuration and master seed only.

use chaoslab::lab::{run_suite, run_suite_with_threads, ExperimentConfig, Suite};

fn small(suite: Suite) -> ExperimentConfig {
    let mut c = ExperimentConfig::for_suite(suite);
    match suite {
        Suite::Spectrum | Suite::Covering | Suite::Intersection | Suite::Holder => {
            c.replicas = 12;
            c.resolution = 10;
            c.epsilon_exponent = 10;
            c.scales.retain(|&n| n <= 10);
        }
        _ => {}
    }
    c
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    for suite in [Suite::Spectrum, Suite::Covering, Suite::Intersection, Suite::Holder, Suite::Capacity] {
        let config = small(suite);
        let one = run_suite_with_threads(&config, 1).unwrap().to_json().unwrap();
        let again = run_suite_with_threads(&config, 1).unwrap().to_json().unwrap();
        let many = run_suite_with_threads(&config, 4).unwrap().to_json().unwrap();
        assert_eq!(one, again, "{suite}: rerun differs");
        assert_eq!(one, many, "{suite}: thread count changes the result");
    }
}

#[test]
fn tables_match_too() {
    let config = small(Suite::Covering);
    let a = run_suite_with_threads(&config, 1).unwrap();
    let b = run_suite_with_threads(&config, 3).unwrap();
    assert_eq!(a.tables.len(), b.tables.len());
    for (x, y) in a.tables.iter().zip(&b.tables) {
        assert_eq!((&x.name, &x.columns), (&y.name, &y.columns));
        let bits = |t: &chaoslab::lab::Table| -> Vec<Vec<u64>> {
            t.rows.iter().map(|r| r.iter().map(|v| v.to_bits()).collect()).collect()
        };
        assert_eq!(bits(x), bits(y), "table {}", x.name);
    }
}

#[test]
fn results_are_reconstructible_from_their_provenance() {
    let config = small(Suite::Holder);
    let first = run_suite(&config).unwrap();
    let rebuilt = first.provenance.config.clone();
    assert_eq!(rebuilt.hash(), first.provenance.config_hash);
    assert_eq!(run_suite(&rebuilt).unwrap().to_json().unwrap(), first.to_json().unwrap());
}

#[test]
fn the_seed_matters() {
    let config = small(Suite::Holder);
    let mut other = config.clone();
    other.master_seed += 1;
    let a = run_suite(&config).unwrap();
    let b = run_suite(&other).unwrap();
    assert_ne!(a.statistic("holder-floor").unwrap().value, b.statistic("holder-floor").unwrap().value);
    assert_ne!(a.provenance.config_hash, b.provenance.config_hash);
}
