//! Runs one verification suite with its default parameters and prints the
//! verdict of every criterion.
//!
//! ```text
//! cargo run --release --example verify_suite -- capacity [output-dir]
//! ```

use std::time::Instant;

use chaoslab::lab::{run_suite, ExperimentConfig, Suite};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "capacity".into());
    let suite: Suite = name.parse()?;
    let mut config = ExperimentConfig::for_suite(suite);
    config.output_dir = std::env::args().nth(2).map(Into::into);
    let start = Instant::now();
    let result = run_suite(&config)?;
    for c in &result.criteria {
        let verdict = match (c.passed, c.advisory) {
            (true, _) => "pass",
            (false, true) => "advisory-fail",
            (false, false) => "FAIL",
        };
        println!("{verdict:>13}  {:<28} {}", c.id, c.detail);
    }
    println!(
        "{} {} in {:.1}s",
        result.suite,
        if result.passed { "passed" } else { "failed" },
        start.elapsed().as_secs_f64()
    );
    Ok(())
}
