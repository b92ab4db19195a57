//! Command-line front end of the laboratory.
//!
//! Exit codes: 0 success, 1 a verification criterion failed, 2 usage or
//! configuration error, 3 numerical failure.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use chaoslab::capacity::{equilibrium_measure, log_energy, write_density_csv};
use chaoslab::chaos::{self, ChaosSampler, GmcParameters, MeasureMetadata, Normalization};
use chaoslab::fractal::{exceptional_intervals, image_covering_report, spectrum_counts, GaugeFunction, IntervalSelection};
use chaoslab::lab::{run_suite, ExperimentConfig, Suite, CODE_VERSION};
use chaoslab::logfield::{DyadicGrid, FieldSampler, SamplingMethod, ScaleParameter};
use chaoslab::rng::derive_seed;
use chaoslab::welding::{self, cdf, welding_map};
use chaoslab::{Error, Result};

#[derive(Parser)]
#[command(name = "chaoslab", version, about = "Gaussian multiplicative chaos laboratory")]
struct Cli {
    /// JSON experiment configuration; missing fields take the defaults of the suite.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed, overriding the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; without it results go to standard output.
    #[arg(long, global = true, env = "CHAOSLAB_OUT")]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Draw one realisation of the regularised field.
    SampleField,
    /// Build one chaos measure on the dyadic grid.
    BuildMeasure {
        #[arg(long, value_enum, default_value_t = NormalizationArg::Probability)]
        normalization: NormalizationArg,
    },
    /// Build the welding map h₋⁻¹ ∘ h₊ of two independent measures.
    Welding,
    /// Estimate the exponent spectrum of h₋ over the configured replicas.
    Spectrum,
    /// Image covering sums of the exceptional intervals over the configured replicas.
    Covering,
    /// Equilibrium measure of [0, 1] and its logarithmic energy.
    Capacity,
    /// Run a verification suite.
    Verify { suite: Suite },
}

#[derive(Clone, Copy, ValueEnum)]
enum NormalizationArg {
    Raw,
    Probability,
}

impl From<NormalizationArg> for Normalization {
    fn from(n: NormalizationArg) -> Self {
        match n {
            NormalizationArg::Raw => Normalization::Raw,
            NormalizationArg::Probability => Normalization::Probability,
        }
    }
}

#[derive(Serialize)]
struct Provenance {
    command: &'static str,
    config_hash: String,
    master_seed: u64,
    code_version: &'static str,
    seeds: Vec<u64>,
}

#[derive(Serialize)]
struct Output<T: Serialize> {
    provenance: Provenance,
    result: T,
}

enum Outcome {
    Done,
    CriterionFailed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::CriterionFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(Error::Config(vec!["--threads: must be at least 1".into()]));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::Config(vec![format!("--threads: {e}")]))?;
    }
    let default_suite = match &cli.command {
        Command::SampleField => Suite::FieldCovariance,
        Command::BuildMeasure { .. } | Command::Welding | Command::Spectrum => Suite::Spectrum,
        Command::Covering => Suite::Covering,
        Command::Capacity => Suite::Capacity,
        Command::Verify { suite } => *suite,
    };
    let mut config = load_config(cli.config.as_deref(), default_suite)?;
    if let Command::Verify { suite } = &cli.command {
        if config.suite != *suite {
            return Err(Error::Config(vec![format!(
                "configuration is for suite `{}` but `{}` was requested",
                config.suite, suite
            )]));
        }
    }
    if let Some(seed) = cli.seed {
        config.master_seed = seed;
    }
    config.output_dir = cli.out.clone();
    config.validate()?;

    match &cli.command {
        Command::SampleField => sample_field_cmd(cli, &config),
        Command::BuildMeasure { normalization } => build_measure_cmd(cli, &config, (*normalization).into()),
        Command::Welding => welding_cmd(cli, &config),
        Command::Spectrum => spectrum_cmd(cli, &config),
        Command::Covering => covering_cmd(cli, &config),
        Command::Capacity => capacity_cmd(cli, &config),
        Command::Verify { .. } => verify_cmd(cli, &config),
    }
}

fn load_config(path: Option<&Path>, default_suite: Suite) -> Result<ExperimentConfig> {
    let Some(path) = path else {
        return Ok(ExperimentConfig::for_suite(default_suite));
    };
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(vec![format!("cannot read {}: {e}", path.display())]))?;
    let mut value: Value =
        serde_json::from_str(&text).map_err(|e| Error::Config(vec![format!("malformed JSON: {e}")]))?;
    if let Value::Object(map) = &mut value {
        map.entry("suite").or_insert_with(|| Value::String(default_suite.id().into()));
    }
    ExperimentConfig::from_value(value)
}

fn provenance(command: &'static str, config: &ExperimentConfig, seeds: Vec<u64>) -> Provenance {
    Provenance {
        command,
        config_hash: config.hash(),
        master_seed: config.master_seed,
        code_version: CODE_VERSION,
        seeds,
    }
}

fn seed(config: &ExperimentConfig, tag: &str, index: usize) -> u64 {
    derive_seed(config.master_seed, tag, index as u64)
}

fn chaos_sampler(config: &ExperimentConfig, normalization: Normalization) -> Result<ChaosSampler> {
    let grid = DyadicGrid::new(config.resolution)?;
    let epsilon = ScaleParameter::from_exponent(config.epsilon_exponent)?;
    let field = FieldSampler::new(grid, epsilon, SamplingMethod::auto(grid))?;
    ChaosSampler::new(field, GmcParameters::new(config.gamma, epsilon, normalization)?)
}

/// Sends `write` either to `<out>/<name>` or to standard output.
fn emit(cli: &Cli, name: &str, write: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match &cli.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let path = dir.join(name);
            let mut file = io::BufWriter::new(fs::File::create(&path)?);
            write(&mut file)?;
            file.flush()?;
            eprintln!("wrote {}", path.display());
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock)?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn emit_json<T: Serialize>(cli: &Cli, stem: &str, value: &T) -> Result<()> {
    emit(cli, &format!("{stem}.json"), |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        writeln!(w)?;
        Ok(())
    })
}

fn emit_rows(cli: &Cli, stem: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    emit(cli, &format!("{stem}.csv"), |w| {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(header)?;
        for row in rows {
            csv.write_record(row)?;
        }
        csv.flush()?;
        Ok(())
    })
}

fn sample_field_cmd(cli: &Cli, config: &ExperimentConfig) -> Result<Outcome> {
    let grid = DyadicGrid::new(config.resolution)?;
    let epsilon = ScaleParameter::from_exponent(config.epsilon_exponent)?;
    let s = seed(config, "cli/sample-field", 0);
    let sample = FieldSampler::new(grid, epsilon, SamplingMethod::auto(grid))?.sample(s);
    match cli.format {
        Format::Json => emit_json(
            cli,
            "field",
            &Output {
                provenance: provenance("sample-field", config, vec![s]),
                result: &sample,
            },
        )?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = sample
                .values
                .iter()
                .enumerate()
                .map(|(j, v)| vec![j.to_string(), grid.point(j).to_string(), v.to_string()])
                .collect();
            emit_rows(cli, "field", &["index", "x", "value"], &rows)?;
        }
    }
    Ok(Outcome::Done)
}

fn build_measure_cmd(cli: &Cli, config: &ExperimentConfig, normalization: Normalization) -> Result<Outcome> {
    let s = seed(config, "cli/build-measure", 0);
    let measure = chaos_sampler(config, normalization)?.measure(s)?;
    let metadata = MeasureMetadata::of(&measure);
    match cli.format {
        Format::Json => {
            #[derive(Serialize)]
            struct MeasureOut<'a> {
                metadata: MeasureMetadata,
                total: f64,
                masses: &'a [f64],
            }
            emit_json(
                cli,
                "measure",
                &Output {
                    provenance: provenance("build-measure", config, vec![s]),
                    result: MeasureOut {
                        metadata,
                        total: measure.total(),
                        masses: measure.masses(),
                    },
                },
            )?;
        }
        Format::Csv => {
            emit(cli, "measure.csv", |w| chaos::write_csv(&measure, w))?;
            if cli.out.is_some() {
                emit_json(cli, "measure.meta", &metadata)?;
            }
        }
    }
    Ok(Outcome::Done)
}

fn welding_cmd(cli: &Cli, config: &ExperimentConfig) -> Result<Outcome> {
    let sampler = chaos_sampler(config, Normalization::Probability)?;
    let (sp, sm) = (seed(config, "cli/welding/plus", 0), seed(config, "cli/welding/minus", 0));
    let h = welding_map(&sampler.measure(sp)?, &sampler.measure(sm)?)?;
    match cli.format {
        Format::Json => emit_json(
            cli,
            "welding",
            &Output {
                provenance: provenance("welding", config, vec![sp, sm]),
                result: &h,
            },
        )?,
        Format::Csv => emit(cli, "welding.csv", |w| welding::write_csv(&h, w))?,
    }
    Ok(Outcome::Done)
}

fn replica_seeds(config: &ExperimentConfig, tag: &str) -> Vec<u64> {
    (0..config.replicas).map(|r| seed(config, tag, r)).collect()
}

fn spectrum_cmd(cli: &Cli, config: &ExperimentConfig) -> Result<Outcome> {
    use rayon::prelude::*;
    let sampler = chaos_sampler(config, Normalization::Probability)?;
    let seeds = replica_seeds(config, "cli/spectrum/minus");
    let counts = seeds
        .par_iter()
        .map(|&s| {
            let h_minus = cdf(&sampler.measure(s)?)?;
            spectrum_counts(&h_minus, &config.deltas, config.side, config.resolution, config.bandwidth)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut merged = counts[0].clone();
    for other in &counts[1..] {
        merged.merge(other)?;
    }
    let estimate = merged.estimate()?;
    match cli.format {
        Format::Json => {
            #[derive(Serialize)]
            struct SpectrumOut<'a, E: Serialize, C: Serialize> {
                estimate: &'a E,
                counts: &'a C,
            }
            emit_json(
                cli,
                "spectrum",
                &Output {
                    provenance: provenance("spectrum", config, seeds),
                    result: SpectrumOut {
                        estimate: &estimate,
                        counts: &merged,
                    },
                },
            )?;
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = estimate
                .points
                .iter()
                .map(|p| {
                    vec![
                        p.delta.to_string(),
                        p.dimension.to_string(),
                        p.empty.to_string(),
                        p.scales_used.to_string(),
                    ]
                })
                .collect();
            emit_rows(cli, "spectrum", &["delta", "dimension", "empty", "scales_used"], &rows)?;
        }
    }
    Ok(Outcome::Done)
}

fn covering_cmd(cli: &Cli, config: &ExperimentConfig) -> Result<Outcome> {
    use rayon::prelude::*;
    let sampler = chaos_sampler(config, Normalization::Probability)?;
    let gauge = GaugeFunction::log_power(config.k)?;
    let seeds = replica_seeds(config, "cli/covering/plus");
    let reports = seeds
        .par_iter()
        .map(|&s| {
            let mu = sampler.measure(s)?;
            let h_plus = cdf(&mu)?;
            let selections = config
                .scales
                .iter()
                .map(|&n| exceptional_intervals(&mu, &gauge, n))
                .collect::<Result<Vec<IntervalSelection>>>()?;
            config
                .alphas
                .iter()
                .map(|&a| image_covering_report(&h_plus, &selections, a))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    match cli.format {
        Format::Json => emit_json(
            cli,
            "covering",
            &Output {
                provenance: provenance("covering", config, seeds),
                result: &reports,
            },
        )?,
        Format::Csv => {
            let mut rows = Vec::new();
            for (r, per_alpha) in reports.iter().enumerate() {
                for report in per_alpha {
                    for s in &report.sums {
                        rows.push(vec![
                            r.to_string(),
                            report.alpha.to_string(),
                            s.n.to_string(),
                            s.sum.to_string(),
                            s.cells.to_string(),
                        ]);
                    }
                }
            }
            emit_rows(cli, "covering", &["replica", "alpha", "n", "sum", "cells"], &rows)?;
        }
    }
    Ok(Outcome::Done)
}

fn capacity_cmd(cli: &Cli, config: &ExperimentConfig) -> Result<Outcome> {
    let eq = equilibrium_measure(&IntervalSelection::all(config.resolution))?;
    let report = log_energy(&eq.measure)?;
    match cli.format {
        Format::Json => {
            #[derive(Serialize)]
            struct CapacityOut<'a, R: Serialize> {
                energy: &'a R,
                iterations: usize,
                gradient_norm: f64,
                gap: f64,
                masses: &'a [f64],
            }
            emit_json(
                cli,
                "capacity",
                &Output {
                    provenance: provenance("capacity", config, Vec::new()),
                    result: CapacityOut {
                        energy: &report,
                        iterations: eq.iterations,
                        gradient_norm: eq.gradient_norm,
                        gap: eq.gap,
                        masses: eq.measure.masses(),
                    },
                },
            )?;
        }
        Format::Csv => emit(cli, "capacity.csv", |w| write_density_csv(&eq.measure, w))?,
    }
    Ok(Outcome::Done)
}

fn verify_cmd(cli: &Cli, config: &ExperimentConfig) -> Result<Outcome> {
    let result = run_suite(config)?;
    for c in &result.criteria {
        let verdict = match (c.passed, c.advisory) {
            (true, _) => "pass",
            (false, true) => "advisory",
            (false, false) => "FAIL",
        };
        eprintln!("{verdict:>8}  {}  {}", c.id, c.detail);
    }
    if cli.out.is_none() {
        match cli.format {
            Format::Json => {
                let stdout = io::stdout();
                let mut lock = stdout.lock();
                writeln!(lock, "{}", result.to_json()?)?;
            }
            Format::Csv => {
                let rows: Vec<Vec<String>> = result
                    .criteria
                    .iter()
                    .map(|c| vec![c.id.clone(), c.passed.to_string(), c.advisory.to_string(), c.detail.clone()])
                    .collect();
                emit_rows(cli, "criteria", &["id", "passed", "advisory", "detail"], &rows)?;
            }
        }
    }
    eprintln!("{} {}", result.suite, if result.passed { "passed" } else { "failed" });
    Ok(if result.passed {
        Outcome::Done
    } else {
        Outcome::CriterionFailed
    })
}
