//! Experiment orchestration: configurations, seeded replica execution,
//! verification suites and their on-disk artifacts.

mod config;
mod stats;
mod suites;

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use config::{ExperimentConfig, Suite, Thresholds, DEFAULT_MASTER_SEED};
pub use stats::{
    hill_tail_index, ks_normal, ks_two_sample, mean_and_se, KsResult, TailIndex, MIN_EXCEEDANCES,
    MIN_KS_SAMPLES,
};

/// Version string embedded in every result.
pub const CODE_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub id: String,
    pub passed: bool,
    /// Reported but not counted towards the suite verdict.
    pub advisory: bool,
    pub detail: String,
}

/// A reported number together with the replicas it was computed from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Statistic {
    pub name: String,
    pub value: f64,
    pub standard_error: Option<f64>,
    pub replicas: usize,
    /// Seed stream tag passed to [`crate::rng::derive_seed`].
    pub seed_stream: String,
    /// First and last replica index drawn from the stream.
    pub replica_range: [u64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultProvenance {
    pub config_hash: String,
    pub master_seed: u64,
    pub code_version: String,
    pub config: ExperimentConfig,
}

/// A numeric table written next to the result as CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub suite: Suite,
    pub passed: bool,
    pub criteria: Vec<Criterion>,
    pub statistics: Vec<Statistic>,
    pub provenance: ResultProvenance,
    #[serde(skip)]
    pub tables: Vec<Table>,
}

impl SuiteResult {
    pub fn criterion(&self, id: &str) -> Option<&Criterion> {
        self.criteria.iter().find(|c| c.id == id)
    }

    pub fn statistic(&self, name: &str) -> Option<&Statistic> {
        self.statistics.iter().find(|s| s.name == name)
    }

    /// Pretty JSON of the result; identical inputs give identical bytes.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Writes `<suite>.json` and one `<suite>-<table>.csv` per table; returns the paths written.
    pub fn write_artifacts(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let json = dir.join(format!("{}.json", self.suite.id()));
        fs::write(&json, self.to_json()? + "\n")?;
        written.push(json);
        for table in &self.tables {
            let path = dir.join(format!("{}-{}.csv", self.suite.id(), table.name));
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record(&table.columns)?;
            for row in &table.rows {
                w.write_record(row.iter().map(|v| v.to_string()))?;
            }
            w.flush()?;
            written.push(path);
        }
        Ok(written)
    }
}

/// Runs the configured suite and, when `output_dir` is set, writes its artifacts.
pub fn run_suite(config: &ExperimentConfig) -> Result<SuiteResult> {
    config.validate()?;
    let report = suites::run(config).map_err(|e| e.context(format!("suite {}", config.suite)))?;
    let passed = report.criteria.iter().all(|c| c.passed || c.advisory);
    let result = SuiteResult {
        suite: config.suite,
        passed,
        criteria: report.criteria,
        statistics: report.statistics,
        provenance: ResultProvenance {
            config_hash: config.hash(),
            master_seed: config.master_seed,
            code_version: CODE_VERSION.to_string(),
            config: config.clone(),
        },
        tables: report.tables,
    };
    if let Some(dir) = &config.output_dir {
        result.write_artifacts(dir)?;
    }
    Ok(result)
}

/// [`run_suite`] inside a dedicated pool of `threads` workers.
pub fn run_suite_with_threads(config: &ExperimentConfig, threads: usize) -> Result<SuiteResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::invalid("threads", e.to_string()))?;
    pool.install(|| run_suite(config))
}
