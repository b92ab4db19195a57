use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fractal::LevelSide;
use crate::logfield::MAX_RESOLUTION;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    FieldCovariance,
    Moments,
    ScaleInvariance,
    TailIndex,
    Spectrum,
    Holder,
    Covering,
    Intersection,
    LaplaceMoment,
    Capacity,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::FieldCovariance,
        Suite::Moments,
        Suite::ScaleInvariance,
        Suite::TailIndex,
        Suite::Spectrum,
        Suite::Holder,
        Suite::Covering,
        Suite::Intersection,
        Suite::LaplaceMoment,
        Suite::Capacity,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Suite::FieldCovariance => "field-covariance",
            Suite::Moments => "moments",
            Suite::ScaleInvariance => "scale-invariance",
            Suite::TailIndex => "tail-index",
            Suite::Spectrum => "spectrum",
            Suite::Holder => "holder",
            Suite::Covering => "covering",
            Suite::Intersection => "intersection",
            Suite::LaplaceMoment => "laplace-moment",
            Suite::Capacity => "capacity",
        }
    }
}

impl std::fmt::Display for Suite {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.id() == s)
            .ok_or_else(|| {
                let known: Vec<&str> = Suite::ALL.iter().map(|s| s.id()).collect();
                Error::Config(vec![format!("unknown suite `{s}` (known: {})", known.join(", "))])
            })
    }
}

/// Pass/fail thresholds. The defaults are engineering choices, not
/// consequences of the theory, so all of them can be overridden.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    /// Agreement band for Monte Carlo means, in standard errors.
    pub standard_errors: f64,
    /// Minimum p-value of goodness-of-fit tests.
    pub p_value: f64,
    /// Fraction of replicas that must show the expected covering trend.
    pub trend_fraction: f64,
    /// Largest relative drift of a moment that should be finite.
    pub stable_drift: f64,
    /// Smallest relative drift of a moment that should be infinite.
    pub unstable_drift: f64,
    /// Largest relative drift of the negative moment.
    pub negative_drift: f64,
    pub tail_index_range: [f64; 2],
    /// Allowed error of the Hill estimator on Pareto samples.
    pub oracle_tolerance: f64,
    pub holder_floor: f64,
    pub spectrum_tolerance: f64,
    /// Relative gap between the Laplace-route and direct moments.
    pub laplace_tolerance: f64,
    /// Largest relative spread of the partition-sum moment across scales.
    pub moment_drift: f64,
    pub kernel_tolerance: f64,
    pub log_energy_tolerance: f64,
    pub riesz_energy_tolerance: f64,
    pub equilibrium_tolerance: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            standard_errors: 3.0,
            p_value: 0.01,
            trend_fraction: 0.8,
            stable_drift: 0.10,
            unstable_drift: 0.50,
            negative_drift: 0.05,
            tail_index_range: [0.8, 1.2],
            oracle_tolerance: 0.1,
            holder_floor: 0.15,
            spectrum_tolerance: 0.15,
            laplace_tolerance: 0.05,
            moment_drift: 0.25,
            kernel_tolerance: 1e-12,
            log_energy_tolerance: 1e-6,
            riesz_energy_tolerance: 1e-4,
            equilibrium_tolerance: 0.02,
        }
    }
}

/// Parameters of one verification suite.
///
/// Fields a suite does not use are carried along unchanged (they still enter
/// the configuration hash).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub suite: Suite,
    pub gamma: f64,
    /// Values of γ for the mean-one check of the moments suite.
    pub gammas: Vec<f64>,
    /// `m` in `ε = 2^-m`.
    pub epsilon_exponent: u32,
    /// `n` in the `2^n`-cell grid.
    pub resolution: u32,
    pub replicas: usize,
    /// Nested replica counts for moment-drift checks.
    pub replica_schedule: Vec<usize>,
    pub k: f64,
    pub eta: f64,
    pub alphas: Vec<f64>,
    pub beta: f64,
    pub q: f64,
    /// Orders `p` of the positive moment dichotomy.
    pub moments: Vec<f64>,
    pub negative_moment: f64,
    /// Values of γ at which the negative moment must stabilise (2 is critical).
    pub negative_gammas: Vec<f64>,
    pub deltas: Vec<f64>,
    pub side: LevelSide,
    pub bandwidth: f64,
    pub scales: Vec<u32>,
    pub top_fraction: f64,
    /// Level of the dyadic interval used by the scale-invariance suite.
    pub interval_level: u32,
    /// Index pairs sampled by the field-covariance suite.
    pub pairs: usize,
    pub riesz_exponent: f64,
    pub thresholds: Thresholds,
    pub master_seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

pub const DEFAULT_MASTER_SEED: u64 = 0x5eed_0f_c4a05;

impl ExperimentConfig {
    /// Defaults matching the desk-scale acceptance parameters of each suite.
    pub fn for_suite(suite: Suite) -> Self {
        let mut c = ExperimentConfig {
            suite,
            gamma: 2.0,
            gammas: vec![0.5, 1.0, 1.5],
            epsilon_exponent: 16,
            resolution: 16,
            replicas: 100,
            replica_schedule: vec![10_000, 100_000],
            k: 1.0,
            eta: 0.05,
            alphas: vec![0.6, 0.3],
            beta: 1.2,
            q: 0.3,
            moments: vec![1.2, 2.5],
            negative_moment: -2.0,
            negative_gammas: vec![1.0, 2.0],
            deltas: vec![0.5, 1.0, 1.5],
            side: LevelSide::Equal,
            bandwidth: 0.1,
            scales: (8..=16).collect(),
            top_fraction: 0.01,
            interval_level: 2,
            pairs: 20,
            riesz_exponent: 0.5,
            thresholds: Thresholds::default(),
            master_seed: DEFAULT_MASTER_SEED,
            output_dir: None,
        };
        match suite {
            Suite::FieldCovariance => {
                (c.resolution, c.epsilon_exponent, c.replicas) = (8, 8, 20_000);
                c.gamma = 0.0;
            }
            Suite::Moments => {
                (c.resolution, c.epsilon_exponent, c.replicas) = (12, 12, 10_000);
                c.gamma = 1.5;
            }
            Suite::ScaleInvariance => {
                (c.resolution, c.epsilon_exponent, c.replicas) = (10, 10, 2_000);
                c.gamma = 1.0;
            }
            Suite::TailIndex => {
                (c.resolution, c.epsilon_exponent, c.replicas) = (14, 14, 10_000);
            }
            Suite::Spectrum => c.replicas = 200,
            Suite::Holder => {
                c.replicas = 50;
                c.scales = (1..=16).collect();
            }
            Suite::Covering => {}
            Suite::Intersection => c.alphas = vec![0.2],
            Suite::LaplaceMoment => {
                (c.resolution, c.epsilon_exponent, c.replicas) = (10, 10, 10_000);
                c.scales = vec![8, 10, 12, 14];
            }
            Suite::Capacity => {
                (c.resolution, c.epsilon_exponent, c.replicas) = (10, 10, 1);
                c.gamma = 0.0;
                c.scales = vec![6, 7, 8];
            }
        }
        c
    }

    /// Parses a JSON object naming a `suite`; every other field is optional
    /// and overrides that suite's defaults.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| Error::Config(vec![format!("malformed JSON: {e}")]))?;
        Self::from_value(value)
    }

    pub fn from_value(value: Value) -> Result<Self> {
        let Value::Object(overrides) = value else {
            return Err(Error::Config(vec!["configuration must be a JSON object".into()]));
        };
        let suite: Suite = match overrides.get("suite") {
            Some(Value::String(s)) => s.parse()?,
            Some(_) => return Err(Error::Config(vec!["`suite` must be a string".into()])),
            None => return Err(Error::Config(vec!["missing field `suite`".into()])),
        };
        let defaults = Self::for_suite(suite);
        let Value::Object(mut merged) = serde_json::to_value(&defaults)? else {
            unreachable!("configs serialize to objects")
        };
        let mut problems = Vec::new();
        for (key, v) in overrides {
            match merged.get_mut(&key) {
                Some(Value::Object(slot)) if key == "thresholds" => match v {
                    Value::Object(inner) => {
                        for (k, tv) in inner {
                            if slot.contains_key(&k) {
                                slot.insert(k, tv);
                            } else {
                                problems.push(format!("thresholds.{k}: unknown field"));
                            }
                        }
                    }
                    _ => problems.push("thresholds: must be an object".into()),
                },
                Some(slot) => *slot = v,
                None => problems.push(format!("{key}: unknown field")),
            }
        }
        if !problems.is_empty() {
            return Err(Error::Config(problems));
        }
        let config: ExperimentConfig = serde_json::from_value(Value::Object(merged))
            .map_err(|e| Error::Config(vec![e.to_string()]))?;
        config.validate()?;
        Ok(config)
    }

    /// Checks every parameter the selected suite uses; all offending fields
    /// are reported together.
    pub fn validate(&self) -> Result<()> {
        let mut p = Vec::new();
        let mut check = |ok: bool, msg: String| {
            if !ok {
                p.push(msg);
            }
        };
        let in_unit_open = |x: f64| x > 0.0 && x < 1.0;
        check(
            (1..=MAX_RESOLUTION).contains(&self.resolution),
            format!("resolution: must lie in 1..={MAX_RESOLUTION}, got {}", self.resolution),
        );
        check(
            self.epsilon_exponent <= self.resolution,
            format!(
                "epsilon_exponent: grid 2^-{} would resolve below ε = 2^-{}",
                self.resolution, self.epsilon_exponent
            ),
        );
        check(self.replicas >= 1, "replicas: must be at least 1".into());
        check(
            (0.0..=2.0).contains(&self.gamma),
            format!("gamma: must lie in [0, 2], got {}", self.gamma),
        );
        let t = &self.thresholds;
        check(t.standard_errors > 0.0, "thresholds.standard_errors: must be positive".into());
        check(in_unit_open(t.p_value), "thresholds.p_value: must lie in (0, 1)".into());
        check(
            t.trend_fraction > 0.0 && t.trend_fraction <= 1.0,
            "thresholds.trend_fraction: must lie in (0, 1]".into(),
        );
        check(
            t.tail_index_range[0] < t.tail_index_range[1],
            "thresholds.tail_index_range: empty range".into(),
        );

        let critical_suites = [
            Suite::TailIndex,
            Suite::Spectrum,
            Suite::Holder,
            Suite::Covering,
            Suite::Intersection,
            Suite::LaplaceMoment,
        ];
        if critical_suites.contains(&self.suite) && self.gamma == 2.0 {
            check(
                self.epsilon_exponent >= 1,
                "epsilon_exponent: the critical prefactor needs ε < 1".into(),
            );
        }
        let scales_ok = |max: u32| {
            !self.scales.is_empty()
                && self.scales.windows(2).all(|w| w[0] < w[1])
                && self.scales.iter().all(|&n| n >= 1 && n <= max)
        };
        match self.suite {
            Suite::FieldCovariance => {
                check(self.pairs >= 1, "pairs: must be at least 1".into());
                check(self.replicas >= 2, "replicas: need at least 2 for standard errors".into());
            }
            Suite::Moments => {
                check(
                    self.gammas.iter().all(|g| (0.0..2.0).contains(g)),
                    "gammas: must lie in [0, 2)".into(),
                );
                check(self.gamma < 2.0, "gamma: the moments suite is subcritical".into());
                check(
                    self.replica_schedule.len() >= 2
                        && self.replica_schedule.windows(2).all(|w| w[0] < w[1])
                        && self.replica_schedule[0] >= 2,
                    "replica_schedule: needs at least two increasing counts ≥ 2".into(),
                );
                check(
                    self.moments.iter().all(|p| *p > 0.0),
                    "moments: orders must be positive".into(),
                );
                check(self.negative_moment < 0.0, "negative_moment: must be negative".into());
                check(
                    self.negative_gammas.iter().all(|g| *g > 0.0 && *g <= 2.0),
                    "negative_gammas: must lie in (0, 2]".into(),
                );
                check(
                    self.epsilon_exponent >= 1 || self.negative_gammas.iter().all(|g| *g < 2.0),
                    "epsilon_exponent: the critical negative moment needs ε < 1".into(),
                );
            }
            Suite::ScaleInvariance => {
                check(
                    self.interval_level >= 1 && self.interval_level < self.epsilon_exponent.max(1),
                    "interval_level: must lie in 1..epsilon_exponent".into(),
                );
                check(self.replicas >= 50, "replicas: KS needs at least 50".into());
            }
            Suite::TailIndex => {
                check(in_unit_open(self.top_fraction), "top_fraction: must lie in (0, 1)".into());
                check(
                    (self.replicas as f64 * self.top_fraction) >= 100.0,
                    "replicas: fewer than 100 exceedances for the Hill estimator".into(),
                );
            }
            Suite::Spectrum => {
                check(
                    !self.deltas.is_empty() && self.deltas.iter().all(|d| *d > 0.0 && *d < 4.0),
                    "deltas: must lie in (0, 4)".into(),
                );
                check(self.bandwidth > 0.0, "bandwidth: must be positive".into());
                check(self.resolution >= 2, "resolution: spectrum needs n_max ≥ 2".into());
            }
            Suite::Holder => check(scales_ok(self.resolution), "scales: must increase within 1..=resolution".into()),
            Suite::Covering | Suite::Intersection => {
                check(scales_ok(self.resolution), "scales: must increase within 1..=resolution".into());
                check(!self.alphas.is_empty(), "alphas: empty".into());
                check(self.alphas.iter().all(|a| *a >= 0.0), "alphas: must be nonnegative".into());
                if self.suite == Suite::Intersection {
                    check(self.k > 0.5, "k: must exceed 1/2".into());
                    check(self.eta > 0.0, "eta: must be positive".into());
                } else {
                    check(self.k > 0.0, "k: must be positive".into());
                }
            }
            Suite::LaplaceMoment => {
                check(in_unit_open(self.q), "q: must lie in (0, 1)".into());
                check(self.beta > 0.0, "beta: must be positive".into());
                check(
                    scales_ok(MAX_RESOLUTION),
                    "scales: must increase within 1..=24".into(),
                );
            }
            Suite::Capacity => {
                check(in_unit_open(self.riesz_exponent), "riesz_exponent: must lie in (0, 1)".into());
                check(
                    self.scales.len() >= 3 && scales_ok(16),
                    "scales: polarity needs at least 3 increasing resolutions ≤ 16".into(),
                );
            }
        }
        if p.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(p))
        }
    }

    /// SHA-256 of the canonical JSON of the configuration, output directory excluded.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output_dir = None;
        let bytes = serde_json::to_vec(&canonical).expect("config serializes");
        let digest = Sha256::digest(&bytes);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
