//! Experiment configuration files.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use ppdepth_core::generators::{CountLaw, DisplacementLaw};
use ppdepth_core::measure::{EvalFunction, FunctionClass, Point};

use crate::error::{HarnessError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Ulln,
    Clt,
    Bound,
    Depth,
    Brw,
    Diag,
    Simulate,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Ulln => "ulln",
            Self::Clt => "clt",
            Self::Bound => "bound",
            Self::Depth => "depth",
            Self::Brw => "brw",
            Self::Diag => "diag",
            Self::Simulate => "simulate",
        }
    }

    /// Stream tag separating the random streams of different experiment kinds.
    pub fn tag(self) -> u64 {
        self as u64 + 1
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

/// A test function as written in configs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    Below { threshold: f64 },
    Above { threshold: f64 },
    HalfSpace { point: Vec<f64>, normal: Vec<f64> },
    Exponential { theta: f64, low: f64, high: f64 },
    Constant { value: f64 },
}

impl FunctionSpec {
    pub fn build(&self) -> Result<EvalFunction<f64>> {
        Ok(match self {
            Self::Below { threshold } => EvalFunction::below(*threshold),
            Self::Above { threshold } => EvalFunction::above(*threshold),
            Self::HalfSpace { point, normal } => EvalFunction::half_space(Point::new(point.clone())?, normal.clone())?,
            Self::Exponential { theta, low, high } => EvalFunction::exponential(*theta, *low, *high)?,
            Self::Constant { value } => EvalFunction::Constant(*value),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClassSpec {
    HalfLines,
    HalfSpaces { dim: usize },
    Exponentials { low: f64, high: f64, radius: f64 },
    Finite { functions: Vec<FunctionSpec>, vc_dim: u32 },
}

impl ClassSpec {
    pub fn build(&self) -> Result<FunctionClass<f64>> {
        Ok(match self {
            Self::HalfLines => FunctionClass::half_lines(),
            Self::HalfSpaces { dim } => FunctionClass::half_spaces(*dim)?,
            Self::Exponentials { low, high, radius } => FunctionClass::exponentials(*low, *high, *radius)?,
            Self::Finite { functions, vc_dim } => {
                let fs = functions.iter().map(FunctionSpec::build).collect::<Result<Vec<_>>>()?;
                FunctionClass::finite(fs, *vc_dim)?
            }
        })
    }
}

/// Target and tolerance for a fitted slope.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlopeCheck {
    pub target: f64,
    pub tol: f64,
}

/// Search box for deepest points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchBox {
    pub low: Vec<f64>,
    pub high: Vec<f64>,
    pub grid: usize,
    /// Point the deepest points are expected to approach.
    #[serde(default)]
    pub center: Option<Vec<f64>>,
}

fn default_replicates() -> usize {
    1
}

fn default_ground_truth() -> usize {
    1_000_000
}

fn default_alpha() -> f64 {
    1.01
}

fn default_se_band() -> f64 {
    3.0
}

fn default_cov_band() -> f64 {
    5.0
}

fn default_skew() -> f64 {
    0.1
}

fn default_kurt() -> f64 {
    0.2
}

fn default_p() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Base name of the output files.
    pub name: String,
    pub experiment: ExperimentKind,
    pub count: CountLaw,
    pub disp: DisplacementLaw<f64>,
    #[serde(default)]
    pub class: Option<ClassSpec>,
    /// Test functions for the CLT and branching fluctuation studies.
    #[serde(default)]
    pub functions: Vec<FunctionSpec>,
    #[serde(default)]
    pub n_grid: Vec<usize>,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default)]
    pub epsilon_grid: Vec<f64>,
    #[serde(default)]
    pub theta_grid: Vec<f64>,
    /// Generations at which branching estimators are evaluated.
    #[serde(default)]
    pub j_grid: Vec<usize>,
    /// Evaluation points for depth deviations.
    #[serde(default)]
    pub x_grid: Vec<Vec<f64>>,
    pub seed: u64,
    /// Worker count; not part of the config hash since outputs do not depend on it.
    #[serde(default, skip_serializing)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub format: Format,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_alpha")]
    pub beta: f64,
    /// Order of the pseudo-distance used for covering numbers.
    #[serde(default = "default_p")]
    pub p: f64,
    /// Depth of grown trees.
    #[serde(default)]
    pub generations: Option<usize>,
    /// Generation `j` of the fluctuation study, which also uses `j + 1` and `j + 2`.
    #[serde(default)]
    pub study_generation: Option<usize>,
    /// Single-pattern draws for Monte Carlo ground truth.
    #[serde(default = "default_ground_truth")]
    pub ground_truth_draws: usize,
    #[serde(default)]
    pub search: Option<SearchBox>,
    #[serde(default)]
    pub slope: Option<SlopeCheck>,
    /// Standard-error band for inequality checks.
    #[serde(default = "default_se_band")]
    pub se_band: f64,
    /// Standard-error band for covariance checks.
    #[serde(default = "default_cov_band")]
    pub cov_band: f64,
    #[serde(default = "default_skew")]
    pub max_skewness: f64,
    #[serde(default = "default_kurt")]
    pub max_excess_kurtosis: f64,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HarnessError::Config(format!("{}: {m}", self.name)));
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return bad("name must be a plain file stem".into());
        }
        self.count.validate()?;
        if self.replicates < 1 {
            return bad("replicates must be at least 1".into());
        }
        if self.n_grid.contains(&0) {
            return bad("sample sizes must be positive".into());
        }
        if self.epsilon_grid.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
            return bad("epsilon grid must be positive".into());
        }
        if self.threads == Some(0) {
            return bad("threads must be positive".into());
        }
        let needs_n = !matches!(self.experiment, ExperimentKind::Brw);
        if needs_n && self.n_grid.is_empty() {
            return bad("n_grid is empty".into());
        }
        if let Some(c) = &self.class {
            let cls = c.build()?;
            if let Some(d) = cls.dim() {
                if d != self.disp.dim() {
                    return bad(format!("class dimension {d} but displacement dimension {}", self.disp.dim()));
                }
            }
        }
        match self.experiment {
            ExperimentKind::Ulln | ExperimentKind::Diag | ExperimentKind::Bound if self.class.is_none() => {
                return bad("a function class is required".into())
            }
            ExperimentKind::Bound | ExperimentKind::Diag if self.epsilon_grid.is_empty() => {
                return bad("epsilon_grid is empty".into())
            }
            ExperimentKind::Clt => {
                if self.functions.len() < 2 || self.replicates < 100 {
                    return bad("the CLT study needs at least 2 functions and 100 replicates".into());
                }
            }
            ExperimentKind::Depth => {
                if self.disp.dim() > 2 {
                    return bad("depth deviations need dimension at most 2".into());
                }
                if self.x_grid.is_empty() {
                    return bad("x_grid is empty".into());
                }
            }
            ExperimentKind::Brw => {
                if self.disp.dim() != 1 {
                    return bad("branching Laplace study needs dimension 1".into());
                }
                let g = self.generations.unwrap_or(0);
                if g < 1 || self.j_grid.is_empty() || self.theta_grid.is_empty() {
                    return bad("generations, j_grid and theta_grid are required".into());
                }
                if self.j_grid.iter().any(|&j| j >= g) {
                    return bad("every j must be below the tree depth".into());
                }
                if let Some(j) = self.study_generation {
                    if j + 2 >= g {
                        return bad("study generation + 2 must be below the tree depth".into());
                    }
                    if self.count.mean() <= 1.0 {
                        return bad("the fluctuation study needs a supercritical count law".into());
                    }
                    if self.functions.is_empty() {
                        return bad("the fluctuation study needs a test function".into());
                    }
                }
            }
            _ => {}
        }
        for f in &self.functions {
            f.build()?;
        }
        Ok(())
    }

    pub fn class(&self) -> Result<FunctionClass<f64>> {
        self.class
            .as_ref()
            .ok_or_else(|| HarnessError::Config("missing function class".into()))?
            .build()
    }

    pub fn functions(&self) -> Result<Vec<EvalFunction<f64>>> {
        self.functions.iter().map(FunctionSpec::build).collect()
    }

    /// SHA-256 of the canonical JSON form, hex encoded, first 16 characters.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        let digest = Sha256::digest(&bytes);
        hex::encode(&digest[..8])
    }

    /// Worker count: explicit value, then the `PPDEPTH_THREADS` variable, then all cores.
    pub fn resolved_threads(&self) -> usize {
        self.threads
            .or_else(|| std::env::var("PPDEPTH_THREADS").ok().and_then(|v| v.parse().ok()))
            .filter(|&t| t > 0)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{
        "name": "t", "experiment": "ulln",
        "count": {"kind": "shifted_poisson", "lambda": 2.0},
        "disp": {"kind": "uniform", "low": [0], "high": [1]},
        "class": {"kind": "half_lines"},
        "n_grid": [10], "replicates": 3, "seed": 1
    }"#;

    #[test]
    fn parses_and_hashes() {
        let c = ExperimentConfig::from_json(BASE).unwrap();
        assert_eq!(c.hash().len(), 16);
        let mut d = c.clone();
        d.seed = 2;
        assert_ne!(c.hash(), d.hash());
        let mut e = c.clone();
        e.threads = Some(4);
        assert_eq!(c.hash(), e.hash());
    }

    #[test]
    fn rejects_bad_configs() {
        let cases = [
            BASE.replace("\"replicates\": 3", "\"replicates\": 0"),
            BASE.replace("[10]", "[]"),
            BASE.replace("\"seed\": 1", "\"seed\": 1, \"bogus\": 2"),
            BASE.replace("half_lines", "half_spaces\", \"dim\": \"2"),
            BASE.replace("2.0", "-1.0"),
        ];
        for c in cases {
            assert!(ExperimentConfig::from_json(&c).is_err(), "{c}");
        }
    }
}
