//! Result records and check outcomes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::config::ExperimentKind;

/// One emitted statistic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultRecord {
    pub experiment: ExperimentKind,
    pub config_hash: String,
    pub seed: u64,
    pub params: BTreeMap<String, f64>,
    pub replicate: Option<u64>,
    pub statistic: String,
    pub value: f64,
    pub std_error: Option<f64>,
}

/// Parameter columns of the CSV layout, per experiment kind.
pub fn param_columns(kind: ExperimentKind) -> &'static [&'static str] {
    match kind {
        ExperimentKind::Ulln | ExperimentKind::Simulate => &["n"],
        ExperimentKind::Clt => &["n", "f", "g"],
        ExperimentKind::Bound => &["n", "epsilon", "alpha", "beta", "v"],
        ExperimentKind::Depth => &["n", "epsilon", "x_index"],
        ExperimentKind::Brw => &["j", "theta", "f"],
        ExperimentKind::Diag => &["n", "epsilon"],
    }
}

/// A pass/fail assertion evaluated on the records.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Output of one experiment run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub records: Vec<ResultRecord>,
    pub checks: Vec<Check>,
    /// Extra files written next to the main output, as `(file name, contents)`.
    pub files: Vec<(String, Vec<u8>)>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn find(&self, statistic: &str) -> impl Iterator<Item = &ResultRecord> + '_ {
        let s = statistic.to_string();
        self.records.iter().filter(move |r| r.statistic == s)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Builds records sharing an experiment, hash and seed.
#[derive(Clone, Debug)]
pub struct RecordSink {
    kind: ExperimentKind,
    hash: String,
    seed: u64,
    pub records: Vec<ResultRecord>,
}

impl RecordSink {
    pub fn new(kind: ExperimentKind, hash: String, seed: u64) -> Self {
        Self {
            kind,
            hash,
            seed,
            records: Vec::new(),
        }
    }

    pub fn push(&mut self, params: &[(&str, f64)], replicate: Option<u64>, statistic: &str, value: f64, std_error: Option<f64>) {
        debug_assert!(params.iter().all(|(k, _)| param_columns(self.kind).contains(k)), "{params:?}");
        self.records.push(ResultRecord {
            experiment: self.kind,
            config_hash: self.hash.clone(),
            seed: self.seed,
            params: params.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            replicate,
            statistic: statistic.to_string(),
            value,
            std_error,
        });
    }

    pub fn summary(&mut self, params: &[(&str, f64)], statistic: &str, value: f64, std_error: Option<f64>) {
        self.push(params, None, statistic, value, std_error);
    }
}
