//! Writing reports to disk.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{ExperimentKind, Format};
use crate::error::{HarnessError, Result};
use crate::record::{param_columns, Check, ResultRecord};

fn header(kind: ExperimentKind) -> Vec<String> {
    let mut h = vec!["experiment".to_string(), "config_hash".into(), "seed".into()];
    h.extend(param_columns(kind).iter().map(|c| c.to_string()));
    h.extend(["replicate", "statistic", "value", "std_error"].map(String::from));
    h
}

fn check_record(kind: ExperimentKind, r: &ResultRecord) -> Result<()> {
    if r.experiment != kind {
        return Err(HarnessError::Output(format!("record of {:?} in a {:?} file", r.experiment, kind)));
    }
    let cols = param_columns(kind);
    if let Some(k) = r.params.keys().find(|k| !cols.contains(&k.as_str())) {
        return Err(HarnessError::Output(format!("unknown parameter column {k}")));
    }
    let finite = r.value.is_finite() && r.std_error.is_none_or(f64::is_finite) && r.params.values().all(|v| v.is_finite());
    if !finite {
        return Err(HarnessError::Output(format!("non-finite value in {}", r.statistic)));
    }
    Ok(())
}

/// Records as CSV with the fixed column layout of `kind`.
pub fn records_to_csv(kind: ExperimentKind, records: &[ResultRecord]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let out = |e: csv::Error| HarnessError::Output(e.to_string());
    w.write_record(header(kind)).map_err(out)?;
    for r in records {
        check_record(kind, r)?;
        let mut row = vec![kind.name().to_string(), r.config_hash.clone(), r.seed.to_string()];
        for c in param_columns(kind) {
            row.push(r.params.get(*c).map_or(String::new(), |v| v.to_string()));
        }
        row.push(r.replicate.map_or(String::new(), |v| v.to_string()));
        row.push(r.statistic.clone());
        row.push(r.value.to_string());
        row.push(r.std_error.map_or(String::new(), |v| v.to_string()));
        w.write_record(&row).map_err(out)?;
    }
    w.into_inner().map_err(|e| HarnessError::Output(e.to_string()))
}

/// Parses CSV written by [`records_to_csv`].
pub fn records_from_csv(kind: ExperimentKind, bytes: &[u8]) -> Result<Vec<ResultRecord>> {
    let bad = |m: String| HarnessError::Output(m);
    let mut rd = csv::Reader::from_reader(bytes);
    let h: Vec<String> = rd.headers().map_err(|e| bad(e.to_string()))?.iter().map(String::from).collect();
    if h != header(kind) {
        return Err(bad(format!("unexpected header {h:?}")));
    }
    let num = |s: &str| s.parse::<f64>().map_err(|e| bad(format!("{s}: {e}")));
    let opt = |s: &str| if s.is_empty() { Ok(None) } else { num(s).map(Some) };
    let cols = param_columns(kind);
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row.map_err(|e| bad(e.to_string()))?;
        let mut params = std::collections::BTreeMap::new();
        for (k, c) in cols.iter().enumerate() {
            if let Some(v) = opt(&row[3 + k])? {
                params.insert(c.to_string(), v);
            }
        }
        let i = 3 + cols.len();
        out.push(ResultRecord {
            experiment: kind,
            config_hash: row[1].to_string(),
            seed: row[2].parse().map_err(|e| bad(format!("seed: {e}")))?,
            params,
            replicate: if row[i].is_empty() {
                None
            } else {
                Some(row[i].parse().map_err(|e| bad(format!("replicate: {e}")))?)
            },
            statistic: row[i + 1].to_string(),
            value: num(&row[i + 2])?,
            std_error: opt(&row[i + 3])?,
        });
    }
    Ok(out)
}

pub fn records_to_json(kind: ExperimentKind, records: &[ResultRecord]) -> Result<Vec<u8>> {
    for r in records {
        check_record(kind, r)?;
    }
    let mut v = serde_json::to_vec_pretty(records).map_err(|e| HarnessError::Output(e.to_string()))?;
    v.push(b'\n');
    Ok(v)
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| HarnessError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| HarnessError::io(path, e))?;
    tmp.persist(path).map_err(|e| HarnessError::io(path, e.error))?;
    Ok(())
}

#[derive(Serialize)]
struct Meta<'a> {
    name: &'a str,
    experiment: ExperimentKind,
    config_hash: &'a str,
    seed: u64,
    versions: Versions,
    records: usize,
    checks: &'a [Check],
}

#[derive(Serialize)]
struct Versions {
    ppdepth: &'static str,
    ppdepth_core: &'static str,
}

/// Everything needed to write one run's files.
pub struct Output<'a> {
    pub dir: &'a Path,
    pub name: &'a str,
    pub kind: ExperimentKind,
    pub format: Format,
    pub config_hash: &'a str,
    pub seed: u64,
}

impl Output<'_> {
    pub fn main_path(&self) -> PathBuf {
        self.dir.join(format!("{}.{}", self.name, self.format.extension()))
    }

    pub fn meta_path(&self) -> PathBuf {
        self.dir.join(format!("{}.meta.json", self.name))
    }

    /// Writes the records, the metadata sidecar and any extra files; returns the written paths.
    pub fn emit(&self, records: &[ResultRecord], checks: &[Check], files: &[(String, Vec<u8>)]) -> Result<Vec<PathBuf>> {
        let body = match self.format {
            Format::Csv => records_to_csv(self.kind, records)?,
            Format::Json => records_to_json(self.kind, records)?,
        };
        let mut paths = vec![self.main_path()];
        write_atomic(&paths[0], &body)?;
        for (file, bytes) in files {
            let p = self.dir.join(file);
            write_atomic(&p, bytes)?;
            paths.push(p);
        }
        let meta = Meta {
            name: self.name,
            experiment: self.kind,
            config_hash: self.config_hash,
            seed: self.seed,
            versions: Versions {
                ppdepth: env!("CARGO_PKG_VERSION"),
                ppdepth_core: ppdepth_core::VERSION,
            },
            records: records.len(),
            checks,
        };
        let mut m = serde_json::to_vec_pretty(&meta).map_err(|e| HarnessError::Output(e.to_string()))?;
        m.push(b'\n');
        let mp = self.meta_path();
        write_atomic(&mp, &m)?;
        paths.push(mp);
        Ok(paths)
    }
}

/// Serializes rows to CSV with a header taken from the field names.
pub fn table_csv<S: Serialize>(rows: &[S], columns: &[&str]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let out = |e: csv::Error| HarnessError::Output(e.to_string());
    if rows.is_empty() {
        w.write_record(columns).map_err(out)?;
    }
    for r in rows {
        w.serialize(r).map_err(out)?;
    }
    w.into_inner().map_err(|e| HarnessError::Output(e.to_string()))
}
