//! Line-oriented JSON formats for samples, trees and depth query batches.

use std::io::{BufRead, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::branching::{BrwTree, VertexRecord};
use crate::depth::{depth_1d, depth_2d_exact, depth_approx, depth_oracle, DepthMethod, DepthResult, WeightedPoints};
use crate::error::{Error, Result};
use crate::measure::{ReferenceMeasure, Sample, SampleBuilder};
use crate::scalar::Scalar;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PatternRecord<T> {
    points: Vec<Vec<T>>,
}

fn parse_err(line: usize, e: impl std::fmt::Display) -> Error {
    Error::Parse {
        line,
        message: e.to_string(),
    }
}

/// One `{"points": [[x1, ..., xd], ...]}` object per line.
pub fn write_sample<T: Scalar + Serialize, W: Write>(s: &Sample<T>, mut w: W) -> Result<()> {
    for p in s.patterns() {
        let rec = PatternRecord {
            points: p.points().map(|x| x.to_vec()).collect(),
        };
        serde_json::to_writer(&mut w, &rec).map_err(std::io::Error::from)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a sample, rejecting empty patterns and mixed dimensions. Blank lines are skipped.
pub fn read_sample<T: Scalar + DeserializeOwned, R: BufRead>(r: R) -> Result<Sample<T>> {
    let mut b: Option<SampleBuilder<T>> = None;
    let mut flat = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: PatternRecord<T> = serde_json::from_str(&line).map_err(|e| parse_err(i + 1, e))?;
        let d = rec.points.first().map(Vec::len).ok_or_else(|| parse_err(i + 1, "pattern with no points"))?;
        let b = b.get_or_insert_with(|| SampleBuilder::new(d));
        if b.dim() != d {
            return Err(parse_err(i + 1, format!("pattern of dimension {d} in a sample of dimension {}", b.dim())));
        }
        flat.clear();
        for p in &rec.points {
            if p.len() != d {
                return Err(parse_err(i + 1, format!("point of dimension {} in a pattern of dimension {d}", p.len())));
            }
            flat.extend_from_slice(p);
        }
        b.push_flat(&flat).map_err(|e| parse_err(i + 1, e))?;
    }
    b.ok_or(Error::Empty("sample"))?.finish()
}

/// One vertex per line in breadth-first order.
pub fn write_tree<T: Scalar + Serialize, W: Write>(t: &BrwTree<T>, mut w: W) -> Result<()> {
    for rec in t.records() {
        serde_json::to_writer(&mut w, &rec).map_err(std::io::Error::from)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_tree<T: Scalar + DeserializeOwned, R: BufRead>(r: R) -> Result<BrwTree<T>> {
    let mut recs: Vec<VertexRecord<T>> = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        recs.push(serde_json::from_str(&line).map_err(|e| parse_err(i + 1, e))?);
    }
    BrwTree::from_records(&recs)
}

/// Depth queries against a weighted point set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DepthBatch<T> {
    pub points: Vec<Vec<T>>,
    /// Per-point weights; unit weights when absent.
    #[serde(default)]
    pub weights: Option<Vec<T>>,
    /// Masses are divided by this; the number of points when absent.
    #[serde(default)]
    pub scale: Option<T>,
    pub queries: Vec<Vec<T>>,
    pub method: DepthMethod,
}

impl<T: Scalar> DepthBatch<T> {
    pub fn weighted_points(&self) -> Result<WeightedPoints<T>> {
        let d = self.points.first().map(Vec::len).ok_or(Error::Empty("depth batch points"))?;
        if self.points.iter().any(|p| p.len() != d) {
            return Err(Error::InvalidParameter("points of mixed dimension".into()));
        }
        let w = match &self.weights {
            Some(w) => w.clone(),
            None => vec![T::one(); self.points.len()],
        };
        let flat = self.points.iter().flatten().copied().collect();
        let scale = self.scale.unwrap_or_else(|| T::from_count(self.points.len() as u64));
        WeightedPoints::new(d, flat, w)?.with_scale(scale)
    }

    /// Evaluates every query with the requested method.
    pub fn evaluate(&self) -> Result<Vec<DepthResult<T>>> {
        let wp = self.weighted_points()?;
        let d = wp.dim();
        let measure = atoms_measure(&wp)?;
        self.queries
            .iter()
            .map(|x| {
                if x.len() != d {
                    return Err(Error::DimensionMismatch { expected: d, found: x.len() });
                }
                match self.method {
                    DepthMethod::Exact1d => depth_1d(&measure, x[0]),
                    DepthMethod::Exact2d => depth_2d_exact(&wp, x),
                    DepthMethod::DirectionSampling(k) => depth_approx(&measure, x, k),
                    DepthMethod::Oracle => Ok(DepthResult {
                        depth: depth_oracle(&wp, x)?,
                        direction: vec![T::zero(); d],
                        exact: false,
                        tie_count: 0,
                    }),
                }
            })
            .collect()
    }
}

/// Weighted points as a discrete reference measure (mass `w_i / scale` at `y_i`).
fn atoms_measure<T: Scalar>(wp: &WeightedPoints<T>) -> Result<ReferenceMeasure<T>> {
    use crate::generators::{Atom, DisplacementLaw};
    let total = wp.total_mass();
    if !(total > T::zero()) {
        return Err(Error::Empty("weighted points with positive mass"));
    }
    let raw_total = total * wp.scale();
    let atoms = (0..wp.len())
        .filter(|&i| wp.weight(i) > T::zero())
        .map(|i| Atom {
            point: wp.point(i).to_vec(),
            weight: wp.weight(i) / raw_total,
        })
        .collect();
    ReferenceMeasure::mixed_binomial(total, total * total, DisplacementLaw::discrete(atoms)?)
}
