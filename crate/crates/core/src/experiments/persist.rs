//! CSV result files.
//!
//! Results: `family, n, K_or_p, instance_seed, solver, params, cut_value,
//! ising_energy, exact_optimum, ratio, wall_time_s`, one row per
//! (instance, solver); missing optional values are empty cells. Floats are
//! written in shortest round-trip form, so re-reading is exact.
//!
//! Per-start: `family, n, instance_seed, k, cut_value, ising_energy,
//! exact_optimum`, one row per start node of a deterministic sweep.

use std::fs::File;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::batch::InstanceResult;
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
struct ResultRow {
    family: String,
    n: usize,
    #[serde(rename = "K_or_p")]
    k_or_p: String,
    instance_seed: u64,
    solver: String,
    params: String,
    cut_value: f64,
    ising_energy: f64,
    exact_optimum: Option<f64>,
    ratio: Option<f64>,
    wall_time_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerStartRow {
    pub family: String,
    pub n: usize,
    pub instance_seed: u64,
    pub k: usize,
    pub cut_value: f64,
    pub ising_energy: f64,
    pub exact_optimum: Option<f64>,
}

impl From<&InstanceResult> for ResultRow {
    fn from(r: &InstanceResult) -> Self {
        ResultRow {
            family: r.family.clone(),
            n: r.n,
            k_or_p: r.k_or_p.clone(),
            instance_seed: r.instance_seed,
            solver: r.solver.clone(),
            params: r.params.clone(),
            cut_value: r.cut_value,
            ising_energy: r.ising_energy,
            exact_optimum: r.exact_optimum,
            ratio: r.ratio,
            wall_time_s: r.wall_time_s,
        }
    }
}

impl From<ResultRow> for InstanceResult {
    fn from(r: ResultRow) -> Self {
        InstanceResult {
            family: r.family,
            n: r.n,
            k_or_p: r.k_or_p,
            instance_seed: r.instance_seed,
            solver: r.solver,
            params: r.params,
            cut_value: r.cut_value,
            ising_energy: r.ising_energy,
            exact_optimum: r.exact_optimum,
            ratio: r.ratio,
            wall_time_s: r.wall_time_s,
            per_start: Vec::new(),
        }
    }
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn open_writer(path: &Path) -> Result<csv::Writer<File>> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(f))
}

/// Appends result blocks (and their per-start records) as they complete.
pub(crate) struct ResultWriter {
    path: PathBuf,
    results: csv::Writer<File>,
    per_start: Option<(PathBuf, csv::Writer<File>)>,
}

impl ResultWriter {
    pub(crate) fn create(path: &Path, per_start: Option<&Path>) -> Result<Self> {
        let per_start = match per_start {
            Some(p) => Some((p.to_path_buf(), open_writer(p)?)),
            None => None,
        };
        Ok(ResultWriter {
            path: path.to_path_buf(),
            results: open_writer(path)?,
            per_start,
        })
    }

    pub(crate) fn append(&mut self, rows: &[InstanceResult]) -> Result<()> {
        for r in rows {
            self.results.serialize(ResultRow::from(r)).map_err(csv_err(&self.path))?;
            if let Some((p, w)) = self.per_start.as_mut() {
                for s in &r.per_start {
                    w.serialize(PerStartRow::from((r, s))).map_err(csv_err(p))?;
                }
            }
        }
        self.results.flush().map_err(|e| Error::io(&self.path, e))?;
        if let Some((p, w)) = self.per_start.as_mut() {
            w.flush().map_err(|e| Error::io(p.as_path(), e))?;
        }
        Ok(())
    }
}

pub fn write_results(path: impl AsRef<Path>, rows: &[InstanceResult]) -> Result<()> {
    let path = path.as_ref();
    let mut w = ResultWriter::create(path, None)?;
    w.append(rows)
}

pub fn read_results(path: impl AsRef<Path>) -> Result<Vec<InstanceResult>> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    r.deserialize::<ResultRow>()
        .map(|row| row.map(InstanceResult::from).map_err(csv_err(path)))
        .collect()
}

pub fn write_per_start(path: impl AsRef<Path>, rows: &[PerStartRow]) -> Result<()> {
    let path = path.as_ref();
    let mut w = open_writer(path)?;
    for row in rows {
        w.serialize(row).map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_per_start(path: impl AsRef<Path>) -> Result<Vec<PerStartRow>> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    r.deserialize().map(|row| row.map_err(csv_err(path))).collect()
}
