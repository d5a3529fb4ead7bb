//! Grid experiments over circuit family, size, threshold and precision.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::quantum::{Family, GenOptions};

use super::reference::{compare_with, Reference};
use super::{AnalysisError, Result};

/// Column order of the CSV and JSON forms.
pub const CSV_HEADER: &str =
    "family,n,delta,bits,seed,max_error,worst_index,final_nodes,peak_nodes,wall_ms,status";

/// One grid point. Measurement fields are empty when the point failed or,
/// for `wall_ms`, when timing was not requested.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub family: String,
    pub n: u32,
    pub delta: f64,
    pub bits: u32,
    pub seed: u64,
    pub max_error: Option<f64>,
    pub worst_index: Option<u64>,
    pub final_nodes: Option<usize>,
    pub peak_nodes: Option<usize>,
    pub wall_ms: Option<f64>,
    pub status: String,
}

impl SweepRecord {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub families: Vec<Family>,
    pub qubits: Vec<u32>,
    pub deltas: Vec<f64>,
    pub bits: Vec<u32>,
    pub seed: u64,
    pub h_as_ry: bool,
    /// Record wall-clock time; off by default so reruns are byte-identical.
    pub timing: bool,
}

impl SweepGrid {
    pub fn new(families: Vec<Family>, qubits: Vec<u32>, deltas: Vec<f64>, bits: Vec<u32>) -> Self {
        SweepGrid {
            families,
            qubits,
            deltas,
            bits,
            seed: 0,
            h_as_ry: false,
            timing: false,
        }
    }

    pub fn len(&self) -> usize {
        self.families.len() * self.qubits.len() * self.deltas.len() * self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Runs every grid point in the order family, n, delta, bits. Points run in
/// parallel, each in its own store; the ground truth for a `(family, n)`
/// pair is computed once and shared. A failing point is recorded with its
/// error message and the sweep continues.
pub fn sweep(grid: &SweepGrid) -> Result<Vec<SweepRecord>> {
    if grid.is_empty() {
        return Err(AnalysisError::InvalidArgument(
            "every sweep axis needs at least one value".into(),
        ));
    }
    let opts = GenOptions {
        seed: grid.seed,
        h_as_ry: grid.h_as_ry,
        ..GenOptions::default()
    };
    let cases: Vec<(Family, u32)> = grid
        .families
        .iter()
        .flat_map(|&f| grid.qubits.iter().map(move |&n| (f, n)))
        .collect();
    let prepared: Vec<std::result::Result<_, String>> = cases
        .par_iter()
        .map(|&(family, n)| {
            let circuit = family.generate(n, &opts).map_err(|e| e.to_string())?;
            let reference = Reference::simulate(&circuit).map_err(|e| e.to_string())?;
            Ok((circuit, reference))
        })
        .collect();

    let mut points = Vec::with_capacity(grid.len());
    for (ci, _) in cases.iter().enumerate() {
        for &delta in &grid.deltas {
            for &bits in &grid.bits {
                points.push((ci, delta, bits));
            }
        }
    }
    let records = points
        .par_iter()
        .map(|&(ci, delta, bits)| {
            let (family, n) = cases[ci];
            let mut rec = SweepRecord {
                family: family.to_string(),
                n,
                delta,
                bits,
                seed: grid.seed,
                max_error: None,
                worst_index: None,
                final_nodes: None,
                peak_nodes: None,
                wall_ms: None,
                status: "ok".into(),
            };
            let outcome = match &prepared[ci] {
                Ok((circuit, reference)) => {
                    compare_with(reference, circuit, delta, bits).map_err(|e| e.to_string())
                }
                Err(msg) => Err(msg.clone()),
            };
            match outcome {
                Ok(r) => {
                    rec.max_error = Some(r.max_error);
                    rec.worst_index = Some(r.worst_index);
                    rec.final_nodes = Some(r.final_nodes);
                    rec.peak_nodes = Some(r.peak_nodes);
                    if grid.timing {
                        rec.wall_ms = Some(r.wall_ms);
                    }
                }
                Err(msg) => rec.status = format!("error: {msg}"),
            }
            rec
        })
        .collect();
    Ok(records)
}

/// [`sweep`] on a pool of at most `workers` threads.
pub fn sweep_with_workers(grid: &SweepGrid, workers: Option<usize>) -> Result<Vec<SweepRecord>> {
    match workers {
        None => sweep(grid),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| AnalysisError::InvalidArgument(e.to_string()))?
            .install(|| sweep(grid)),
    }
}

pub fn write_csv<W: Write>(records: &[SweepRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<SweepRecord>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header.join(",") != CSV_HEADER {
        return Err(AnalysisError::InvalidArgument(format!(
            "unexpected CSV header `{}`",
            header.join(",")
        )));
    }
    r.deserialize()
        .map(|row| row.map_err(AnalysisError::from))
        .collect()
}

pub fn write_json<W: Write>(records: &[SweepRecord], out: W) -> Result<()> {
    serde_json::to_writer_pretty(out, records)?;
    Ok(())
}

pub fn read_json<R: Read>(input: R) -> Result<Vec<SweepRecord>> {
    Ok(serde_json::from_reader(input)?)
}
