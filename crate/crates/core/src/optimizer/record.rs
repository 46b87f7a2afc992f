//! One-record-per-`L` output shared by the CSV and JSON emitters.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::MaximizerResult;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximizerRecord {
    #[serde(rename = "L")]
    pub l: usize,
    pub depth: usize,
    pub p: Vec<f64>,
    pub dim_lo: f64,
    pub dim_hi: f64,
    pub kkt_residual: f64,
    pub converged: bool,
}

impl From<&MaximizerResult> for MaximizerRecord {
    fn from(r: &MaximizerResult) -> Self {
        Self {
            l: r.l,
            depth: r.depth,
            p: r.p_opt.weights().to_vec(),
            dim_lo: r.dim.lo,
            dim_hi: r.dim.hi,
            kkt_residual: r.kkt_residual,
            converged: r.converged,
        }
    }
}

#[derive(Serialize)]
struct CsvRow {
    #[serde(rename = "L")]
    l: usize,
    depth: usize,
    p: String,
    dim_lo: f64,
    dim_hi: f64,
    kkt_residual: f64,
    converged: bool,
}

/// CSV with the `p` components joined by spaces in one column.
pub fn write_csv<W: Write>(out: W, records: &[MaximizerRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        let p = r.p.iter().map(|x| format!("{x:.12}")).collect::<Vec<_>>().join(" ");
        w.serialize(CsvRow {
            l: r.l,
            depth: r.depth,
            p,
            dim_lo: r.dim_lo,
            dim_hi: r.dim_hi,
            kkt_residual: r.kkt_residual,
            converged: r.converged,
        })
        .map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// JSON lines, one object per record.
pub fn write_json<W: Write>(mut out: W, records: &[MaximizerRecord]) -> Result<()> {
    for r in records {
        let line = serde_json::to_string(r).map_err(|e| Error::Io(e.to_string()))?;
        writeln!(out, "{line}")?;
    }
    Ok(())
}
