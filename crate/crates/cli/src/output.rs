//! Serialization of results, dataset fingerprints and phase timings.

use std::collections::BTreeMap;
use std::time::Instant;

use gpnet::data::{ColumnKind, Dataset};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Hex SHA-256 prefix over column names, kinds and the bit patterns of all
/// values, identifying exactly the data a score was computed from.
pub fn fingerprint(data: &Dataset) -> String {
    let mut h = Sha256::new();
    for c in data.columns() {
        h.update(c.name.as_bytes());
        h.update([0]);
        match c.kind {
            ColumnKind::Continuous => h.update(b"c"),
            ColumnKind::Discrete { arity } => h.update(format!("d{arity}").as_bytes()),
        }
    }
    h.update((data.n_rows() as u64).to_le_bytes());
    for v in data.values().iter() {
        h.update(v.to_bits().to_le_bytes());
    }
    hex(&h.finalize()[..8])
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Stable seed for one experiment cell.
pub fn derive_seed(parts: &[&str]) -> u64 {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p.as_bytes());
        h.update([0x1f]);
    }
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

/// Accumulated wall-clock seconds per named phase.
#[derive(Debug, Default, Clone, Serialize)]
pub struct Timings {
    pub phases: BTreeMap<String, f64>,
}

impl Timings {
    pub fn time<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        *self.phases.entry(phase.to_string()).or_default() += start.elapsed().as_secs_f64();
        out
    }

    pub fn merge(&mut self, other: &Timings) {
        for (k, v) in &other.phases {
            *self.phases.entry(k.clone()).or_default() += v;
        }
    }
}

pub fn csv_bytes<R: Serialize>(rows: &[R]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Compute(format!("csv serialization: {e}")))?;
    }
    w.into_inner().map_err(|e| CliError::Compute(format!("csv serialization: {e}")))
}

/// Like [`csv_bytes`] but writes the header even with no rows.
pub fn csv_bytes_with_header<R: Serialize>(rows: &[R], header: &[&str]) -> Result<Vec<u8>, CliError> {
    if rows.is_empty() {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header).map_err(|e| CliError::Compute(e.to_string()))?;
        return w.into_inner().map_err(|e| CliError::Compute(e.to_string()));
    }
    csv_bytes(rows)
}

pub fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut out = serde_json::to_vec_pretty(value).map_err(|e| CliError::Compute(format!("json serialization: {e}")))?;
    out.push(b'\n');
    Ok(out)
}

/// Result of one command: the primary output and its timings.
#[derive(Debug)]
pub struct Output {
    pub body: Vec<u8>,
    pub timings: Timings,
}
