//! Field persistence: a small binary format and a CSV dump.
//!
//! Binary layout: `b"GRF1"`, `u32` grid size, `f64` spacing (16-byte header,
//! little-endian), then `n * n` row-major `f64` values.

use std::io::Write;
use std::path::Path;

use super::field::GridField;
use crate::error::{LabError, Result};

const MAGIC: &[u8; 4] = b"GRF1";
const HEADER_LEN: usize = 16;

pub fn field_to_bytes(field: &GridField) -> Vec<u8> {
    let n = field.size();
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * n * n);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(n as u32).to_le_bytes());
    out.extend_from_slice(&field.spacing().to_le_bytes());
    for v in field.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Parses the binary format. Imported fields carry no boundary convention
/// and are centered on the plane origin.
pub fn field_from_bytes(bytes: &[u8]) -> Result<GridField> {
    if bytes.len() < HEADER_LEN {
        return Err(LabError::Parse {
            offset: bytes.len() as u64,
            message: "truncated header".into(),
        });
    }
    if &bytes[..4] != MAGIC {
        return Err(LabError::Parse {
            offset: 0,
            message: "missing GRF1 magic".into(),
        });
    }
    let n = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let spacing = f64::from_le_bytes(bytes[8..16].try_into().unwrap());
    let expected = HEADER_LEN + 8 * n * n;
    if bytes.len() != expected {
        return Err(LabError::Parse {
            offset: bytes.len().min(expected) as u64,
            message: format!("expected {expected} bytes for a {n}x{n} field, found {}", bytes.len()),
        });
    }
    let values = bytes[HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    GridField::free(n, spacing, values).map_err(|e| LabError::Parse {
        offset: 4,
        message: e.to_string(),
    })
}

pub fn write_field(field: &GridField, path: &Path) -> Result<()> {
    std::fs::write(path, field_to_bytes(field)).map_err(|e| LabError::io(path, e))
}

pub fn read_field(path: &Path) -> Result<GridField> {
    let bytes = std::fs::read(path).map_err(|e| LabError::io(path, e))?;
    field_from_bytes(&bytes)
}

/// One CSV row per lattice row, `iy = 0` first.
pub fn write_field_csv<W: Write>(field: &GridField, out: W) -> std::io::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    let n = field.size();
    for row in field.values().chunks(n) {
        w.write_record(row.iter().map(|v| format!("{v:e}")))?;
    }
    w.flush()
}
