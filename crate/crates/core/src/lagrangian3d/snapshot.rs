//! Binary field snapshots.
//!
//! Layout, all little-endian:
//!
//! | offset | size | content |
//! |-------:|-----:|---------|
//! | 0  | 4 | magic `VPF3` |
//! | 4  | 4 | `u32` format version (1) |
//! | 8  | 12 | `u32` x3 grid shape `n0 n1 n2` |
//! | 20 | 4 | `u32` components (1, 3 or 9) |
//! | 24 | 8 | `f64` box half-length |
//! | 32 | 8 | `f64` time |
//! | 40 | ... | `f64` values, component-major, node `(i, j, k)` at `(i n1 + j) n2 + k` |

use std::path::Path;

use super::grid::{Grid3, PeriodicField3D, Rank};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"VPF3";
pub const VERSION: u32 = 1;
pub const HEADER_BYTES: usize = 40;

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub field: PeriodicField3D,
}

pub fn encode(field: &PeriodicField3D, time: f64) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_BYTES + 8 * field.data.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    for n in field.grid.n {
        out.extend_from_slice(&(n as u32).to_le_bytes());
    }
    out.extend_from_slice(&(field.components() as u32).to_le_bytes());
    out.extend_from_slice(&field.grid.ell.to_le_bytes());
    out.extend_from_slice(&time.to_le_bytes());
    for v in &field.data {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidInput(format!("snapshot: {}", msg.into()))
}

pub fn decode(bytes: &[u8]) -> Result<Snapshot> {
    if bytes.len() < HEADER_BYTES {
        return Err(bad(format!("{} bytes is shorter than the header", bytes.len())));
    }
    if &bytes[0..4] != MAGIC {
        return Err(bad("missing VPF3 magic"));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().expect("4 bytes"));
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().expect("8 bytes"));
    let version = u32_at(4);
    if version != VERSION {
        return Err(bad(format!("unsupported version {version}")));
    }
    let n = [u32_at(8) as usize, u32_at(12) as usize, u32_at(16) as usize];
    let comps = u32_at(20) as usize;
    let rank = Rank::from_components(comps).ok_or_else(|| bad(format!("{comps} components")))?;
    let grid = Grid3::new(n, f64_at(24))?;
    let time = f64_at(32);
    let count = grid.nodes() * comps;
    if bytes.len() != HEADER_BYTES + 8 * count {
        return Err(bad(format!("expected {} value bytes, found {}", 8 * count, bytes.len() - HEADER_BYTES)));
    }
    let data = bytes[HEADER_BYTES..].chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
    Ok(Snapshot {
        time,
        field: PeriodicField3D { grid, rank, data },
    })
}

pub fn write_file(path: &Path, field: &PeriodicField3D, time: f64) -> Result<()> {
    std::fs::write(path, encode(field, time))?;
    Ok(())
}

pub fn read_file(path: &Path) -> Result<Snapshot> {
    decode(&std::fs::read(path)?)
}
