//! Field snapshots: a little-endian `u64` header length, a JSON header,
//! then the arrays as little-endian `f64` in the order the header lists.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnapshotHeader {
    pub format: String,
    pub n1: usize,
    pub n2: usize,
    pub l1: f64,
    pub t: f64,
    /// Per-node variable order, e.g. `["p", "u1", "u2", "H1", "H2", "S"]`.
    pub variables: Vec<String>,
    /// Array names in file order; each holds `n1 * n2 * variables.len()`
    /// values (row-major in `(i1, i2, variable)`), except arrays named
    /// `front*` which hold `n2` values.
    pub arrays: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub header: SnapshotHeader,
    pub data: Vec<Vec<f64>>,
}

pub fn write_snapshot(path: &Path, snap: &Snapshot) -> Result<()> {
    if snap.data.len() != snap.header.arrays.len() {
        return Err(Error::Io("snapshot arrays do not match the header".into()));
    }
    let header = serde_json::to_vec(&snap.header)?;
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    f.write_all(&(header.len() as u64).to_le_bytes())?;
    f.write_all(&header)?;
    for a in &snap.data {
        for x in a {
            f.write_all(&x.to_le_bytes())?;
        }
    }
    f.flush()?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    let bad = || Error::Io("truncated snapshot".into());
    let len = u64::from_le_bytes(bytes.get(..8).ok_or_else(bad)?.try_into().unwrap()) as usize;
    let header: SnapshotHeader = serde_json::from_slice(bytes.get(8..8 + len).ok_or_else(bad)?)?;
    let mut pos = 8 + len;
    let mut data = Vec::new();
    for name in &header.arrays {
        let count = if name.starts_with("front") {
            header.n2
        } else {
            header.n1 * header.n2 * header.variables.len()
        };
        let mut a = Vec::with_capacity(count);
        for _ in 0..count {
            let b = bytes.get(pos..pos + 8).ok_or_else(bad)?;
            a.push(f64::from_le_bytes(b.try_into().unwrap()));
            pos += 8;
        }
        data.push(a);
    }
    if pos != bytes.len() {
        return Err(Error::Io("trailing bytes in snapshot".into()));
    }
    Ok(Snapshot { header, data })
}
