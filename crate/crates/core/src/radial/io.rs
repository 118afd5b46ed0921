//! Plain-text wave-function snapshots.
//!
//! ```text
//! # r re_psi im_psi density
//! 5.8593750000000000e-2 1.0e0 0.0e0 1.0e0
//! ...
//! ```
//!
//! Extra `#` lines (such as `# eps=<v> a=<v> branch=<name>`) are kept as
//! metadata on read.

use std::io::{BufRead, Write};

use num_complex::Complex64;

use super::{RadialGrid, RadialWaveFunction};
use crate::error::{domain, Result};

pub const SNAPSHOT_HEADER: &str = "# r re_psi im_psi density";

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub psi: RadialWaveFunction,
    /// Comment lines other than the column header, without the leading `#`.
    pub metadata: Vec<String>,
}

impl Snapshot {
    /// Value of `key=<v>` from the metadata lines.
    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata
            .iter()
            .flat_map(|l| l.split_whitespace())
            .find_map(|kv| kv.strip_prefix(key)?.strip_prefix('='))
    }
}

/// Writes the snapshot; `metadata` lines are emitted after the header as `# <line>`.
pub fn write_snapshot<W: Write>(mut w: W, psi: &RadialWaveFunction, metadata: &[String]) -> std::io::Result<()> {
    writeln!(w, "{SNAPSHOT_HEADER}")?;
    for m in metadata {
        writeln!(w, "# {m}")?;
    }
    for (k, z) in psi.values().iter().enumerate() {
        writeln!(w, "{:.16e} {:.16e} {:.16e} {:.16e}", psi.grid().radius(k), z.re, z.im, z.norm_sqr())?;
    }
    Ok(())
}

/// Reads a snapshot written by [`write_snapshot`]. The grid is recovered
/// from the first radius (`dr`) and the sample count.
pub fn read_snapshot<R: BufRead>(r: R) -> Result<Snapshot> {
    let mut metadata = Vec::new();
    let mut radii = Vec::new();
    let mut values = Vec::new();
    for (no, line) in r.lines().enumerate() {
        let line = line.map_err(|e| domain(format!("snapshot read failed: {e}")))?;
        let t = line.trim();
        if t.is_empty() || t == SNAPSHOT_HEADER {
            continue;
        }
        if let Some(c) = t.strip_prefix('#') {
            metadata.push(c.trim().to_string());
            continue;
        }
        let cols: Vec<f64> = t
            .split_whitespace()
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| domain(format!("snapshot line {}: {e}", no + 1)))?;
        if cols.len() < 3 {
            return Err(domain(format!("snapshot line {}: expected at least 3 columns", no + 1)));
        }
        radii.push(cols[0]);
        values.push(Complex64::new(cols[1], cols[2]));
    }
    if radii.len() < 3 {
        return Err(domain("snapshot holds fewer than 3 samples"));
    }
    let dr = radii[0];
    for (k, r) in radii.iter().enumerate() {
        if ((k + 1) as f64 * dr - r).abs() > 1e-9 * r.max(1.0) {
            return Err(domain(format!("snapshot radii are not the grid k·dr (row {})", k + 1)));
        }
    }
    let n = radii.len() + 1;
    let grid = RadialGrid::new(n, dr * n as f64)?;
    Ok(Snapshot { psi: RadialWaveFunction::new(grid, values)?, metadata })
}
