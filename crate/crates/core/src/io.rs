//! Radial profile exchange as CSV (columns: r, value; header row mandatory).

use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{RadialField, RadialGrid};

/// Fixed float formatting used in every emitted artifact: 17 significant
/// digits, scientific notation, locale-free.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes a radial profile as `r,value` rows with a header.
pub fn write_profile_csv(path: &Path, field: &RadialField) -> Result<()> {
    let mut out = String::from("r,value\n");
    for (&r, &v) in field.grid().nodes().iter().zip(field.values()) {
        out.push_str(&fmt_float(r));
        out.push(',');
        out.push_str(&fmt_float(v));
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::ProfileIo(format!("{}: {e}", path.display())))
}

/// Reads a radial profile written by [`write_profile_csv`] (or compatible),
/// attaching it to a fresh grid of the given dimension. The profile's time
/// must be supplied by the caller; CSV carries only the spatial data.
pub fn read_profile_csv(path: &Path, n: u32, time: f64) -> Result<RadialField> {
    let file = std::fs::File::open(path)
        .map_err(|e| Error::ProfileIo(format!("{}: {e}", path.display())))?;
    let reader = BufReader::new(file);
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::ProfileIo("empty profile file".into()))?
        .map_err(|e| Error::ProfileIo(e.to_string()))?;
    let mut cols = header.split(',');
    if cols.next().map(str::trim) != Some("r") || cols.next().map(str::trim) != Some("value") {
        return Err(Error::ProfileIo(format!("bad header {header:?}, expected \"r,value\"")));
    }
    let mut nodes = Vec::new();
    let mut values = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::ProfileIo(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let r: f64 = parts
            .next()
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::ProfileIo(format!("row {}: bad r in {line:?}", i + 2)))?;
        let v: f64 = parts
            .next()
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::ProfileIo(format!("row {}: bad value in {line:?}", i + 2)))?;
        nodes.push(r);
        values.push(v);
    }
    let grid = Arc::new(RadialGrid::from_nodes(n, nodes)?);
    RadialField::new(grid, values, time)
}

/// Atomic text file write: temp in the same directory, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let mut tmp = tempfile_in(dir)?;
    tmp.1.write_all(contents.as_bytes())?;
    tmp.1.sync_all()?;
    drop(tmp.1);
    std::fs::rename(&tmp.0, path)
}

fn tempfile_in(dir: &Path) -> std::io::Result<(std::path::PathBuf, std::fs::File)> {
    use std::time::{SystemTime, UNIX_EPOCH};
    let nanos = SystemTime::now().duration_since(UNIX_EPOCH).unwrap().subsec_nanos();
    let pid = std::process::id();
    for k in 0..64 {
        let candidate = dir.join(format!(".tmp.{pid}.{nanos}.{k}"));
        match std::fs::OpenOptions::new().write(true).create_new(true).open(&candidate) {
            Ok(f) => return Ok((candidate, f)),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(e),
        }
    }
    Err(std::io::Error::other("could not create a temporary file"))
}
