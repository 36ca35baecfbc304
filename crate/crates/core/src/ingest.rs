//! Two-column CSV ingestion with location-scale standardization.

use std::io::BufRead;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{BivariateSample, LocationScale};

/// Reads pairs separated by commas and/or whitespace. Blank lines and lines
/// starting with `#` are skipped; with `header` the first remaining line is
/// skipped too. Columns beyond the second are ignored.
pub fn read_pairs<R: BufRead>(reader: R, header: bool) -> Result<Vec<(usize, f64, f64)>> {
    let mut out = Vec::new();
    let mut skip_header = header;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim().trim_start_matches('\u{feff}');
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if skip_header {
            skip_header = false;
            continue;
        }
        let fields: Vec<&str> = trimmed
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        if fields.len() < 2 {
            return Err(Error::Format { line: lineno, found: fields.len() });
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse { line: lineno, msg: format!("not a finite number: {s:?}") })
        };
        out.push((lineno, parse(fields[0])?, parse(fields[1])?));
    }
    Ok(out)
}

/// Standardizes raw pairs; rows that become negative are rejected together.
pub fn standardize(rows: &[(usize, f64, f64)], loc_scale: &LocationScale) -> Result<BivariateSample> {
    let mut bad = Vec::new();
    let mut pairs = Vec::with_capacity(rows.len());
    for &(line, x1, x2) in rows {
        let (z1, z2) = loc_scale.standardize(x1, x2);
        if z1 < 0.0 || z2 < 0.0 {
            bad.push(line);
        } else {
            pairs.push((z1, z2));
        }
    }
    if bad.is_empty() {
        Ok(BivariateSample::new(pairs))
    } else {
        Err(Error::NegativeRows(bad))
    }
}

pub fn ingest_reader<R: BufRead>(reader: R, loc_scale: &LocationScale, header: bool) -> Result<BivariateSample> {
    standardize(&read_pairs(reader, header)?, loc_scale)
}

pub fn ingest_csv(path: &Path, loc_scale: &LocationScale, header: bool) -> Result<BivariateSample> {
    let file = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    ingest_reader(std::io::BufReader::new(file), loc_scale, header)
}

/// Writes pairs as `x1,x2` lines with a header, using shortest round-trip
/// formatting so exact ties survive a write/read cycle.
pub fn write_pairs<W: std::io::Write>(mut w: W, data: &BivariateSample) -> std::io::Result<()> {
    writeln!(w, "x1,x2")?;
    for (a, b) in &data.pairs {
        writeln!(w, "{a:?},{b:?}")?;
    }
    Ok(())
}
