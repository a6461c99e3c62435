//! `t,x` CSV series: strictly increasing, uniformly spaced times and strictly
//! positive values. Rows in messages count data lines from 1.

use std::io::{Read, Write};

use cirlan_core::Path;

use crate::error::CliError;
use crate::report::format_float;

/// Relative tolerance on the uniform time grid.
pub const SPACING_TOL: f64 = 1e-9;

pub fn parse_series<R: Read>(reader: R) -> Result<Path, CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .quoting(false)
        .trim(csv::Trim::None)
        .from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| CliError::Data(format!("unreadable header: {e}")))?;
    if header.iter().collect::<Vec<_>>() != ["t", "x"] {
        return Err(CliError::Data(format!(
            "header must be exactly \"t,x\", got \"{}\"",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (row, record) in (1..).zip(rdr.records()) {
        let record = record.map_err(|e| CliError::Data(format!("row {row}: {e}")))?;
        if record.len() != 2 {
            return Err(CliError::Data(format!(
                "row {row}: expected 2 fields, got {}",
                record.len()
            )));
        }
        let parse = |s: &str, what: &str| -> Result<f64, CliError> {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| {
                    CliError::Data(format!("row {row}: {what} \"{s}\" is not a finite number"))
                })
        };
        let t = parse(&record[0], "time")?;
        let x = parse(&record[1], "value")?;
        if !(x > 0.0) {
            return Err(CliError::Data(format!(
                "row {row}: value {x} is not strictly positive"
            )));
        }
        if let Some(&prev) = times.last() {
            if !(t > prev) {
                return Err(CliError::Data(format!(
                    "row {row}: time {t} does not increase"
                )));
            }
        }
        times.push(t);
        values.push(x);
    }
    if times.len() < 3 {
        return Err(CliError::Data(format!(
            "need at least 3 rows, got {}",
            times.len()
        )));
    }
    let n = times.len() - 1;
    let t0 = times[0];
    let delta = (times[n] - t0) / n as f64;
    for (k, &t) in times.iter().enumerate() {
        let (row, expected) = (k + 1, t0 + k as f64 * delta);
        if (t - expected).abs() > SPACING_TOL * delta {
            return Err(CliError::Data(format!(
                "row {row}: time {t} off the uniform grid (expected {expected}, step {delta})"
            )));
        }
    }
    Path::new(t0, delta, values).map_err(|e| CliError::Data(e.to_string()))
}

pub fn write_series<W: Write>(mut out: W, path: &Path) -> std::io::Result<()> {
    writeln!(out, "t,x")?;
    for (t, x) in path.times().zip(path.values()) {
        writeln!(out, "{},{}", format_float(t), format_float(*x))?;
    }
    out.flush()
}
