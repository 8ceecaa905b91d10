//! File writers. Series are CSV with one header row and a fixed column
//! order; summaries are pretty-printed JSON with sorted keys.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;
use crate::evolution::TrajectoryRecord;

pub const SERIES_COLUMNS: [&str; 12] = [
    "t",
    "step",
    "dt",
    "mass",
    "energy",
    "gradient_norm",
    "max_abs",
    "I",
    "I_prime",
    "I_double_prime",
    "exterior_mass",
    "virial_P",
];

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn series_csv(rec: &TrajectoryRecord) -> String {
    let mut s = SERIES_COLUMNS.join(",");
    s.push('\n');
    for row in &rec.samples {
        let v = row.virial;
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            row.time,
            row.step,
            row.dt,
            row.report.mass,
            row.report.energy,
            row.gradient_norm,
            row.max_abs,
            opt(v.map(|v| v.i)),
            opt(v.map(|v| v.i_prime)),
            opt(v.map(|v| v.i_double_prime)),
            opt(row.exterior_mass),
            row.report.virial,
        );
    }
    s
}

/// Header plus rows of already formatted cells.
pub fn table_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s
}

/// Keys come out sorted because `serde_json::Value` maps are ordered.
pub fn json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

pub fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}
