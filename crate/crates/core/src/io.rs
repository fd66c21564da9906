//! JSON and CSV serialization with fixed float formatting, and atomic file
//! output.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::edge::{EdgeCount, RibbonSpectrum};
use crate::error::{Error, Result};
use crate::invariants::{CriticalPoint, InvariantResult, PhaseInterval, Z2Indices};
use crate::ktable::TableRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::UnsupportedFormat(other.to_string())),
        }
    }
}

/// Seventeen significant digits in scientific notation.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

struct FixedFloat;

impl serde_json::ser::Formatter for FixedFloat {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
}

/// Compact JSON in field-declaration order with fixed float formatting.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloat);
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

/// A finished result that can be written as JSON and, where a tabular
/// layout exists, as CSV.
pub trait Record: Serialize {
    fn csv(&self) -> Result<String> {
        Err(Error::UnsupportedFormat("csv is not available for this result".into()))
    }
}

pub fn serialize<T: Record + ?Sized>(value: &T, format: Format) -> Result<String> {
    match format {
        Format::Json => to_json(value),
        Format::Csv => value.csv(),
    }
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, fmt_f64)
}

impl Record for InvariantResult {
    fn csv(&self) -> Result<String> {
        Ok(format!(
            "name,raw,value,residual,grid\n{},{},{},{},{}\n",
            self.name,
            fmt_f64(self.raw),
            self.value,
            fmt_f64(self.residual),
            self.grid
        ))
    }
}

impl Record for [PhaseInterval] {
    fn csv(&self) -> Result<String> {
        let mut out = String::from("m_lo,m_hi,value\n");
        for p in self {
            let _ = writeln!(out, "{},{},{}", opt(p.m_lo), opt(p.m_hi), p.value);
        }
        Ok(out)
    }
}

impl Record for Vec<PhaseInterval> {
    fn csv(&self) -> Result<String> {
        self.as_slice().csv()
    }
}

impl Record for [CriticalPoint] {
    fn csv(&self) -> Result<String> {
        let dim = self.first().map_or(0, |p| p.location.len().saturating_sub(1));
        let mut out = String::new();
        for i in 0..dim {
            let _ = write!(out, "k{i},");
        }
        out.push_str("m,degree,degenerate,jacobian_det,residual\n");
        for p in self {
            for x in &p.location {
                let _ = write!(out, "{},", fmt_f64(*x));
            }
            let _ = writeln!(
                out,
                "{},{},{},{}",
                p.degree,
                p.degenerate,
                fmt_f64(p.jacobian_det),
                fmt_f64(p.residual)
            );
        }
        Ok(out)
    }
}

impl Record for Vec<CriticalPoint> {
    fn csv(&self) -> Result<String> {
        self.as_slice().csv()
    }
}

/// One row per momentum: `k, E_1, …, E_{W·n_orb}`.
impl Record for RibbonSpectrum {
    fn csv(&self) -> Result<String> {
        let mut out = String::from("k");
        let n = self.width * self.n_orb;
        for i in 1..=n {
            let _ = write!(out, ",E{i}");
        }
        out.push('\n');
        for (k, es) in self.k.iter().zip(&self.energies) {
            out.push_str(&fmt_f64(*k));
            for e in es {
                out.push(',');
                out.push_str(&fmt_f64(*e));
            }
            out.push('\n');
        }
        Ok(out)
    }
}

impl Record for EdgeCount {
    fn csv(&self) -> Result<String> {
        Ok(format!(
            "n_plus,n_minus,left,right,helical\n{},{},{},{},{}\n",
            self.n_plus, self.n_minus, self.per_edge[0], self.per_edge[1], self.helical
        ))
    }
}

impl Record for Z2Indices {}

impl Record for [TableRow] {
    fn csv(&self) -> Result<String> {
        let d_max = self.first().map_or(0, |r| r.cells.len());
        let mut out = String::from("class");
        for d in 0..d_max {
            let _ = write!(out, ",d{d}");
        }
        out.push('\n');
        for row in self {
            out.push_str(row.label.name());
            for cell in &row.cells {
                let _ = write!(out, ",{}", cell.group);
            }
            out.push('\n');
        }
        Ok(out)
    }
}

impl Record for Vec<TableRow> {
    fn csv(&self) -> Result<String> {
        self.as_slice().csv()
    }
}

impl Record for serde_json::Value {}

/// Writes `contents` to a temporary file next to `path` and renames it into
/// place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}
