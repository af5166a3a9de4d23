//! CSV and JSON forms of scan tables and sphere maps.
//!
//! CSV layout:
//!
//! ```text
//! # axis1=r axis2=theta fixed=scenario=accelerated,...,phi=3.141592653589793
//! r,theta,value
//! 0.000000000000e+00,0.000000000000e+00,-5.000000000000e-01
//! ```

use std::io::{Read, Write};

use serde::Serialize;

use crate::analysis::{Axis, ScanTable, SweepVar};
use crate::error::{Error, Result};
use crate::phasespace::{DistributionKind, PhaseSpacePoint};

/// `printf("%.12e")` formatting: twelve mantissa digits, signed two-digit exponent.
pub fn format_sci(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    let s = format!("{v:.12e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

fn header_line(table: &ScanTable) -> String {
    let fixed: Vec<String> = table.fixed.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!(
        "# axis1={} axis2={} fixed=kind={},{}",
        table.axis1.var,
        table.axis2.var,
        table.kind,
        fixed.join(",")
    )
}

pub fn write_csv(table: &ScanTable, out: impl Write) -> Result<()> {
    let mut out = std::io::BufWriter::new(out);
    writeln!(out, "{}", header_line(table)).map_err(io_err)?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record([table.axis1.var.name(), table.axis2.var.name(), "value"])
        .map_err(io_err)?;
    for (i, &a) in table.axis1.values.iter().enumerate() {
        for (j, &b) in table.axis2.values.iter().enumerate() {
            w.write_record([format_sci(a), format_sci(b), format_sci(table.get(i, j))])
                .map_err(io_err)?;
        }
    }
    w.flush().map_err(io_err)
}

pub fn to_csv_string(table: &ScanTable) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(table, &mut buf)?;
    String::from_utf8(buf).map_err(io_err)
}

pub fn write_json(table: &ScanTable, mut out: impl Write) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, table).map_err(io_err)?;
    writeln!(out).map_err(io_err)
}

pub fn read_json(input: impl Read) -> Result<ScanTable> {
    serde_json::from_reader(input).map_err(|e| Error::validation(format!("scan json: {e}")))
}

fn bad(msg: impl Into<String>) -> Error {
    Error::validation(format!("scan csv: {}", msg.into()))
}

/// Parses a table written by [`write_csv`].
pub fn read_csv(mut input: impl Read) -> Result<ScanTable> {
    let mut text = String::new();
    input.read_to_string(&mut text).map_err(io_err)?;
    let (header, body) = text.split_once('\n').ok_or_else(|| bad("missing header"))?;
    let header = header
        .strip_prefix("# ")
        .ok_or_else(|| bad("header must start with '# '"))?;
    let mut var1 = None;
    let mut var2 = None;
    let mut kind = None;
    let mut fixed = Vec::new();
    for field in header.split(' ') {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| bad(format!("malformed field '{field}'")))?;
        match key {
            "axis1" => var1 = Some(value.parse::<SweepVar>()?),
            "axis2" => var2 = Some(value.parse::<SweepVar>()?),
            "fixed" => {
                for kv in value.split(',').filter(|s| !s.is_empty()) {
                    let (k, v) = kv
                        .split_once('=')
                        .ok_or_else(|| bad(format!("malformed fixed entry '{kv}'")))?;
                    if k == "kind" {
                        kind = Some(v.parse::<DistributionKind>()?);
                    } else {
                        fixed.push((k.to_string(), v.to_string()));
                    }
                }
            }
            other => return Err(bad(format!("unknown header field '{other}'"))),
        }
    }
    let (var1, var2) = (
        var1.ok_or_else(|| bad("no axis1"))?,
        var2.ok_or_else(|| bad("no axis2"))?,
    );
    let kind = kind.ok_or_else(|| bad("no kind"))?;

    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(body.as_bytes());
    let mut rows: Vec<[f64; 3]> = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let mut row = [0.0; 3];
        if rec.len() != 3 {
            return Err(bad(format!("expected 3 columns, got {}", rec.len())));
        }
        for (slot, field) in row.iter_mut().zip(rec.iter()) {
            *slot = field.parse().map_err(|_| bad(format!("'{field}' is not a number")))?;
        }
        rows.push(row);
    }
    let mut a1: Vec<f64> = Vec::new();
    for r in &rows {
        if a1.last() != Some(&r[0]) {
            a1.push(r[0]);
        }
    }
    if a1.is_empty() || !rows.len().is_multiple_of(a1.len()) {
        return Err(bad("rows do not form a rectangular grid"));
    }
    let n2 = rows.len() / a1.len();
    let a2: Vec<f64> = rows[..n2].iter().map(|r| r[1]).collect();
    Ok(ScanTable {
        axis1: Axis { var: var1, values: a1 },
        axis2: Axis { var: var2, values: a2 },
        fixed,
        kind,
        values: rows.iter().map(|r| r[2]).collect(),
    })
}

/// One sample of a sphere map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SphereMapRow {
    pub theta: f64,
    pub phi: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub value: f64,
}

/// Cartesian rows of a `θ × φ` (or `φ × θ`) table.
pub fn sphere_map_rows(table: &ScanTable) -> Result<Vec<SphereMapRow>> {
    let theta_first = match (table.axis1.var, table.axis2.var) {
        (SweepVar::Theta, SweepVar::Phi) => true,
        (SweepVar::Phi, SweepVar::Theta) => false,
        (a, b) => {
            return Err(Error::validation(format!(
                "sphere map needs theta and phi axes, got {a},{b}"
            )))
        }
    };
    let mut rows = Vec::with_capacity(table.values.len());
    for (i, &a) in table.axis1.values.iter().enumerate() {
        for (j, &b) in table.axis2.values.iter().enumerate() {
            let (theta, phi) = if theta_first { (a, b) } else { (b, a) };
            let [x, y, z] = PhaseSpacePoint::new(theta, phi)?.cartesian();
            rows.push(SphereMapRow {
                theta,
                phi,
                x,
                y,
                z,
                value: table.get(i, j),
            });
        }
    }
    Ok(rows)
}

pub fn write_sphere_map_csv(table: &ScanTable, out: impl Write) -> Result<()> {
    let rows = sphere_map_rows(table)?;
    let mut out = std::io::BufWriter::new(out);
    writeln!(out, "{}", header_line(table)).map_err(io_err)?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(["theta", "phi", "x", "y", "z", "value"])
        .map_err(io_err)?;
    for r in rows {
        w.write_record([r.theta, r.phi, r.x, r.y, r.z, r.value].map(format_sci))
            .map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

#[derive(Serialize)]
struct SphereMapJson<'a> {
    axis1: SweepVar,
    axis2: SweepVar,
    kind: DistributionKind,
    fixed: &'a [(String, String)],
    rows: Vec<SphereMapRow>,
}

pub fn write_sphere_map_json(table: &ScanTable, mut out: impl Write) -> Result<()> {
    let doc = SphereMapJson {
        axis1: table.axis1.var,
        axis2: table.axis2.var,
        kind: table.kind,
        fixed: &table.fixed,
        rows: sphere_map_rows(table)?,
    };
    serde_json::to_writer_pretty(&mut out, &doc).map_err(io_err)?;
    writeln!(out).map_err(io_err)
}
