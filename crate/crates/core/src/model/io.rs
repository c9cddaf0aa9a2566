//! Text file formats: profile CSV, spectral-data JSON, eigen-set JSON,
//! curve CSV, reconstructed-profile CSV and spectral-function CSV.
//!
//! Every reader has a `&str` entry point so it can be driven directly by the
//! fuzz targets, plus a path wrapper for the CLI.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{
    CurveKind, CurveValues, EigenPair, Mode, PotentialProfile, SampledCurve, SpectralData,
    SpectralFunction,
};
use crate::error::{Error, Result};

/// Reads `# key=value` comment lines preceding or interleaved with the data.
fn comment_value<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    text.lines().find_map(|line| {
        let rest = line.trim().strip_prefix('#')?.trim();
        let (k, v) = rest.split_once('=')?;
        (k.trim() == key).then(|| v.trim())
    })
}

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(text.as_bytes())
}

fn parse_field(record: &csv::StringRecord, idx: usize, name: &str) -> Result<f64> {
    let line = record.position().map_or(0, |p| p.line() as usize);
    let raw = record.get(idx).ok_or_else(|| Error::Parse {
        line,
        detail: format!("missing column `{name}`"),
    })?;
    raw.parse::<f64>().map_err(|e| Error::Parse {
        line,
        detail: format!("column `{name}`: {e} ({raw:?})"),
    })
}

fn expect_header(rdr: &mut csv::Reader<&[u8]>, want: &[&[&str]]) -> Result<usize> {
    let headers = rdr.headers()?.clone();
    let got: Vec<&str> = headers.iter().collect();
    want.iter()
        .position(|w| *w == got.as_slice())
        .ok_or_else(|| Error::Parse {
            line: 1,
            detail: format!("unexpected header {got:?}, expected one of {want:?}"),
        })
}

/// Parses a profile CSV: header `z,q` (or `z,q,n` as written for a
/// reconstruction, `n` ignored), optional `# k=<value>` comment (default
/// `k = 1`).
pub fn parse_profile_csv(text: &str) -> Result<PotentialProfile> {
    let k = match comment_value(text, "k") {
        Some(v) => v.parse::<f64>().map_err(|e| Error::Parse {
            line: 0,
            detail: format!("bad k comment: {e}"),
        })?,
        None => 1.0,
    };
    let mut rdr = csv_reader(text);
    expect_header(&mut rdr, &[&["z", "q"], &["z", "q", "n"]])?;
    let mut nodes = Vec::new();
    let mut values = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        nodes.push(parse_field(&rec, 0, "z")?);
        values.push(parse_field(&rec, 1, "q")?);
    }
    PotentialProfile::new(nodes, values, k)
}

pub fn format_profile_csv(p: &PotentialProfile) -> String {
    let mut out = format!("# k={}\nz,q\n", p.k());
    for (z, q) in p.nodes().iter().zip(p.values()) {
        let _ = writeln!(out, "{z},{q}");
    }
    out
}

/// Reconstructed profile as `z,q,n` with `n = q/k²`.
pub fn format_q_hat_csv(p: &PotentialProfile) -> String {
    let mut out = format!("# k={}\nz,q,n\n", p.k());
    let k2 = p.k() * p.k();
    for (z, q) in p.nodes().iter().zip(p.values()) {
        let _ = writeln!(out, "{z},{q},{}", q / k2);
    }
    out
}

/// Spectral function as `lambda,rho`: one row per jump, holding the value
/// just to the right of it.
pub fn format_rho_csv(rho: &SpectralFunction) -> String {
    let mut out = String::from("lambda,rho\n");
    let mut acc = 0.0;
    for j in rho.jumps() {
        acc += j.weight;
        let _ = writeln!(out, "{},{acc}", j.location);
    }
    out
}

pub fn read_profile(path: &Path) -> Result<PotentialProfile> {
    parse_profile_csv(&std::fs::read_to_string(path)?)
}

pub fn write_profile(path: &Path, p: &PotentialProfile) -> Result<()> {
    std::fs::write(path, format_profile_csv(p))?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct SpectralDataFile {
    modes: Vec<Mode>,
}

/// Parses `{"modes":[{"lambda_sq":..,"t":..},..]}`. Unknown fields are
/// ignored so inversion output (which adds `alpha`) reads back too.
pub fn parse_spectral_json(text: &str) -> Result<SpectralData> {
    let file: SpectralDataFile = serde_json::from_str(text)?;
    SpectralData::new(file.modes)
}

pub fn format_spectral_json(sd: &SpectralData) -> String {
    let file = SpectralDataFile {
        modes: sd.modes().to_vec(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("spectral data serializes");
    s.push('\n');
    s
}

/// Forward-solver output: one entry per mode with `lambda_sq`, `psi_end`,
/// `alpha`, `t`. The `modes` key makes it readable as spectral data too.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenFile {
    pub profile_hash: String,
    pub grid: usize,
    pub modes: Vec<EigenPair>,
}

pub fn parse_eigen_json(text: &str) -> Result<EigenFile> {
    let file: EigenFile = serde_json::from_str(text)?;
    if file.modes.is_empty() {
        return Err(Error::validation("eigen file has no modes"));
    }
    let finite = file
        .modes
        .iter()
        .all(|m| m.lambda_sq.is_finite() && m.psi_end.is_finite() && m.t.is_finite());
    if !finite {
        return Err(Error::validation("eigen file: non-finite entries"));
    }
    if file
        .modes
        .iter()
        .any(|m| !(m.alpha.is_finite() && m.alpha > 0.0))
    {
        return Err(Error::validation("eigen file: alpha must be positive"));
    }
    if file
        .modes
        .windows(2)
        .any(|w| !(w[1].lambda_sq > w[0].lambda_sq))
    {
        return Err(Error::validation(
            "eigen file: lambda_sq must be strictly increasing",
        ));
    }
    Ok(file)
}

pub fn format_eigen_json(file: &EigenFile) -> String {
    let mut s = serde_json::to_string_pretty(file).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn read_spectral(path: &Path) -> Result<SpectralData> {
    parse_spectral_json(&std::fs::read_to_string(path)?)
}

/// Parses a curve CSV with header `x,value` (real) or `x,re,im` (complex).
/// A `# kind=<tag>` comment sets the kind; otherwise `default_kind` is used.
pub fn parse_curve_csv(text: &str, default_kind: CurveKind) -> Result<SampledCurve> {
    let kind = match comment_value(text, "kind") {
        Some(tag) => CurveKind::parse(tag).ok_or_else(|| Error::Parse {
            line: 0,
            detail: format!("unknown curve kind {tag:?}"),
        })?,
        None => default_kind,
    };
    let mut rdr = csv_reader(text);
    let layout = expect_header(&mut rdr, &[&["x", "value"], &["x", "re", "im"]])?;
    let mut xs = Vec::new();
    let mut re = Vec::new();
    let mut im = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        xs.push(parse_field(&rec, 0, "x")?);
        if layout == 0 {
            re.push(parse_field(&rec, 1, "value")?);
        } else {
            re.push(parse_field(&rec, 1, "re")?);
            im.push(parse_field(&rec, 2, "im")?);
        }
    }
    let values = if layout == 0 {
        CurveValues::Real(re)
    } else {
        CurveValues::Complex(
            re.into_iter()
                .zip(im)
                .map(|(a, b)| Complex64::new(a, b))
                .collect(),
        )
    };
    SampledCurve::new(xs, values, kind)
}

pub fn format_curve_csv(c: &SampledCurve) -> String {
    let mut out = format!("# kind={}\n", c.kind().as_str());
    match c.values() {
        CurveValues::Real(v) => {
            out.push_str("x,value\n");
            for (x, y) in c.abscissae().iter().zip(v) {
                let _ = writeln!(out, "{x},{y}");
            }
        }
        CurveValues::Complex(v) => {
            out.push_str("x,re,im\n");
            for (x, y) in c.abscissae().iter().zip(v) {
                let _ = writeln!(out, "{x},{},{}", y.re, y.im);
            }
        }
    }
    out
}

pub fn read_curve(path: &Path, default_kind: CurveKind) -> Result<SampledCurve> {
    parse_curve_csv(&std::fs::read_to_string(path)?, default_kind)
}

pub fn write_curve(path: &Path, c: &SampledCurve) -> Result<()> {
    std::fs::write(path, format_curve_csv(c))?;
    Ok(())
}

/// Field slice at fixed depth as CSV `r,z,re,im`.
pub fn format_field_slice_csv(r: &[f64], z: f64, u: &[Complex64]) -> String {
    let mut out = String::from("r,z,re,im\n");
    for (ri, ui) in r.iter().zip(u) {
        let _ = writeln!(out, "{ri},{z},{},{}", ui.re, ui.im);
    }
    out
}
