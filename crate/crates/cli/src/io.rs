//! CSV and JSON input/output.
//!
//! All numeric output is full-precision decimal (17 significant digits),
//! which round-trips f64 exactly and keeps verification defects honest.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use nulfrac_core::{Grid64, GridFunction, Lattice64, LatticeSpec};
use nulfrac_verify::CheckReport;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("spacing error: {0}")]
    Spacing(String),
    #[error("empty input: {0}")]
    Empty(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Core(#[from] nulfrac_core::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
}

/// 17 significant digits: enough to reproduce any finite f64 exactly.
pub fn full_precision(v: f64) -> String {
    format!("{:.16e}", v)
}

/// Loads a grid function from a `s,f` CSV with unit-spaced s column.
pub fn load_grid_csv(path: &Path) -> Result<Grid64, CliError> {
    let text = fs::read_to_string(path)?;
    parse_grid_csv(&text)
}

pub fn parse_grid_csv(text: &str) -> Result<Grid64, CliError> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::Empty("no header line".into()))?
        .trim()
        .trim_start_matches('\u{feff}');
    if header != "s,f" {
        return Err(CliError::Parse(format!("expected header 's,f', got '{}'", header)));
    }
    let mut points = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let s = parts
            .next()
            .and_then(|v| v.trim().parse::<f64>().ok())
            .ok_or_else(|| CliError::Parse(format!("bad s value on data line {}", lineno + 1)))?;
        let f = parts
            .next()
            .and_then(|v| v.trim().parse::<f64>().ok())
            .ok_or_else(|| CliError::Parse(format!("bad f value on data line {}", lineno + 1)))?;
        if parts.next().is_some() {
            return Err(CliError::Parse(format!("extra columns on data line {}", lineno + 1)));
        }
        points.push((s, f));
    }
    if points.is_empty() {
        return Err(CliError::Empty("no data rows".into()));
    }
    for w in points.windows(2) {
        let step = w[1].0 - w[0].0;
        if (step - 1.0).abs() > 1e-9 {
            return Err(CliError::Spacing(format!(
                "grid step between s={} and s={} is {}, expected 1",
                w[0].0, w[1].0, step
            )));
        }
    }
    let base = points[0].0;
    let values = points.into_iter().map(|(_, f)| f).collect();
    Ok(GridFunction::new(base, values)?)
}

pub fn write_grid_csv(path: &Path, g: &Grid64) -> Result<(), CliError> {
    let mut out = String::from("s,f\n");
    for i in 0..g.count() {
        out.push_str(&full_precision(g.point(i)));
        out.push(',');
        out.push_str(&full_precision(g.values()[i]));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Writes a `z,value,err_estimate` series CSV.
pub fn write_series_csv(path: &Path, rows: &[(f64, f64, f64)]) -> Result<(), CliError> {
    let mut out = String::from("z,value,err_estimate\n");
    for (z, v, e) in rows {
        out.push_str(&format!("{},{},{}\n", full_precision(*z), full_precision(*v), full_precision(*e)));
    }
    fs::write(path, out)?;
    Ok(())
}

/// JSON formatter printing every float with 17 significant digits.
struct FullPrecisionFormatter;

impl serde_json::ser::Formatter for FullPrecisionFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        write!(writer, "{:.16e}", value)
    }
}

pub fn to_json_full_precision<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FullPrecisionFormatter);
    value
        .serialize(&mut ser)
        .map_err(|e| CliError::Parse(format!("json serialization failed: {}", e)))?;
    String::from_utf8(buf).map_err(|e| CliError::Parse(format!("non-utf8 json: {}", e)))
}

/// Writes the verification report array; refuses an empty list.
pub fn write_report_json(path: &Path, reports: &[CheckReport]) -> Result<(), CliError> {
    if reports.is_empty() {
        return Err(CliError::Io(std::io::Error::new(
            std::io::ErrorKind::InvalidInput,
            "refusing to write an empty report list",
        )));
    }
    let json = to_json_full_precision(&reports.to_vec())?;
    fs::write(path, json)?;
    Ok(())
}

/// Lattice description as it appears in config files and `--lattice`.
#[derive(Debug, Clone, Deserialize)]
pub struct LatticeJson {
    pub family: String,
    #[serde(default)]
    pub q: Option<f64>,
    #[serde(default)]
    pub c1: Option<f64>,
    #[serde(default)]
    pub c2: Option<f64>,
    #[serde(default)]
    pub c3: Option<f64>,
}

impl LatticeJson {
    pub fn build(&self) -> Result<Lattice64, CliError> {
        let c1 = self.c1.unwrap_or(1.0);
        let c2 = self.c2.unwrap_or(0.0);
        let c3 = self.c3.unwrap_or(0.0);
        let lat = match self.family.as_str() {
            "linear" => LatticeSpec::linear(if self.c2.is_some() { c2 } else { 1.0 }, c3)?,
            "quadratic" => LatticeSpec::quadratic(c1, c2, c3)?,
            "q_linear" => {
                let q = self.q.ok_or_else(|| CliError::Config("q_linear needs q".into()))?;
                LatticeSpec::q_linear(q, c1, c3)?
            }
            "q_quadratic" => {
                let q = self.q.ok_or_else(|| CliError::Config("q_quadratic needs q".into()))?;
                LatticeSpec::q_quadratic(q, c1, c2, c3)?
            }
            other => return Err(CliError::Config(format!("unknown lattice family '{}'", other))),
        };
        Ok(lat)
    }
}

pub fn parse_lattice_arg(arg: &str) -> Result<Lattice64, CliError> {
    let spec: LatticeJson = serde_json::from_str(arg)
        .map_err(|e| CliError::Config(format!("bad lattice JSON: {}", e)))?;
    spec.build()
}

/// Optional defaults read from `--config`.
#[derive(Debug, Clone, Default, Deserialize)]
pub struct FileConfig {
    #[serde(default)]
    pub lattice: Option<LatticeJson>,
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub input: Option<String>,
    #[serde(default)]
    pub output: Option<String>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub trials: Option<u32>,
    #[serde(default)]
    pub tail_tol: Option<f64>,
    #[serde(default)]
    pub max_terms: Option<usize>,
}

pub fn load_config(path: &Path) -> Result<FileConfig, CliError> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("bad config file: {}", e)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_parse_and_errors() {
        let g = parse_grid_csv("s,f\n0.5,1.0\n1.5,2.0\n2.5,3.0\n").unwrap();
        assert_eq!(g.base(), 0.5);
        assert_eq!(g.values(), &[1.0, 2.0, 3.0]);
        assert!(matches!(parse_grid_csv("x,y\n0,1\n"), Err(CliError::Parse(_))));
        assert!(matches!(parse_grid_csv("s,f\n0,1\n0.5,2\n"), Err(CliError::Spacing(_))));
        assert!(matches!(parse_grid_csv("s,f\n"), Err(CliError::Empty(_))));
        assert!(matches!(parse_grid_csv("s,f\n0,abc\n"), Err(CliError::Parse(_))));
    }

    #[test]
    fn full_precision_round_trips() {
        for v in [0.1, -1.0 / 3.0, 1e-300, 2.2250738585072014e-308, 12345.678901234567] {
            let s = full_precision(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{}", s);
        }
    }

    #[test]
    fn report_json_round_trip_is_byte_identical() {
        let reports = nulfrac_verify::run_suite(3, 1);
        let json = to_json_full_precision(&reports).unwrap();
        let parsed: Vec<CheckReport> = serde_json::from_str(&json).unwrap();
        let json2 = to_json_full_precision(&parsed).unwrap();
        assert_eq!(json, json2);
    }

    #[test]
    fn empty_report_list_refused() {
        let dir = std::env::temp_dir().join("nulfrac_empty_report_test.json");
        let err = write_report_json(&dir, &[]).unwrap_err();
        assert!(matches!(err, CliError::Io(_)));
    }

    #[test]
    fn lattice_json() {
        let lat = parse_lattice_arg(r#"{"family":"quadratic","c1":1.0,"c2":0.0,"c3":0.0}"#).unwrap();
        assert_eq!(lat.x(3.0), 9.0);
        let lat = parse_lattice_arg(r#"{"family":"q_quadratic","q":0.5,"c1":0.5,"c2":0.5}"#).unwrap();
        assert_eq!(lat.x(0.0), 1.0);
        assert!(parse_lattice_arg(r#"{"family":"nope"}"#).is_err());
        assert!(parse_lattice_arg(r#"{"family":"q_quadratic","c1":1.0,"c2":1.0}"#).is_err());
    }
}
