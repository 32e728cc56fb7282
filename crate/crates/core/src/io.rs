//! File formats: frame JSON, certificate and report JSON, tabulated
//! continuous families as CSV, and experiment configs.
//!
//! Numbers are written with the shortest decimal that parses back to the
//! same double, so a save/load cycle is bit-exact.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::continuous::TabulatedFamily;
use crate::error::{LabError, Result};
use crate::frames::Pasf;
use crate::lab::{PartitionCertificate, SearchReport};
use crate::lp::Exponent;

pub const FRAME_SCHEMA: u32 = 1;

/// On-disk layout of a frame pair. `F` is row-major `n×d`, `T` row-major `d×n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<u32>,
    pub p: Exponent,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<Exponent>,
    pub d: usize,
    pub n: usize,
    #[serde(rename = "F")]
    pub f: Vec<f64>,
    #[serde(rename = "T")]
    pub t: Vec<f64>,
    #[serde(default)]
    pub label: String,
}

impl FrameFile {
    pub fn from_pair(pair: &Pasf) -> Self {
        let (n, d) = pair.f().shape();
        let f = (0..n).flat_map(|i| (0..d).map(move |k| (i, k))).map(|ik| pair.f()[ik]).collect();
        let t = (0..d).flat_map(|k| (0..n).map(move |i| (k, i))).map(|ki| pair.t()[ki]).collect();
        FrameFile {
            schema: Some(FRAME_SCHEMA),
            p: pair.p(),
            r: Some(pair.r()),
            d,
            n,
            f,
            t,
            label: pair.label().to_string(),
        }
    }

    /// Builds the pair and lists any defaults that were applied.
    pub fn into_pair(self) -> Result<LoadedFrame> {
        let mut warnings = Vec::new();
        match self.schema {
            Some(FRAME_SCHEMA) => {}
            Some(v) => {
                return Err(LabError::Schema(format!(
                    "frame schema version {v} is not supported (expected {FRAME_SCHEMA})"
                )))
            }
            None => warnings.push(format!("no schema field; read as schema {FRAME_SCHEMA}")),
        }
        let r = match self.r {
            Some(r) => r,
            None => {
                warnings.push(format!("no r field; defaulted to r = p = {}", self.p));
                self.p
            }
        };
        let (n, d) = (self.n, self.d);
        if n == 0 || d == 0 {
            return Err(LabError::Schema(format!("n and d must be positive, got n={n}, d={d}")));
        }
        let expected = n.checked_mul(d).ok_or_else(|| LabError::Schema("n*d overflows".into()))?;
        if self.f.len() != expected {
            return Err(LabError::Schema(format!(
                "F has {} entries but n x d = {n} x {d} needs {expected}",
                self.f.len()
            )));
        }
        if self.t.len() != expected {
            return Err(LabError::Schema(format!(
                "T has {} entries but d x n = {d} x {n} needs {expected}",
                self.t.len()
            )));
        }
        let f = DMatrix::from_row_slice(n, d, &self.f);
        let t = DMatrix::from_row_slice(d, n, &self.t);
        let pair = Pasf::new(f, t, self.p, r, self.label)?;
        Ok(LoadedFrame { pair, warnings })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LoadedFrame {
    pub pair: Pasf,
    pub warnings: Vec<String>,
}

fn json_error(e: serde_json::Error) -> LabError {
    use serde_json::error::Category;
    match e.classify() {
        Category::Data => LabError::Schema(e.to_string()),
        Category::Io => LabError::Io(e.to_string()),
        Category::Syntax | Category::Eof => LabError::Parse(e.to_string()),
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| LabError::Io(format!("{}: {e}", path.display())))
}

pub fn parse_frame_json(text: &str) -> Result<LoadedFrame> {
    let file: FrameFile = serde_json::from_str(text).map_err(json_error)?;
    file.into_pair()
}

pub fn frame_to_json(pair: &Pasf) -> String {
    let mut s = serde_json::to_string_pretty(&FrameFile::from_pair(pair)).expect("frame serialises");
    s.push('\n');
    s
}

pub fn load_frame(path: impl AsRef<Path>) -> Result<LoadedFrame> {
    parse_frame_json(&read_text(path.as_ref())?)
}

pub fn save_frame(pair: &Pasf, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, frame_to_json(pair)).map_err(|e| LabError::Io(format!("{}: {e}", path.display())))
}

/// Parses a certificate and checks it is structurally sane. Validity against
/// a pair is the job of `verify_certificate`.
pub fn parse_certificate_json(text: &str) -> Result<PartitionCertificate> {
    let cert: PartitionCertificate = serde_json::from_str(text).map_err(json_error)?;
    if cert.parts.len() != cert.per_part.len() {
        return Err(LabError::Schema(format!(
            "{} parts but {} part bounds",
            cert.parts.len(),
            cert.per_part.len()
        )));
    }
    Ok(cert)
}

pub fn parse_search_report_json(text: &str) -> Result<SearchReport> {
    serde_json::from_str(text).map_err(json_error)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("value serialises");
    s.push('\n');
    s
}

/// Reads `alpha, w, f1..fd, t1..td` with a header row.
pub fn parse_tabulated_csv(text: &str) -> Result<TabulatedFamily> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| LabError::Parse(e.to_string()))?.clone();
    let cols = header.len();
    if cols < 4 || cols % 2 != 0 {
        return Err(LabError::Schema(format!(
            "expected columns alpha, w, f1..fd, t1..td; got {cols} columns"
        )));
    }
    let d = (cols - 2) / 2;
    let expected: Vec<String> = ["alpha".to_string(), "w".to_string()]
        .into_iter()
        .chain((1..=d).map(|k| format!("f{k}")))
        .chain((1..=d).map(|k| format!("t{k}")))
        .collect();
    if header.iter().ne(expected.iter().map(String::as_str)) {
        return Err(LabError::Schema(format!(
            "header must be {}; got {}",
            expected.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut table = TabulatedFamily {
        alpha: Vec::new(),
        weight: Vec::new(),
        f: Vec::new(),
        tau: Vec::new(),
    };
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| LabError::Parse(e.to_string()))?;
        if record.len() != cols {
            return Err(LabError::Schema(format!("row {} has {} fields", line + 1, record.len())));
        }
        let vals = record
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| LabError::Parse(format!("row {}: bad number {s:?}", line + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        table.alpha.push(vals[0]);
        table.weight.push(vals[1]);
        table.f.push(vals[2..2 + d].to_vec());
        table.tau.push(vals[2 + d..].to_vec());
    }
    table.validate()?;
    Ok(table)
}

pub fn tabulated_to_csv(table: &TabulatedFamily) -> Result<String> {
    let d = table.d();
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: Vec<String> = ["alpha".to_string(), "w".to_string()]
        .into_iter()
        .chain((1..=d).map(|k| format!("f{k}")))
        .chain((1..=d).map(|k| format!("t{k}")))
        .collect();
    let io = |e: csv::Error| LabError::Io(e.to_string());
    w.write_record(&header).map_err(io)?;
    for i in 0..table.alpha.len() {
        let row: Vec<String> = [table.alpha[i], table.weight[i]]
            .iter()
            .chain(&table.f[i])
            .chain(&table.tau[i])
            .map(|v| v.to_string())
            .collect();
        w.write_record(&row).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| LabError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| LabError::Io(e.to_string()))
}

/// A run description. Unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub subcommand: String,
    /// Path to an input file or the name of a built-in.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(default)]
    pub params: BTreeMap<String, serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
}

pub fn parse_experiment_config(text: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig = serde_json::from_str(text).map_err(json_error)?;
    if cfg.subcommand.trim().is_empty() {
        return Err(LabError::Schema("subcommand must not be empty".into()));
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{make_pasf, PasfKind};

    #[test]
    fn frame_round_trip_is_bitwise() {
        let pair = make_pasf(
            PasfKind::Random { d: 4, n: 6, seed: 3 },
            Exponent::new(1.5).unwrap(),
            Exponent::new(3.0).unwrap(),
        )
        .unwrap();
        let back = parse_frame_json(&frame_to_json(&pair)).unwrap();
        assert!(back.warnings.is_empty());
        let bits = |m: &DMatrix<f64>| m.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(back.pair.f()), bits(pair.f()));
        assert_eq!(bits(back.pair.t()), bits(pair.t()));
        assert_eq!(back.pair.label(), pair.label());
    }

    #[test]
    fn legacy_file_defaults_r() {
        let text = r#"{"p": 3, "d": 1, "n": 1, "F": [1], "T": [1]}"#;
        let loaded = parse_frame_json(text).unwrap();
        assert_eq!(loaded.pair.r().value(), 3.0);
        assert_eq!(loaded.warnings.len(), 2);
    }

    #[test]
    fn schema_errors() {
        let mismatch = r#"{"schema": 1, "p": 2, "r": 2, "d": 2, "n": 2, "F": [1, 0, 0], "T": [1, 0, 0, 1]}"#;
        assert!(matches!(parse_frame_json(mismatch), Err(LabError::Schema(_))));
        let future = r#"{"schema": 2, "p": 2, "r": 2, "d": 1, "n": 1, "F": [1], "T": [1]}"#;
        assert!(matches!(parse_frame_json(future), Err(LabError::Schema(_))));
        let extra = r#"{"schema": 1, "p": 2, "d": 1, "n": 1, "F": [1], "T": [1], "x": 0}"#;
        assert!(matches!(parse_frame_json(extra), Err(LabError::Schema(_))));
        assert!(matches!(parse_frame_json("{"), Err(LabError::Parse(_))));
        let huge = r#"{"schema": 1, "p": 2, "d": 1, "n": 1, "F": [1e999], "T": [1]}"#;
        assert!(parse_frame_json(huge).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let table = TabulatedFamily {
            alpha: vec![0.0, 0.5, 1.0],
            weight: vec![1.0, 2.0, 1.0],
            f: vec![vec![1.0, 0.1], vec![0.0, 1.0], vec![-1.0, 0.3]],
            tau: vec![vec![0.5, 0.0], vec![0.25, 1.0], vec![0.0, 1.0 / 3.0]],
        };
        let text = tabulated_to_csv(&table).unwrap();
        assert!(text.starts_with("alpha,w,f1,f2,t1,t2\n"));
        assert_eq!(parse_tabulated_csv(&text).unwrap(), table);
        assert!(parse_tabulated_csv("alpha,w,g1,t1\n0,1,1,1\n1,1,1,1\n").is_err());
        assert!(parse_tabulated_csv("alpha,w,f1,t1\n0,1,NaN,1\n1,1,1,1\n").is_err());
    }

    #[test]
    fn config_rejects_unknown_keys() {
        let ok = r#"{"subcommand": "analyze", "input": "standard", "params": {"d": 3}}"#;
        assert_eq!(parse_experiment_config(ok).unwrap().params["d"], 3);
        let bad = r#"{"subcommand": "analyze", "colour": "red"}"#;
        assert!(matches!(parse_experiment_config(bad), Err(LabError::Schema(_))));
    }
}
