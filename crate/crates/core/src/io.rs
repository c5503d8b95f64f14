//! JSON and CSV formats. Every float is written with 17 significant digits so
//! that emitted files re-ingest bit for bit.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::algebra::{GroupElem, HomNorms, TruncTensor};
use crate::error::Error;
use crate::paths::PLPath;
use crate::rough::{RawRoughPath, RoughPath};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{}: {source}", path.display())]
    File { path: PathBuf, source: io::Error },

    #[error("{}: line {line}: {msg}", path.display())]
    Parse { path: PathBuf, line: u64, msg: String },

    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },

    #[error(transparent)]
    Model(#[from] Error),
}

pub type IoResult<T> = std::result::Result<T, IoError>;

pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

struct SciFormatter;

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        if v.is_finite() {
            w.write_all(fmt_f64(v).as_bytes())
        } else {
            w.write_all(b"null")
        }
    }
}

/// Compact JSON with 17-digit floats and a trailing newline.
pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter);
    v.serialize(&mut ser).expect("in-memory serialization");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

pub fn read_text(path: &Path) -> IoResult<String> {
    fs::read_to_string(path).map_err(|source| IoError::File {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> IoResult<()> {
    fs::write(path, text).map_err(|source| IoError::File {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> IoResult<T> {
    let text = read_text(path)?;
    parse_json(&text, path)
}

pub fn parse_json<T: DeserializeOwned>(text: &str, path: &Path) -> IoResult<T> {
    serde_json::from_str(text).map_err(|source| IoError::Json {
        path: path.to_path_buf(),
        source,
    })
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn from_rows(rows: &[Vec<f64>], d: usize) -> std::result::Result<DMatrix<f64>, Error> {
    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
        return Err(Error::DimMismatch {
            expected: d,
            found: rows.iter().map(Vec::len).find(|&n| n != d).unwrap_or(rows.len()),
        });
    }
    Ok(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
}

/// `{"dim": d, "a": [..], "A": [[..]]}`, `A` row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupElemDoc {
    pub dim: usize,
    pub a: Vec<f64>,
    #[serde(rename = "A")]
    pub area: Vec<Vec<f64>>,
}

impl GroupElemDoc {
    pub fn parts(&self) -> std::result::Result<(DVector<f64>, DMatrix<f64>), Error> {
        if self.a.len() != self.dim {
            return Err(Error::DimMismatch {
                expected: self.dim,
                found: self.a.len(),
            });
        }
        Ok((DVector::from_column_slice(&self.a), from_rows(&self.area, self.dim)?))
    }

    /// The area part is antisymmetrized.
    pub fn to_group(&self) -> std::result::Result<GroupElem, Error> {
        let (a, area) = self.parts()?;
        GroupElem::new(a, area)
    }
}

impl From<&GroupElem> for GroupElemDoc {
    fn from(g: &GroupElem) -> Self {
        Self {
            dim: g.dim(),
            a: g.vector().iter().copied().collect(),
            area: rows(g.area()),
        }
    }
}

/// Schatten exponent, written as a number or `"inf"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SchattenDoc {
    Finite(f64),
    Named(String),
}

impl SchattenDoc {
    pub fn new(p: f64) -> Self {
        if p.is_infinite() {
            SchattenDoc::Named("inf".into())
        } else {
            SchattenDoc::Finite(p)
        }
    }

    pub fn value(&self) -> std::result::Result<f64, Error> {
        match self {
            SchattenDoc::Finite(p) => Ok(*p),
            SchattenDoc::Named(s) => parse_schatten(s),
        }
    }
}

pub fn parse_schatten(s: &str) -> std::result::Result<f64, Error> {
    match s.trim() {
        "inf" | "Inf" | "infinity" => Ok(f64::INFINITY),
        t => t.parse::<f64>().map_err(|_| Error::InvalidParam(format!("bad Schatten exponent {s:?}"))),
    }
}

fn default_schatten() -> SchattenDoc {
    SchattenDoc::Finite(2.0)
}

/// `{"alpha", "p", "times", "samples": [GroupElem..]}`. Samples may carry
/// non-skew `A`; the symmetric part then shows up as a defect.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoughPathDoc {
    pub alpha: f64,
    #[serde(default = "default_schatten")]
    pub p: SchattenDoc,
    pub times: Vec<f64>,
    pub samples: Vec<GroupElemDoc>,
}

impl RoughPathDoc {
    pub fn norms(&self) -> std::result::Result<HomNorms, Error> {
        HomNorms::new(self.p.value()?)
    }

    /// Raw form with `L = A + ½ a⊗a`.
    pub fn raw(&self) -> std::result::Result<RawRoughPath, Error> {
        let mut level1 = Vec::with_capacity(self.samples.len());
        let mut level2 = Vec::with_capacity(self.samples.len());
        for s in &self.samples {
            let (a, area) = s.parts()?;
            level2.push(area + &a * a.transpose() * 0.5);
            level1.push(a);
        }
        RawRoughPath::new(self.times.clone(), level1, level2)
    }

    /// Group-valued path; refused when the defect exceeds `tol`.
    pub fn to_rough(&self, tol: f64) -> std::result::Result<RoughPath, Error> {
        let norms = self.norms()?;
        let defect = self.raw()?.max_defect(&norms);
        if defect > tol {
            return Err(Error::NotWeaklyGeometric { defect });
        }
        let samples = self
            .samples
            .iter()
            .map(GroupElemDoc::to_group)
            .collect::<std::result::Result<Vec<_>, _>>()?;
        RoughPath::new(self.times.clone(), samples, self.alpha, norms)
    }
}

impl From<&RoughPath> for RoughPathDoc {
    fn from(x: &RoughPath) -> Self {
        Self {
            alpha: x.alpha(),
            p: SchattenDoc::new(x.norms().p()),
            times: x.times().to_vec(),
            samples: x.samples().iter().map(GroupElemDoc::from).collect(),
        }
    }
}

/// `{"dim": d, "levels": [[1], [..d], [..d²], ..]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncTensorDoc {
    pub dim: usize,
    pub levels: Vec<Vec<f64>>,
}

impl TruncTensorDoc {
    pub fn to_tensor(&self) -> std::result::Result<TruncTensor, Error> {
        TruncTensor::from_levels(self.dim, self.levels.clone())
    }
}

impl From<&TruncTensor> for TruncTensorDoc {
    fn from(t: &TruncTensor) -> Self {
        Self {
            dim: t.dim(),
            levels: t.levels().to_vec(),
        }
    }
}

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes())
}

fn parse_err(path: &Path, line: u64, msg: impl Into<String>) -> IoError {
    IoError::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

/// Numeric CSV with a header row. Returns the header and the rows.
pub fn parse_table(text: &str, path: &Path) -> IoResult<(Vec<String>, Vec<Vec<f64>>)> {
    let mut rdr = csv_reader(text);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| parse_err(path, 1, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, csv::Position::line);
            parse_err(path, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, csv::Position::line);
        let row = rec
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| parse_err(path, line, format!("not a number: {f:?}")))
            })
            .collect::<IoResult<Vec<f64>>>()?;
        out.push(row);
    }
    Ok((header, out))
}

/// CSV text from string cells.
pub fn table_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("UTF-8 cells")
}

/// `t,x1,...,xd`, one row per vertex.
pub fn pl_csv(p: &PLPath) -> String {
    let mut header = vec!["t".to_string()];
    header.extend((1..=p.dim()).map(|i| format!("x{i}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<String>> = p
        .times()
        .iter()
        .zip(p.points())
        .map(|(t, x)| std::iter::once(*t).chain(x.iter().copied()).map(fmt_f64).collect())
        .collect();
    table_csv(&header, &rows)
}

pub fn parse_pl_csv(text: &str, path: &Path) -> IoResult<PLPath> {
    let (header, rows) = parse_table(text, path)?;
    let d = header.len().saturating_sub(1);
    let expected = (1..=d).map(|i| format!("x{i}"));
    if d == 0 || header[0] != "t" || !header[1..].iter().cloned().eq(expected) {
        return Err(parse_err(path, 1, "header must be t,x1,...,xd"));
    }
    if rows.is_empty() {
        return Err(parse_err(path, 2, "no vertices"));
    }
    let times = rows.iter().map(|r| r[0]).collect();
    let points = rows.iter().map(|r| DVector::from_column_slice(&r[1..])).collect();
    PLPath::new(times, points).map_err(|e| {
        // point at the first row that breaks strict monotonicity, if any
        let line = rows
            .windows(2)
            .position(|w| !(w[1][0] > w[0][0]))
            .map_or(2, |i| i as u64 + 3);
        parse_err(path, line, e.to_string())
    })
}

pub fn read_pl_csv(path: &Path) -> IoResult<PLPath> {
    parse_pl_csv(&read_text(path)?, path)
}
