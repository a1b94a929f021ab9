//! Plain-text system files.
//!
//! ```text
//! # comments and blank lines are ignored
//! name = constant-velocity
//! n = 2
//! a =
//!   0.0000000000000000e0 1.0000000000000000e0
//!   0.0000000000000000e0 0.0000000000000000e0
//! s =
//!   0.0000000000000000e0 0.0000000000000000e0
//!   0.0000000000000000e0 1.0000000000000000e0
//! ```
//!
//! Numbers are written with 17 significant digits, which round-trips every
//! `f64` exactly.

use std::fmt::Write as _;
use std::path::Path;

use noisedisc::{ContinuousModel, Matrix};
use thiserror::Error;

/// Relative asymmetry of `S` tolerated on input.
const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum SysFileError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing {0}")]
    Missing(&'static str),
    #[error("S is not symmetric: relative asymmetry {0:.3e} exceeds 1e-12")]
    Asymmetric(f64),
    #[error("{0}")]
    Model(#[from] noisedisc::DiscretizeError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemFile {
    pub name: Option<String>,
    pub a: Matrix<f64>,
    pub s: Matrix<f64>,
}

impl SystemFile {
    pub fn from_model(name: Option<String>, m: &ContinuousModel<f64>) -> Self {
        SystemFile { name, a: m.a().clone(), s: m.s().clone() }
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn model(&self) -> Result<ContinuousModel<f64>, SysFileError> {
        Ok(ContinuousModel::new(self.a.clone(), self.s.clone())?)
    }

    pub fn read(path: &Path) -> Result<Self, SysFileError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| SysFileError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, SysFileError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let mut name = None;
        let mut n = None;
        let mut a = None;
        let mut s = None;
        while let Some((line, text)) = lines.next() {
            let syntax = |msg: String| SysFileError::Syntax { line, msg };
            let (key, value) =
                text.split_once('=').ok_or_else(|| syntax(format!("expected `key = value`, got `{text}`")))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "name" => name = Some(value.to_owned()),
                "n" => {
                    let v: usize = value.parse().map_err(|_| syntax(format!("bad dimension `{value}`")))?;
                    if v == 0 {
                        return Err(syntax("dimension must be positive".into()));
                    }
                    n = Some(v);
                }
                "a" | "s" => {
                    if !value.is_empty() {
                        return Err(syntax(format!("`{key} =` must be followed by rows on the next lines")));
                    }
                    let n = n.ok_or(SysFileError::Missing("`n = ...` before the matrix blocks"))?;
                    let m = read_block(&mut lines, n, line)?;
                    if key == "a" {
                        a = Some(m);
                    } else {
                        s = Some(m);
                    }
                }
                other => return Err(syntax(format!("unknown key `{other}`"))),
            }
        }
        let a = a.ok_or(SysFileError::Missing("block `a`"))?;
        let s = s.ok_or(SysFileError::Missing("block `s`"))?;
        let asym = (&s - &s.transpose()).frobenius_norm();
        let scale = s.frobenius_norm();
        if asym > SYMMETRY_TOL * scale {
            return Err(SysFileError::Asymmetric(asym / scale));
        }
        Ok(SystemFile { name, a, s })
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        if let Some(name) = &self.name {
            writeln!(out, "name = {name}").unwrap();
        }
        writeln!(out, "n = {}", self.n()).unwrap();
        out.push_str("a =\n");
        out.push_str(&render_block(&self.a));
        out.push_str("s =\n");
        out.push_str(&render_block(&self.s));
        out
    }
}

fn read_block<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    n: usize,
    header: usize,
) -> Result<Matrix<f64>, SysFileError> {
    let mut data = Vec::with_capacity(n * n);
    for _ in 0..n {
        let (line, text) =
            lines.next().ok_or_else(|| SysFileError::Syntax { line: header, msg: format!("block needs {n} rows") })?;
        let row: Result<Vec<f64>, _> = text.split_whitespace().map(str::parse::<f64>).collect();
        let row = row.map_err(|e| SysFileError::Syntax { line, msg: format!("bad number: {e}") })?;
        if let Some(bad) = row.iter().find(|x| !x.is_finite()) {
            return Err(SysFileError::Syntax { line, msg: format!("non-finite value {bad}") });
        }
        if row.len() != n {
            return Err(SysFileError::Syntax { line, msg: format!("expected {n} values, found {}", row.len()) });
        }
        data.extend(row);
    }
    Matrix::new(n, n, data).map_err(|e| SysFileError::Syntax { line: header, msg: e.to_string() })
}

/// One indented line per row, entries with 17 significant digits.
pub fn render_block(m: &Matrix<f64>) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        out.push(' ');
        for j in 0..m.cols() {
            write!(out, " {:.16e}", m[(i, j)]).unwrap();
        }
        out.push('\n');
    }
    out
}
