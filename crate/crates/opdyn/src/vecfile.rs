//! Plain-text vector files.
//!
//! One entry per line: `index re im`, whitespace separated. Blank lines and
//! anything after `#` are ignored. Duplicate indices are rejected. Writing
//! uses 17 significant digits so files reload bit-for-bit.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use opdyn_core::SparseVector;

#[derive(Debug, thiserror::Error)]
pub enum VectorFileError {
    #[error("line {line}: expected `index re im`, found {found} field(s)")]
    FieldCount { line: usize, found: usize },
    #[error("line {line}: cannot parse {field} `{text}`")]
    Parse { line: usize, field: &'static str, text: String },
    #[error("line {line}: duplicate index {index}")]
    Duplicate { line: usize, index: i64 },
    #[error("line {line}: non-finite value")]
    NonFinite { line: usize },
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

pub fn parse_vector(text: &str) -> Result<SparseVector, VectorFileError> {
    let mut seen = BTreeSet::new();
    let mut entries = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("");
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != 3 {
            return Err(VectorFileError::FieldCount { line, found: fields.len() });
        }
        let index: i64 =
            fields[0].parse().map_err(|_| VectorFileError::Parse { line, field: "index", text: fields[0].into() })?;
        let part = |field: &'static str, text: &str| {
            text.parse::<f64>().map_err(|_| VectorFileError::Parse { line, field, text: text.into() })
        };
        let value = Complex64::new(part("re", fields[1])?, part("im", fields[2])?);
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(VectorFileError::NonFinite { line });
        }
        if !seen.insert(index) {
            return Err(VectorFileError::Duplicate { line, index });
        }
        entries.push((index, value));
    }
    Ok(SparseVector::from_entries(entries).expect("entries checked above"))
}

pub fn read_vector(path: &Path) -> Result<SparseVector, VectorFileError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| VectorFileError::Io { path: path.display().to_string(), source })?;
    parse_vector(&text)
}

pub fn format_vector(v: &SparseVector) -> String {
    let mut out = String::from("# index re im\n");
    for (i, c) in v.iter() {
        writeln!(out, "{i} {:.16e} {:.16e}", c.re, c.im).unwrap();
    }
    out
}
