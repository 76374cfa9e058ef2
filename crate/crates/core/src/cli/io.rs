//! JSON and CSV file handling with schema-aware error messages.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::lattice::{AsymptoticLattice, LinearLabelling};

/// Failure to read or write one of the interchange files.
#[derive(Debug)]
pub enum FileError {
    Io { path: PathBuf, source: std::io::Error },
    /// Not well-formed JSON.
    Syntax { path: PathBuf, offset: usize, line: usize, column: usize, msg: String },
    /// Well-formed JSON that does not match the schema.
    Schema { path: PathBuf, field: String, msg: String },
    Csv { path: PathBuf, msg: String },
}

impl fmt::Display for FileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Io { path, source } => write!(f, "{}: {source}", path.display()),
            Self::Syntax {
                path,
                offset,
                line,
                column,
                msg,
            } => write!(
                f,
                "{}: malformed JSON at byte offset {offset} (line {line}, column {column}): {msg}",
                path.display()
            ),
            Self::Schema { path, field, msg } => {
                write!(f, "{}: schema error at field `{field}`: {msg}", path.display())
            }
            Self::Csv { path, msg } => write!(f, "{}: {msg}", path.display()),
        }
    }
}

impl std::error::Error for FileError {}

/// Byte offset of a 1-based (line, column) position.
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let start: usize = text.split_inclusive('\n').take(line.saturating_sub(1)).map(str::len).sum();
    (start + column.saturating_sub(1)).min(text.len())
}

/// Parse JSON text, reporting syntax errors by byte offset and schema
/// errors by field path.
pub fn parse_json<T: DeserializeOwned>(text: &str, path: &Path) -> Result<T, FileError> {
    let syntax = |inner: serde_json::Error| FileError::Syntax {
        path: path.to_path_buf(),
        offset: byte_offset(text, inner.line(), inner.column()),
        line: inner.line(),
        column: inner.column(),
        msg: strip_position(&inner),
    };
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        if inner.is_syntax() || inner.is_eof() {
            syntax(inner)
        } else {
            FileError::Schema {
                path: path.to_path_buf(),
                field,
                msg: strip_position(&inner),
            }
        }
    })?;
    de.end().map_err(syntax)?;
    Ok(value)
}

fn strip_position(e: &serde_json::Error) -> String {
    let s = e.to_string();
    match s.rfind(" at line ") {
        Some(i) => s[..i].to_string(),
        None => s,
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, FileError> {
    let text = std::fs::read_to_string(path).map_err(|source| FileError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_json(&text, path)
}

/// Pretty JSON with a trailing newline. Floats use the shortest
/// representation that parses back to the same double.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("domain types serialize");
    s.push('\n');
    s
}

pub fn write_text(path: &Path, text: &str) -> Result<(), FileError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| FileError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, text).map_err(|source| FileError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), FileError> {
    write_text(path, &to_json(value))
}

/// Points table: `hbar,x,y` and, with a labelling, `k1,k2` (empty when a
/// point is unlabelled).
pub fn write_points_csv(
    path: &Path,
    lattice: &AsymptoticLattice,
    labelling: Option<&LinearLabelling>,
) -> Result<(), FileError> {
    let err = |e: csv::Error| FileError::Csv {
        path: path.to_path_buf(),
        msg: e.to_string(),
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    if labelling.is_some() {
        w.write_record(["hbar", "x", "y", "k1", "k2"]).map_err(err)?;
    } else {
        w.write_record(["hbar", "x", "y"]).map_err(err)?;
    }
    for (j, s) in lattice.samples().iter().enumerate() {
        let map = labelling.and_then(|l| l.maps().get(j));
        let labels: std::collections::HashMap<(u64, u64), crate::geometry::Label> = map
            .map(|m| {
                m.entries()
                    .iter()
                    .map(|e| ((e.point.x.to_bits(), e.point.y.to_bits()), e.k))
                    .collect()
            })
            .unwrap_or_default();
        for p in s.points() {
            let mut rec = vec![s.hbar().to_string(), p.x.to_string(), p.y.to_string()];
            if labelling.is_some() {
                match labels.get(&(p.x.to_bits(), p.y.to_bits())) {
                    Some(k) => rec.extend([k.k1.to_string(), k.k2.to_string()]),
                    None => rec.extend([String::new(), String::new()]),
                }
            }
            w.write_record(&rec).map_err(err)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| FileError::Csv {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })?;
    write_text(path, &String::from_utf8(bytes).expect("csv output is UTF-8"))
}
