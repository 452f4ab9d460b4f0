//! File output: fixed-format CSV, canonical JSON, atomic writes.

use std::io::Write;
use std::path::Path;
use std::sync::Mutex;

use serde::Serialize;

use crate::error::HarnessError;

/// Serializes all writes of a process.
static WRITER: Mutex<()> = Mutex::new(());

/// Writes `bytes` to a temporary file next to `path` and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    let _guard = WRITER.lock().unwrap_or_else(|e| e.into_inner());
    let dir = path.parent().unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| HarnessError::io(dir, e))?;
    tmp.write_all(bytes)
        .map_err(|e| HarnessError::io(path, e))?;
    tmp.persist(path)
        .map_err(|e| HarnessError::io(path, e.error))?;
    Ok(())
}

/// Pretty JSON with object keys in sorted order, so that parsing and
/// re-serializing the file reproduces it byte for byte.
pub fn canonical_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("value serializes");
    let mut s = serde_json::to_string_pretty(&v).expect("json value serializes");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), HarnessError> {
    write_atomic(path, canonical_json(value).as_bytes())
}

/// Twelve significant digits in scientific notation; `NaN` when undefined.
pub fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else {
        "NaN".to_string()
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    fmt_float(x.unwrap_or(f64::NAN))
}

/// Minimal CSV table: a fixed header and rows of preformatted fields.
#[derive(Debug, Clone)]
pub struct Csv {
    header: Vec<String>,
    body: String,
}

impl Csv {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Self {
            header: header.iter().map(|h| h.as_ref().to_string()).collect(),
            body: String::new(),
        }
    }

    pub fn row(&mut self, fields: &[String]) {
        assert_eq!(fields.len(), self.header.len(), "CSV row width");
        let quoted: Vec<String> = fields.iter().map(|f| quote(f)).collect();
        self.body.push_str(&quoted.join(","));
        self.body.push('\n');
    }

    pub fn render(&self) -> String {
        let header: Vec<String> = self.header.iter().map(|h| quote(h)).collect();
        format!("{}\n{}", header.join(","), self.body)
    }

    pub fn write(&self, path: &Path) -> Result<(), HarnessError> {
        write_atomic(path, self.render().as_bytes())
    }
}

fn quote(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}
