//! Output files: provenance headers, fixed-precision CSV and atomic writes.

use entropic_core::entropy::Base;
use serde::Serialize;
use serde_json::{json, Value};
use std::io::Write;
use std::path::Path;

pub const VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

/// Run provenance echoed at the top of every output.
#[derive(Debug, Clone)]
pub struct Header {
    pub command: &'static str,
    pub config: Value,
    pub base: Base,
    /// Extra `key: value` lines describing the result as a whole.
    pub notes: Vec<(String, String)>,
}

impl Header {
    pub fn new(command: &'static str, config: &impl Serialize, base: Base) -> Self {
        Self {
            command,
            config: serde_json::to_value(config).expect("configs serialize"),
            base,
            notes: Vec::new(),
        }
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.notes.push((key.to_string(), value.to_string()));
    }

    fn comment_lines(&self) -> String {
        let mut s = format!(
            "# {VERSION}\n# command: {}\n# config: {}\n# base: {}\n",
            self.command, self.config, self.base
        );
        for (k, v) in &self.notes {
            s.push_str(&format!("# {k}: {v}\n"));
        }
        s
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "version": VERSION,
            "command": self.command,
            "config": self.config,
            "base": self.base,
        });
        for (k, n) in &self.notes {
            v[k] = Value::String(n.clone());
        }
        v
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

pub fn csv(header: &Header, columns: &[&str], rows: &[Vec<Cell>]) -> String {
    let mut s = header.comment_lines();
    s.push_str(&columns.join(","));
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row
            .iter()
            .map(|c| match c {
                Cell::Num(x) => num(*x),
                Cell::Text(t) => t.clone(),
            })
            .collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

/// `{"header": …, <body fields>}` pretty-printed.
pub fn json_document(header: &Header, body: Value) -> String {
    let mut doc = json!({ "header": header.to_json() });
    if let Value::Object(fields) = body {
        for (k, v) in fields {
            doc[k] = v;
        }
    }
    let mut s = serde_json::to_string_pretty(&doc).expect("plain JSON");
    s.push('\n');
    s
}

/// Write through a temporary file in the destination directory and rename it
/// into place, so readers never observe a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Write to `path`, or to standard output when no path is given.
pub fn emit(path: Option<&Path>, contents: &str) -> std::io::Result<()> {
    match path {
        Some(p) => write_atomic(p, contents),
        None => std::io::stdout().lock().write_all(contents.as_bytes()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 0.0] {
            let s = num(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
            let digits = s.split('e').next().unwrap().chars().filter(|c| c.is_ascii_digit()).count();
            assert_eq!(digits, 17, "{s}");
        }
    }

    #[test]
    fn csv_layout() {
        let mut h = Header::new("demo", &json!({"n": 2}), Base::Bits);
        h.note("limit", 1.5);
        let out = csv(&h, &["x", "kind"], &[vec![0.5.into(), "vn".into()]]);
        let lines: Vec<&str> = out.lines().collect();
        assert!(lines[0].starts_with("# entropic-cli "));
        assert_eq!(lines[2], r#"# config: {"n":2}"#);
        assert_eq!(lines[3], "# base: bits");
        assert_eq!(lines[4], "# limit: 1.5");
        assert_eq!(lines[5], "x,kind");
        assert_eq!(lines[6], "5.0000000000000000e-1,vn");
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        std::fs::write(&path, "old").unwrap();
        write_atomic(&path, "new\n").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "new\n");
        let leftovers = std::fs::read_dir(dir.path()).unwrap().count();
        assert_eq!(leftovers, 1);
    }
}
