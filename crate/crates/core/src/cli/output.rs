use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::args::Format;
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    Missing,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::F)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::I(v)
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::F(v) => format!("{v:.16e}"),
            Cell::I(v) => v.to_string(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::F(v) if v.is_finite() => json!(v),
            Cell::I(v) => json!(v),
            _ => Value::Null,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
            .collect();
        let mut s = serde_json::to_string(&json!({ "columns": self.columns, "rows": rows }))
            .expect("serializable");
        s.push('\n');
        s
    }
}

/// Collects artifacts written during one run together with their checksums.
#[derive(Debug)]
pub struct Sink {
    pub dir: PathBuf,
    pub format: Format,
    pub artifacts: Vec<(String, String)>,
}

impl Sink {
    pub fn new(dir: impl AsRef<Path>, format: Format) -> Result<Self> {
        fs::create_dir_all(dir.as_ref())?;
        Ok(Self {
            dir: dir.as_ref().to_path_buf(),
            format,
            artifacts: Vec::new(),
        })
    }

    /// Write `stem.csv` or `stem.json`; `stem` may contain a subdirectory.
    pub fn table(&mut self, stem: &str, table: &Table) -> Result<()> {
        let (ext, body) = match self.format {
            Format::Csv => ("csv", table.to_csv()),
            Format::Json => ("json", table.to_json()),
        };
        let name = format!("{stem}.{ext}");
        let path = self.dir.join(&name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, body.as_bytes())?;
        self.artifacts
            .push((name, hex::encode(Sha256::digest(body.as_bytes()))));
        Ok(())
    }

    /// `manifest.ini`: resolved configuration, then artifact checksums.
    pub fn manifest(&self, config: &[(String, String)]) -> Result<()> {
        let mut s = String::from("# memoryflow run manifest\n");
        for (k, v) in config {
            s.push_str(&format!("{k} = {v}\n"));
        }
        s.push_str("\n[artifacts]\n");
        for (name, sum) in &self.artifacts {
            s.push_str(&format!("{name} = {sum}\n"));
        }
        fs::write(self.dir.join("manifest.ini"), s)?;
        Ok(())
    }
}

/// Shortest round-trip text for a float parameter.
pub fn num(v: f64) -> String {
    format!("{v}")
}
