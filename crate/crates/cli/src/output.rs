//! CSV tables and their JSON sidecars.

use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::CliError;

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl Field {
    pub fn render(&self) -> String {
        match self {
            // 12 significant digits.
            Field::Num(x) if x.is_finite() => format!("{x:.11e}"),
            Field::Num(x) => format!("{x}").to_ascii_lowercase(),
            Field::Int(i) => i.to_string(),
            Field::Text(s) => s.clone(),
            Field::Bool(b) => b.to_string(),
        }
    }
}

impl From<f64> for Field {
    fn from(x: f64) -> Self {
        Field::Num(x)
    }
}

impl From<u32> for Field {
    fn from(x: u32) -> Self {
        Field::Int(x.into())
    }
}

impl From<&str> for Field {
    fn from(s: &str) -> Self {
        Field::Text(s.to_owned())
    }
}

impl From<bool> for Field {
    fn from(b: bool) -> Self {
        Field::Bool(b)
    }
}

/// A table plus what is needed to regenerate it.
#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub columns: Vec<&'static str>,
    pub units: Vec<(&'static str, &'static str)>,
    pub rows: Vec<Vec<Field>>,
    pub parameters: Map<String, Value>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&'static str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.to_vec(),
            units: Vec::new(),
            rows: Vec::new(),
            parameters: Map::new(),
        }
    }

    pub fn units(mut self, units: &[(&'static str, &'static str)]) -> Self {
        self.units = units.to_vec();
        self
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) {
        self.parameters.insert(key.to_owned(), value.into());
    }

    pub fn push(&mut self, row: Vec<Field>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Writes `path` and `path` with the extension replaced by `.meta.json`.
    pub fn write(&self, path: &Path) -> Result<PathBuf, CliError> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path).map_err(|e| csv_error(path, e))?;
        w.write_record(&self.columns).map_err(|e| csv_error(path, e))?;
        for row in &self.rows {
            w.write_record(row.iter().map(Field::render)).map_err(|e| csv_error(path, e))?;
        }
        w.flush().map_err(|e| io_error(path, e))?;

        let meta = sidecar_path(path);
        let units: Map<String, Value> = self.units.iter().map(|(k, v)| ((*k).to_owned(), json!(v))).collect();
        let doc = json!({
            "table": self.name,
            "generator": concat!("mzient ", env!("CARGO_PKG_VERSION")),
            "columns": self.columns,
            "units": units,
            "rows": self.rows.len(),
            "parameters": self.parameters,
        });
        let text = serde_json::to_string_pretty(&doc).expect("JSON values always serialize");
        std::fs::write(&meta, text + "\n").map_err(|e| io_error(&meta, e))?;
        Ok(meta)
    }
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("meta.json")
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::config(format!("cannot write {}: {e}", path.display()))
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    CliError::config(format!("cannot write {}: {e}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(Field::Num(0.5).render(), "5.00000000000e-1");
        assert_eq!(Field::Num(-1234.5678901234).render(), "-1.23456789012e3");
        assert_eq!(Field::Num(f64::NAN).render(), "nan");
    }

    #[test]
    fn sidecar_sits_next_to_the_csv() {
        assert_eq!(sidecar_path(Path::new("out/fig4b.csv")), Path::new("out/fig4b.meta.json"));
    }
}
