//! Tabular output files. CSV files open with `# key: value` metadata
//! lines, the last of which is `# config: {json}`; JSON files carry the
//! same metadata, config, columns and rows.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::config::{ExperimentConfig, OutputFormat};
use crate::error::CliError;

const CONFIG_PREFIX: &str = "# config: ";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Missing,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) if x.is_finite() => x.to_string(),
            Cell::Num(_) | Cell::Missing => String::new(),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => json!(x),
            Cell::Num(_) | Cell::Missing => Value::Null,
            Cell::Int(n) => json!(n),
            Cell::Text(s) => json!(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<u64> for Cell {
    fn from(n: u64) -> Self {
        Cell::Int(n)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Text(if b { "pass" } else { "fail" }.to_string())
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table {
            metadata: Vec::new(),
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.push((key.to_string(), value.to_string()));
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Column by name, as numbers; missing cells read as NaN.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match &r[i] {
                    Cell::Num(x) => *x,
                    Cell::Int(n) => *n as f64,
                    _ => f64::NAN,
                })
                .collect(),
        )
    }

    pub fn write(&self, path: &Path, config: &ExperimentConfig) -> Result<(), CliError> {
        let config_json = serde_json::to_string(config).map_err(|source| CliError::Json {
            path: path.to_path_buf(),
            source,
        })?;
        let bytes = match config.format {
            OutputFormat::Csv => self.to_csv(&config_json, path)?,
            OutputFormat::Json => self.to_json(config, path)?,
        };
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|source| io(dir, source))?;
        }
        fs::write(path, bytes).map_err(|source| io(path, source))
    }

    fn to_csv(&self, config_json: &str, path: &Path) -> Result<Vec<u8>, CliError> {
        let mut out = Vec::new();
        for (k, v) in &self.metadata {
            // keep every metadata entry on one line
            writeln!(out, "# {k}: {}", v.replace('\n', " ")).expect("in-memory write");
        }
        writeln!(out, "{CONFIG_PREFIX}{config_json}").expect("in-memory write");
        let csv_err = |source| CliError::Csv {
            path: path.to_path_buf(),
            source,
        };
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).map_err(csv_err)?;
        }
        w.into_inner().map_err(|e| io(path, e.into_error()))
    }

    fn to_json(&self, config: &ExperimentConfig, path: &Path) -> Result<Vec<u8>, CliError> {
        let metadata: Map<String, Value> = self
            .metadata
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.clone())))
            .collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
            .collect();
        let doc = json!({
            "metadata": metadata,
            "config": config,
            "columns": self.columns,
            "rows": rows,
        });
        let mut bytes = serde_json::to_vec_pretty(&doc).map_err(|source| CliError::Json {
            path: path.to_path_buf(),
            source,
        })?;
        bytes.push(b'\n');
        Ok(bytes)
    }
}

fn io(path: &Path, source: std::io::Error) -> CliError {
    CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Recover the config embedded in an output file of either format.
pub fn read_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|source| io(path, source))?;
    let json_err = |source| CliError::Json {
        path: path.to_path_buf(),
        source,
    };
    if text.trim_start().starts_with('{') {
        let doc: Value = serde_json::from_str(&text).map_err(json_err)?;
        let cfg = doc
            .get("config")
            .cloned()
            .ok_or_else(|| CliError::MissingConfig(path.to_path_buf()))?;
        return serde_json::from_value(cfg).map_err(json_err);
    }
    let line = text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .find_map(|l| l.strip_prefix(CONFIG_PREFIX))
        .ok_or_else(|| CliError::MissingConfig(path.to_path_buf()))?;
    serde_json::from_str(line).map_err(json_err)
}

/// Default output location: `$TANDEM_PAOI_OUT_DIR` or the working directory.
pub fn default_out_dir() -> PathBuf {
    std::env::var_os(crate::OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout_and_config_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let mut t = Table::new(["x", "note"]);
        t.meta("label", "two\nlines");
        t.push(vec![Cell::Num(-0.5), Cell::Text("a,b".into())]);
        t.push(vec![Cell::Num(f64::NAN), Cell::Missing]);
        let cfg = ExperimentConfig {
            seed: 7,
            ..ExperimentConfig::default()
        };
        t.write(&path, &cfg).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "# label: two lines");
        assert!(lines[1].starts_with(CONFIG_PREFIX));
        assert_eq!(&lines[2..], ["x,note", "-0.5,\"a,b\"", ","]);
        assert_eq!(read_config(&path).unwrap(), cfg);
    }

    #[test]
    fn json_mirrors_csv() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.json");
        let mut t = Table::new(["x"]);
        t.meta("k", 1.5);
        t.push(vec![Cell::Int(3)]);
        let cfg = ExperimentConfig {
            format: OutputFormat::Json,
            ..ExperimentConfig::default()
        };
        t.write(&path, &cfg).unwrap();
        let doc: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(doc["metadata"]["k"], "1.5");
        assert_eq!(doc["columns"][0], "x");
        assert_eq!(doc["rows"][0][0], 3);
        assert_eq!(read_config(&path).unwrap(), cfg);
    }
}
