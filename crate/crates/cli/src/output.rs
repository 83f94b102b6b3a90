//! Data tables, their CSV/JSON rendering, and run manifests.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use tfmetro_core::io::{format_f64, to_json_string, SCHEMA_VERSION};

use crate::config::{Format, RunConfig};
use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Float)
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format_f64(*x),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Float(x) => json!(x),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }
}

/// The config as embedded in data files: everything except where the file goes.
pub fn embedded_config(cfg: &RunConfig) -> Result<Value> {
    let mut v = serde_json::to_value(cfg).map_err(|e| CliError::Output(e.to_string()))?;
    if let Some(map) = v.as_object_mut() {
        map.remove("out");
    }
    Ok(v)
}

/// What a command produces: a table, or a ready-made JSON document.
pub enum Payload {
    Table(Table),
    Document(Value),
}

pub fn render(cfg: &RunConfig, payload: &Payload) -> Result<String> {
    let config = embedded_config(cfg)?;
    match (payload, cfg.format) {
        (Payload::Table(t), Format::Csv) => {
            let mut s = format!(
                "# schema_version={SCHEMA_VERSION}\n# command={}\n# config={}\n",
                cfg.command.name(),
                to_json_string(&config)?
            );
            let mut w = csv::Writer::from_writer(Vec::new());
            let err = |e: csv::Error| CliError::Output(e.to_string());
            w.write_record(&t.columns).map_err(err)?;
            for row in &t.rows {
                w.write_record(row.iter().map(Cell::csv)).map_err(err)?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
            s.push_str(&String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))?);
            Ok(s)
        }
        (Payload::Table(t), Format::Json) => {
            let rows: Vec<Value> = t.rows.iter().map(|r| Value::Array(r.iter().map(Cell::json).collect())).collect();
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "command": cfg.command.name(),
                "config": config,
                "columns": t.columns,
                "rows": rows,
            });
            Ok(to_json_string(&doc)? + "\n")
        }
        (Payload::Document(doc), Format::Json) => {
            let mut doc = doc.clone();
            if let Some(map) = doc.as_object_mut() {
                map.insert("command".into(), json!(cfg.command.name()));
                map.insert("config".into(), config);
            }
            Ok(to_json_string(&doc)? + "\n")
        }
        (Payload::Document(_), Format::Csv) => Err(CliError::Config(format!(
            "{} output is JSON only",
            cfg.command.name()
        ))),
    }
}

#[derive(Serialize)]
struct ManifestOutput {
    path: String,
    sha256: String,
    bytes: usize,
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn write(path: &Path, contents: &[u8]) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes the data file, the optional plot script and the manifest; without
/// an output path the data goes to stdout and no manifest is written.
pub fn emit(cfg: &RunConfig, data: &str, plot: Option<String>) -> Result<()> {
    let Some(out) = &cfg.out else {
        print!("{data}");
        return Ok(());
    };
    write(out, data.as_bytes())?;
    let mut outputs = vec![ManifestOutput {
        path: out.display().to_string(),
        sha256: sha256_hex(data.as_bytes()),
        bytes: data.len(),
    }];
    if let Some(script) = plot {
        let mut p = out.as_os_str().to_owned();
        p.push(".gp");
        let p = PathBuf::from(p);
        write(&p, script.as_bytes())?;
        outputs.push(ManifestOutput {
            path: p.display().to_string(),
            sha256: sha256_hex(script.as_bytes()),
            bytes: script.len(),
        });
    }
    let manifest = json!({
        "schema_version": SCHEMA_VERSION,
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": cfg.command.name(),
        "timestamp": chrono::Utc::now().to_rfc3339(),
        "config": cfg,
        "outputs": outputs,
    });
    write(&manifest_path(out), (to_json_string(&manifest)? + "\n").as_bytes())
}

/// Generic gnuplot script plotting `y` columns against `x`.
pub fn gnuplot_script(data: &Path, table: &Table, x: &str, ys: &[&str]) -> Option<String> {
    let xi = table.column(x)? + 1;
    let mut s = format!(
        "set datafile separator ','\nset key outside\nset xlabel '{x}'\nplot \\\n"
    );
    let lines: Vec<String> = ys
        .iter()
        .filter_map(|y| table.column(y).map(|i| (y, i + 1)))
        .map(|(y, yi)| format!("  '{}' skip 4 using {xi}:{yi} with lines title '{y}'", data.display()))
        .collect();
    if lines.is_empty() {
        return None;
    }
    s.push_str(&lines.join(", \\\n"));
    s.push('\n');
    Some(s)
}
