use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;
use tunnelsplit::config::{format_opt, format_sci, OutputFormat, RunConfig};
use tunnelsplit::Error;

use crate::GlobalArgs;

/// Anything that ends the process with a non-zero status.
#[derive(Debug)]
pub enum Failure {
    Lib(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Failure::Lib(Error::InvalidInput(msg.into()))
    }

    pub fn io(msg: impl Into<String>) -> Self {
        Failure::Io(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Lib(e) if e.is_validation() => 2,
            _ => 1,
        }
    }

    pub fn to_json(&self) -> String {
        let (kind, message) = match self {
            Failure::Lib(e) => (e.kind(), e.to_string()),
            Failure::Io(m) => ("io", m.clone()),
        };
        json!({ "error": { "kind": kind, "message": message } }).to_string()
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig, Failure> {
    let text = fs::read_to_string(path).map_err(|e| {
        Failure::Lib(Error::Configuration(format!(
            "cannot read {}: {e}",
            path.display()
        )))
    })?;
    Ok(RunConfig::from_json(&text)?)
}

/// Where and how a command writes its result.
pub struct Sink {
    pub format: OutputFormat,
    path: Option<PathBuf>,
}

impl Sink {
    pub fn new(g: &GlobalArgs, cfg: Option<&RunConfig>, default: OutputFormat) -> Self {
        let format = g
            .format
            .map(OutputFormat::from)
            .or_else(|| cfg.and_then(|c| c.output.format))
            .unwrap_or(default);
        let path = g
            .output
            .clone()
            .or_else(|| cfg.and_then(|c| c.output.path.clone()));
        Sink { format, path }
    }

    pub fn to_path(format: OutputFormat, path: PathBuf) -> Self {
        Sink {
            format,
            path: Some(path),
        }
    }

    pub fn is_csv(&self) -> bool {
        self.format == OutputFormat::Csv
    }

    pub fn write(&self, text: &str) -> Result<(), Failure> {
        match &self.path {
            Some(p) => fs::write(p, text)
                .map_err(|e| Failure::io(format!("cannot write {}: {e}", p.display()))),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())
                    .and_then(|_| out.flush())
                    .map_err(|e| Failure::io(format!("stdout: {e}")))
            }
        }
    }

    pub fn json<T: Serialize>(&self, value: &T) -> Result<(), Failure> {
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| Failure::io(format!("serialization: {e}")))?;
        text.push('\n');
        self.write(&text)
    }

    pub fn csv(&self, table: &Csv) -> Result<(), Failure> {
        self.write(&table.text)
    }
}

/// Comma-separated table with a header row.
pub struct Csv {
    text: String,
}

pub enum Cell {
    Num(f64),
    Opt(Option<f64>),
    Int(i64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => format_sci(*x),
            Cell::Opt(x) => format_opt(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Csv { text }
    }

    pub fn row(&mut self, cells: &[Cell]) {
        let line: Vec<String> = cells.iter().map(Cell::render).collect();
        self.text.push_str(&line.join(","));
        self.text.push('\n');
    }

    pub fn numbers(&mut self, values: &[f64]) {
        let line: Vec<String> = values.iter().map(|v| format_sci(*v)).collect();
        self.text.push_str(&line.join(","));
        self.text.push('\n');
    }
}
