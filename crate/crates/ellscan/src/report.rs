//! Report emission: CSV with a `#` metadata preamble (command, version,
//! seed, config echo) or a JSON mirror of the same content. Fixed seed and
//! parameters give byte-identical bytes, so reports diff cleanly.

use crate::error::{Error, Result};
use serde::Serialize;
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Result<Format> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::invalid(format!(
                "unknown format {other:?} (want csv or json)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub version: String,
    pub seed: u64,
    /// Echo of the effective configuration, in insertion order.
    pub config: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Report {
    pub fn new(command: &str, seed: u64, columns: &[&str]) -> Report {
        Report {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            config: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn config(&mut self, key: &str, value: impl ToString) {
        self.config.push((key.to_string(), value.to_string()));
    }

    pub fn row(&mut self, cells: &[String]) {
        assert_eq!(cells.len(), self.columns.len(), "row arity mismatch");
        self.rows.push(cells.to_vec());
    }

    pub fn write(&self, w: &mut dyn Write, format: Format) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(w),
            Format::Json => self.write_json(w),
        }
    }

    fn write_csv(&self, w: &mut dyn Write) -> Result<()> {
        writeln!(w, "# command: {}", self.command)?;
        writeln!(w, "# version: {}", self.version)?;
        writeln!(w, "# seed: {}", self.seed)?;
        for (k, v) in &self.config {
            writeln!(w, "# {k} = {v}")?;
        }
        writeln!(w, "{}", self.columns.join(","))?;
        for row in &self.rows {
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    fn write_json(&self, w: &mut dyn Write) -> Result<()> {
        // field order fixed by the struct, so bytes are reproducible
        serde_json::to_writer_pretty(&mut *w, self)
            .map_err(|e| Error::internal(format!("json serialization: {e}")))?;
        writeln!(w)?;
        Ok(())
    }
}
