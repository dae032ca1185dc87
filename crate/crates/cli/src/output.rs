//! Numeric tables written as CSV or JSON.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::Format;
use crate::CliError;

/// Named columns of numbers, one row per record.
#[derive(Debug, Serialize)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Output directory plus the chosen table format.
pub struct Sink {
    dir: PathBuf,
    format: Format,
    written: Vec<PathBuf>,
}

impl Sink {
    pub fn create(dir: &Path, format: Format) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Sink {
            dir: dir.to_path_buf(),
            format,
            written: Vec::new(),
        })
    }

    /// Writes `table` as `<stem>.csv` or `<stem>.json`.
    pub fn table(&mut self, stem: &str, table: &Table) -> Result<(), CliError> {
        match self.format {
            Format::Csv => {
                let path = self.dir.join(format!("{stem}.csv"));
                let mut w =
                    csv::Writer::from_path(&path).map_err(|e| CliError::Csv(path.clone(), e))?;
                w.write_record(&table.columns)
                    .map_err(|e| CliError::Csv(path.clone(), e))?;
                for row in &table.rows {
                    w.write_record(row.iter().map(|v| v.to_string()))
                        .map_err(|e| CliError::Csv(path.clone(), e))?;
                }
                w.flush().map_err(|e| CliError::io(&path, e))?;
                self.written.push(path);
            }
            Format::Json => self.json(stem, table)?,
        }
        Ok(())
    }

    /// Writes any serializable value as pretty JSON to `<stem>.json`.
    pub fn json<T: Serialize>(&mut self, stem: &str, value: &T) -> Result<(), CliError> {
        let path = self.dir.join(format!("{stem}.json"));
        let mut text = serde_json::to_string_pretty(value).expect("output serializes");
        text.push('\n');
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        self.written.push(path);
        Ok(())
    }

    pub fn text(&mut self, file_name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(file_name);
        fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        self.written.push(path);
        Ok(())
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }
}
