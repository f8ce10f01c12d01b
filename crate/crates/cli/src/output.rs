//! Output staging. Artifacts are rendered in memory and only written once
//! every one of them has been produced, each through a temporary file in
//! the target directory that is renamed into place.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::error::CliError;

#[derive(Debug, Default)]
pub struct Artifacts {
    files: Vec<(String, Vec<u8>)>,
}

impl Artifacts {
    pub fn add(&mut self, name: &str, contents: Vec<u8>) {
        self.files.push((name.to_string(), contents));
    }

    pub fn is_empty(&self) -> bool {
        self.files.is_empty()
    }

    /// Writes every artifact into `dir`, creating it if needed.
    pub fn commit(self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        if self.files.is_empty() {
            return Ok(Vec::new());
        }
        let io = |what: &str, path: &Path, e: std::io::Error| {
            CliError::Io(format!("{what} {}: {e}", path.display()))
        };
        std::fs::create_dir_all(dir).map_err(|e| io("cannot create", dir, e))?;
        let mut written = Vec::with_capacity(self.files.len());
        for (name, contents) in self.files {
            let path = dir.join(&name);
            let mut tmp = NamedTempFile::new_in(dir).map_err(|e| io("cannot stage", &path, e))?;
            tmp.write_all(&contents).map_err(|e| io("cannot write", &path, e))?;
            tmp.persist(&path).map_err(|e| io("cannot rename onto", &path, e.error))?;
            written.push(path);
        }
        Ok(written)
    }
}

/// Named quantities with units, printed as an aligned table or emitted as
/// `quantity,value,unit` CSV.
#[derive(Debug, Default)]
pub struct Table {
    rows: Vec<(String, f64, &'static str)>,
}

impl Table {
    pub fn row(&mut self, name: impl Into<String>, value: f64, unit: &'static str) {
        self.rows.push((name.into(), value, unit));
    }

    pub fn render(&self) -> String {
        let width = self.rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
        let mut s = String::new();
        for (name, value, unit) in &self.rows {
            let _ = writeln!(s, "{name:<width$}  {value:>17.9e}  {unit}");
        }
        s
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let table = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(["quantity", "value", "unit"]).map_err(table)?;
        for (name, value, unit) in &self.rows {
            w.write_record([name.as_str(), &value.to_string(), unit]).map_err(table)?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.to_string()))
    }
}
