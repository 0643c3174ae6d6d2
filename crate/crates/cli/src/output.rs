//! Result rendering: numeric row tables or human-readable reports.

use std::path::Path;

use anyhow::{Context, Result};
use clap::ValueEnum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    /// Header line followed by comma-separated numeric rows.
    Rows,
    /// Labelled human-readable summary stating the claim each number checks.
    Report,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rows" => Ok(OutputFormat::Rows),
            "report" => Ok(OutputFormat::Report),
            other => Err(format!("unknown format '{other}' (rows|report)")),
        }
    }
}

/// Builds either output style from the same data.
pub struct Sink {
    format: OutputFormat,
    buffer: String,
}

impl Sink {
    pub fn new(format: OutputFormat) -> Self {
        Self {
            format,
            buffer: String::new(),
        }
    }

    /// Report-only line.
    pub fn note(&mut self, line: impl AsRef<str>) {
        if self.format == OutputFormat::Report {
            self.buffer.push_str(line.as_ref());
            self.buffer.push('\n');
        }
    }

    /// Rows-only line (header or data row).
    pub fn row(&mut self, line: impl AsRef<str>) {
        if self.format == OutputFormat::Rows {
            self.buffer.push_str(line.as_ref());
            self.buffer.push('\n');
        }
    }

    pub fn finish(self, out: Option<&Path>) -> Result<()> {
        match out {
            Some(path) => std::fs::write(path, self.buffer)
                .with_context(|| format!("cannot write {}", path.display())),
            None => {
                print!("{}", self.buffer);
                Ok(())
            }
        }
    }
}

/// Compact float formatting shared by the row writers so identical inputs
/// always render identically.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.12e}")
    }
}
