//! CSV output: UTF-8, LF line endings, header row, '.' decimals with 17
//! significant digits so every double round-trips.

use std::io::Write;
use std::path::Path;

/// Lossless float rendering (17 significant digits).
pub fn fmt_f64(v: f64) -> String {
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{v:.16e}")
}

pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: Vec<S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_to(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "{}", self.header.join(","))?;
        for row in &self.rows {
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    /// Writes to `path` when given, otherwise to stdout.
    pub fn write(&self, path: Option<&Path>) -> std::io::Result<()> {
        match path {
            Some(path) => {
                let file = std::fs::File::create(path)?;
                self.write_to(std::io::BufWriter::new(file))
            }
            None => self.write_to(std::io::stdout().lock()),
        }
    }
}
