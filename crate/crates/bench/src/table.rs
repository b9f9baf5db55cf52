use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};

/// Long-format result table: one row per grid cell, parameter columns
/// first. `None` cells are written blank.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<String>>>,
}

impl ResultTable {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Option<String>>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<&str> = row.iter().map(|c| c.as_deref().unwrap_or("")).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv()).with_context(|| format!("writing {}", path.display()))
    }
}

/// Formats a float for a table cell: fixed `decimals` places.
pub fn fixed(v: f64, decimals: usize) -> Option<String> {
    Some(format!("{v:.decimals$}"))
}

/// Shortest round-trip representation, for parameter columns.
pub fn exact(v: f64) -> Option<String> {
    Some(v.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blanks_are_empty_fields() {
        let mut t = ResultTable::new(["a", "b", "isnr_db"]);
        t.push(vec![exact(1.1), exact(1.8), fixed(16.49814, 4)]);
        t.push(vec![exact(2.0), exact(1.0), None]);
        assert_eq!(t.to_csv(), "a,b,isnr_db\n1.1,1.8,16.4981\n2,1,\n");
        assert_eq!(t.column("b"), Some(1));
    }
}
