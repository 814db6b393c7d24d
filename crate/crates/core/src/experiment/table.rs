use std::fmt::Write as _;
use std::path::Path;

use super::run::ResultRecord;
use crate::error::{Error, Result};

/// Numeric table with named columns. Values print in shortest round-trip
/// form, so parsing the CSV back gives the same bits.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", cells.join(",")).unwrap();
        }
        out
    }

    pub fn parse_csv(text: &str) -> Result<Table> {
        let mut lines = text.lines().enumerate();
        let (_, head) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty table".into() })?;
        let columns: Vec<String> = head.split(',').map(|c| c.trim().to_string()).collect();
        let mut rows = Vec::new();
        for (i, l) in lines {
            if l.trim().is_empty() {
                continue;
            }
            let row: Vec<f64> = l
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Parse { line: i + 1, msg: format!("bad number in {l:?}") })?;
            if row.len() != columns.len() {
                return Err(Error::Parse { line: i + 1, msg: format!("expected {} columns", columns.len()) });
            }
            rows.push(row);
        }
        Ok(Table { columns, rows })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Records,
}

/// Writes the record's table as CSV, or the whole record as text.
pub fn emit_table(record: &ResultRecord, format: TableFormat, path: &Path) -> Result<()> {
    let text = match format {
        TableFormat::Csv => record.table.to_csv(),
        TableFormat::Records => record.to_text(),
    };
    std::fs::write(path, text)?;
    Ok(())
}
