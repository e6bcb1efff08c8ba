//! Rendering of reports as JSON lines, aligned text tables or CSV.

use std::fmt::Write as _;

use serde::Serialize;
use unitroot::PadicScalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Table,
    Csv,
}

/// Flat rows of string cells with named columns.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn render_text(&self) -> String {
        let mut widths: Vec<usize> = self.columns.iter().map(|c| c.len()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let mut out = String::new();
        let mut line = |cells: &[String]| {
            let parts: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
            let _ = writeln!(out, "{}", parts.join("  ").trim_end());
        };
        line(&self.columns);
        for row in &self.rows {
            line(row);
        }
        out
    }

    fn render_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// A command's result: JSON records plus a tabular view.
#[derive(Debug, Clone)]
pub struct Report {
    /// One record, or an array written one element per line.
    pub json: serde_json::Value,
    pub table: Table,
    /// `key: value` lines printed under the text table.
    pub summary: Vec<(String, String)>,
    /// False when a check failed.
    pub ok: bool,
}

impl Report {
    pub fn new<T: Serialize>(value: &T, table: Table) -> Self {
        Self {
            json: serde_json::to_value(value).expect("reports serialize to JSON"),
            table,
            summary: Vec::new(),
            ok: true,
        }
    }

    pub fn with_summary(mut self, key: &str, value: impl ToString) -> Self {
        self.summary.push((key.to_string(), value.to_string()));
        self
    }

    pub fn render(&self, format: Format) -> Result<String, csv::Error> {
        Ok(match format {
            Format::Json => match &self.json {
                serde_json::Value::Array(records) => records.iter().map(|r| format!("{r}\n")).collect(),
                record => format!("{record}\n"),
            },
            Format::Csv => self.table.render_csv()?,
            Format::Table => {
                let mut out = self.table.render_text();
                for (k, v) in &self.summary {
                    let _ = writeln!(out, "{k}: {v}");
                }
                out
            }
        })
    }
}

/// `(valuation, unit, precision)` as three cells; `inf` for a zero valuation or exact precision.
pub fn padic_cells(x: &PadicScalar) -> [String; 3] {
    let opt = |v: Option<i64>| v.map_or_else(|| "inf".to_string(), |v| v.to_string());
    [opt(x.valuation()), x.unit().to_string(), opt(x.absprec())]
}

pub fn padic_columns(prefix: &str) -> [String; 3] {
    ["valuation", "unit", "precision"].map(|c| if prefix.is_empty() { c.to_string() } else { format!("{prefix}_{c}") })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_and_csv() {
        let mut t = Table::new(&["i", "value"]);
        t.push(vec!["1".into(), "10".into()]);
        t.push(vec!["2".into(), "a,b".into()]);
        assert_eq!(t.render_text(), "i  value\n1     10\n2    a,b\n");
        assert_eq!(t.render_csv().unwrap(), "i,value\n1,10\n2,\"a,b\"\n");
    }
}
