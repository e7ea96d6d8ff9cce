//! Tabular results: CSV with a `# key: value` metadata header.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Metadata keys that vary between otherwise identical runs.
pub const VOLATILE_KEYS: [&str; 2] = ["wall_clock_s", "started_unix_s"];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultTable {
    /// Metadata in emission order.
    pub metadata: Vec<(String, String)>,
    /// Column names with units in brackets, e.g. `beta[dimensionless]`.
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl ResultTable {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            metadata: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        let value = value.to_string().replace('\n', " ");
        match self.metadata.iter_mut().find(|(k, _)| k == key) {
            Some(slot) => slot.1 = value,
            None => self.metadata.push((key.to_string(), value)),
        }
    }

    pub fn get_meta(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::Table(format!(
                "row has {} values, table has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        if let Some((i, v)) = row.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Table(format!("non-finite value {v} in column {}", self.columns[i])));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn emit<W: Write>(&self, mut out: W) -> Result<()> {
        let io = |e: std::io::Error| Error::Table(e.to_string());
        for (k, v) in &self.metadata {
            writeln!(out, "# {k}: {v}").map_err(io)?;
        }
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::Table(e.to_string());
        w.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format_value(*v))).map_err(csv_err)?;
        }
        w.flush().map_err(io)?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.emit(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Table(e.to_string()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut metadata = Vec::new();
        let mut body_start = 0;
        for line in text.split_inclusive('\n') {
            let Some(rest) = line.strip_prefix('#') else { break };
            let rest = rest.trim_end_matches(['\n', '\r']).trim_start();
            let (k, v) = rest
                .split_once(": ")
                .or_else(|| rest.strip_suffix(':').map(|k| (k, "")))
                .ok_or_else(|| Error::Table(format!("malformed metadata line {line:?}")))?;
            metadata.push((k.to_string(), v.to_string()));
            body_start += line.len();
        }
        let mut rdr = csv::Reader::from_reader(&text.as_bytes()[body_start..]);
        let columns: Vec<String> = rdr
            .headers()
            .map_err(|e| Error::Table(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        let mut table = ResultTable {
            metadata,
            columns,
            rows: Vec::new(),
        };
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::Table(e.to_string()))?;
            let row = rec
                .iter()
                .map(|s| s.parse::<f64>().map_err(|_| Error::Table(format!("not a number: {s:?}"))))
                .collect::<Result<Vec<_>>>()?;
            table.push(row)?;
        }
        Ok(table)
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        let io = |source| Error::Io {
            path: path.to_path_buf(),
            source,
        };
        let file = std::fs::File::create(path).map_err(io)?;
        let mut buf = std::io::BufWriter::new(file);
        self.emit(&mut buf)?;
        buf.flush().map_err(io)
    }

    /// The table text without volatile metadata lines.
    pub fn stable_text(&self) -> Result<String> {
        let mut copy = self.clone();
        copy.metadata.retain(|(k, _)| !VOLATILE_KEYS.contains(&k.as_str()));
        copy.to_csv_string()
    }
}

/// Shortest text that parses back to the same `f64`, in exponent form
/// outside `[1e-4, 1e6)`.
pub fn format_value(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-4..1e6).contains(&a) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}
