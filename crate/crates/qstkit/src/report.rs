//! Check reports with deterministic CSV and JSON rendering.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    #[default]
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::BadParameter(format!("unknown format {other}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRow {
    pub suite: String,
    pub check: String,
    pub pass: bool,
    pub residual: Option<f64>,
    pub detail: String,
    /// topic the check instantiates
    pub anchor: String,
}

impl CheckRow {
    pub fn new(suite: &str, check: impl Into<String>, pass: bool, residual: Option<f64>, detail: impl Into<String>, anchor: &str) -> Self {
        CheckRow {
            suite: suite.into(),
            check: check.into(),
            pass,
            residual: residual.map(|r| if r.is_finite() { r } else { f64::MAX }),
            detail: detail.into(),
            anchor: anchor.into(),
        }
    }

    /// A failed row carrying an error message.
    pub fn error(suite: &str, check: impl Into<String>, e: &Error, anchor: &str) -> Self {
        Self::new(suite, check, false, None, format!("error: {e}"), anchor)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub suite: String,
    pub seed: u64,
    pub pass: bool,
    pub rows: Vec<CheckRow>,
    /// suite-specific payloads, e.g. verdicts, keyed by name
    pub data: serde_json::Map<String, serde_json::Value>,
}

impl Report {
    pub fn new(suite: &str, seed: u64) -> Self {
        Report {
            suite: suite.into(),
            seed,
            pass: true,
            rows: Vec::new(),
            data: serde_json::Map::new(),
        }
    }

    pub fn push(&mut self, row: CheckRow) {
        self.pass &= row.pass;
        self.rows.push(row);
    }

    pub fn extend(&mut self, other: Report) {
        for r in other.rows {
            self.push(r);
        }
        for (k, v) in other.data {
            self.data.insert(k, v);
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_csv(&self) -> Result<String> {
        rows_to_csv(&self.rows)
    }

    pub fn render(&self, f: Format) -> Result<String> {
        match f {
            Format::Csv => self.to_csv(),
            Format::Json => Ok(self.to_json()),
        }
    }
}

/// RFC-4180 CSV of any serializable row type.
pub fn rows_to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

/// JSON array of any serializable row type.
pub fn rows_to_json<T: Serialize>(rows: &[T]) -> String {
    serde_json::to_string_pretty(rows).expect("rows serialize") + "\n"
}

pub fn render_rows<T: Serialize>(rows: &[T], f: Format) -> Result<String> {
    match f {
        Format::Csv => rows_to_csv(rows),
        Format::Json => Ok(rows_to_json(rows)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quotes_commas_and_quotes() {
        let mut r = Report::new("x", 1);
        r.push(CheckRow::new("x", "a,b", true, Some(0.5), "say \"hi\"", "t"));
        let s = r.to_csv().unwrap();
        assert!(s.starts_with("suite,check,pass,residual,detail,anchor\r\n"));
        assert!(s.contains("\"a,b\""));
        assert!(s.contains("\"say \"\"hi\"\"\""));
    }

    #[test]
    fn failure_propagates() {
        let mut r = Report::new("x", 1);
        r.push(CheckRow::new("x", "ok", true, None, "", "t"));
        assert!(r.pass);
        r.push(CheckRow::new("x", "bad", false, Some(f64::NAN), "", "t"));
        assert!(!r.pass);
        assert_eq!(r.rows[1].residual, Some(f64::MAX));
    }
}
