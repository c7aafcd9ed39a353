use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::write_atomic;

/// One measured quantity against its bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub params: Vec<f64>,
    pub value: f64,
    pub bound: f64,
    pub ratio: f64,
}

/// Sweep output with named parameter columns followed by `value, bound, ratio`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub params: Vec<String>,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn new(params: &[&str]) -> Self {
        Self {
            params: params.iter().map(|p| p.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, params: Vec<f64>, value: f64, bound: f64) {
        debug_assert_eq!(params.len(), self.params.len());
        self.rows.push(SweepRow {
            params,
            value,
            bound,
            ratio: value / bound,
        });
    }

    pub fn worst_ratio(&self) -> f64 {
        self.rows.iter().map(|r| r.ratio).fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let header = self
            .params
            .iter()
            .map(String::as_str)
            .chain(["value", "bound", "ratio"]);
        w.write_record(header).map_err(csv_error)?;
        for row in &self.rows {
            let fields = row
                .params
                .iter()
                .chain([&row.value, &row.bound, &row.ratio])
                .map(|v| format!("{v:.12e}"));
            w.write_record(fields).map_err(csv_error)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_csv()?.as_bytes())
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Format(e.to_string())
}
