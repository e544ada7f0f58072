//! Report rows and their CSV/JSON files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::constants::TAG_INFORMATIONAL;
use crate::error::Result;
use crate::rational::Rational;

/// Significant digits of the decimal column.
pub const DECIMAL_DIGITS: usize = 15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    /// A row that reports a value without checking it.
    Info,
}

impl From<bool> for Outcome {
    fn from(ok: bool) -> Self {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRow {
    pub experiment: String,
    /// `key=value` pairs joined by `;`.
    pub params: String,
    pub quantity: String,
    /// `num/den`, or empty when the quantity is not rational.
    pub exact: String,
    pub decimal: String,
    pub outcome: Outcome,
    pub tag: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub rows: Vec<ReportRow>,
}

/// Formats `key=value` pairs for the `params` column.
pub fn params(pairs: &[(&str, String)]) -> String {
    pairs
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(";")
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    fn push(&mut self, experiment: &str, params: &str, quantity: &str, exact: String, decimal: String, outcome: Outcome, tag: &str) {
        self.rows.push(ReportRow {
            experiment: experiment.into(),
            params: params.into(),
            quantity: quantity.into(),
            exact,
            decimal,
            outcome,
            tag: tag.into(),
        });
    }

    /// An exact value without a check.
    pub fn info(&mut self, experiment: &str, params: &str, quantity: &str, value: &Rational) {
        self.push(
            experiment,
            params,
            quantity,
            value.to_string(),
            value.to_decimal(DECIMAL_DIGITS),
            Outcome::Info,
            TAG_INFORMATIONAL,
        );
    }

    /// A non-rational value (a count, a flag, a float) without a check.
    pub fn note(&mut self, experiment: &str, params: &str, quantity: &str, text: impl ToString) {
        self.push(experiment, params, quantity, String::new(), text.to_string(), Outcome::Info, TAG_INFORMATIONAL);
    }

    /// An exact value together with the outcome of its exact check.
    pub fn check(&mut self, experiment: &str, params: &str, quantity: &str, value: &Rational, ok: bool, tag: &str) {
        self.push(
            experiment,
            params,
            quantity,
            value.to_string(),
            value.to_decimal(DECIMAL_DIGITS),
            ok.into(),
            tag,
        );
    }

    /// A check on a non-rational quantity such as a boolean property.
    pub fn check_flag(&mut self, experiment: &str, params: &str, quantity: &str, text: impl ToString, ok: bool, tag: &str) {
        self.push(experiment, params, quantity, String::new(), text.to_string(), ok.into(), tag);
    }

    /// A float rendering of an irrational quantity, optionally checked.
    pub fn float(&mut self, experiment: &str, params: &str, quantity: &str, value: f64, ok: Option<bool>, tag: &str) {
        let (outcome, tag) = match ok {
            Some(ok) => (ok.into(), tag),
            None => (Outcome::Info, TAG_INFORMATIONAL),
        };
        self.push(experiment, params, quantity, String::new(), format!("{value:.15}"), outcome, tag);
    }

    pub fn extend(&mut self, other: Report) {
        self.rows.extend(other.rows);
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.outcome != Outcome::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| r.outcome == Outcome::Fail)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row)?;
        }
        if self.rows.is_empty() {
            w.write_record(["experiment", "params", "quantity", "exact", "decimal", "outcome", "tag"])?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let rows = r.deserialize().collect::<std::result::Result<Vec<ReportRow>, _>>()?;
        Ok(Report { rows })
    }

    /// Writes `report.csv` and `report.json` into `dir`, creating it if needed.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir)?;
        let csv_path = dir.join("report.csv");
        let json_path = dir.join("report.json");
        fs::write(&csv_path, self.to_csv()?)?;
        fs::write(&json_path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok((csv_path, json_path))
    }
}
