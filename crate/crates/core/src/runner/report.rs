//! Report documents and CSV tables written by a run.
//!
//! `report.json` schema (version 1):
//!
//! ```text
//! {
//!   "schema_version": 1,
//!   "config":  { suites, dims, degrees, radii, l_max, seed, mode, cases, coeff_degree },
//!   "checks":  [ { suite, id, params: {name: value}, residual?, values, pass } ],
//!   "summary": { total, passed, failed, suites: { name: { total, passed, failed } } }
//! }
//! ```
//!
//! Wall-clock timings go to `timings.json` so `report.json` depends only on
//! the configuration and seed.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use super::config::{RunConfig, Suite};
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub suite: Suite,
    pub id: String,
    pub params: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
    pub values: serde_json::Value,
    pub pass: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

impl Counts {
    fn add(&mut self, pass: bool) {
        self.total += 1;
        if pass {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub suites: BTreeMap<String, Counts>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub config: RunConfig,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
}

impl ReportDocument {
    pub fn new(config: RunConfig, checks: Vec<CheckRecord>) -> Self {
        let mut all = Counts::default();
        let mut suites: BTreeMap<String, Counts> = BTreeMap::new();
        for c in &checks {
            all.add(c.pass);
            suites.entry(c.suite.name().to_string()).or_default().add(c.pass);
        }
        ReportDocument {
            schema_version: SCHEMA_VERSION,
            config,
            checks,
            summary: Summary {
                total: all.total,
                passed: all.passed,
                failed: all.failed,
                suites,
            },
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable")
    }
}

/// A human-readable table, one per suite.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&'static str]) -> Self {
        Table {
            headers: headers.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn extend(&mut self, other: Table) {
        self.rows.extend(other.rows);
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
        w.write_record(&self.headers).map_err(|e| csv_error(path, e))?;
        for row in &self.rows {
            w.write_record(row).map_err(|e| csv_error(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::io(path, std::io::Error::other(format!("{other:?}"))),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Timings {
    pub suites: BTreeMap<String, f64>,
    pub total_seconds: f64,
}
