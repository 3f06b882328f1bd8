use serde::Serialize;

use crate::config::Params;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Rows with a fixed header, written with `,` separators and `.` decimals.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| *h == name)
    }

    /// Cells of `name` parsed as numbers.
    pub fn numbers(&self, name: &str) -> Vec<f64> {
        let i = self.column(name).expect("known column");
        self.rows.iter().map(|r| r[i].parse().unwrap_or(f64::NAN)).collect()
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| e.into_error().into())
    }
}

pub fn num(x: f64) -> String {
    format!("{x}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub params: Params,
    pub table: Table,
    pub checks: Vec<Check>,
    /// Paths dropped after a non-finite state or a singular flow.
    pub excluded_paths: usize,
    pub attempted_paths: usize,
}

/// Maximum tolerated share of excluded paths.
pub const MAX_EXCLUSION_RATE: f64 = 1e-3;

#[derive(Serialize)]
struct Summary<'a> {
    experiment: &'a str,
    version: &'a str,
    params: &'a Params,
    checks: &'a [Check],
    passed: bool,
    excluded_paths: usize,
    exclusion_rate: f64,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn exclusion_rate(&self) -> f64 {
        if self.attempted_paths == 0 {
            0.0
        } else {
            self.excluded_paths as f64 / self.attempted_paths as f64
        }
    }

    pub fn blew_up(&self) -> bool {
        self.exclusion_rate() >= MAX_EXCLUSION_RATE
    }

    pub fn csv_bytes(&self) -> Vec<u8> {
        self.table.to_csv().expect("in-memory CSV")
    }

    pub fn json_bytes(&self) -> Vec<u8> {
        let s = Summary {
            experiment: &self.params.experiment,
            version: lentparticle::VERSION,
            params: &self.params,
            checks: &self.checks,
            passed: self.passed(),
            excluded_paths: self.excluded_paths,
            exclusion_rate: self.exclusion_rate(),
        };
        let mut out = serde_json::to_vec_pretty(&s).expect("serializable summary");
        out.push(b'\n');
        out
    }
}
