//! Structured check records and the byte-stable report format.
//!
//! A report is a config echo plus a list of records. Rendering is fully
//! deterministic: fixed field order, canonical rational formatting, newline
//! terminated. Identical config and seed must give identical bytes.

use crate::rat::{fmt_rat, Rat};
use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Reported value with no bound to compare against.
    Measured,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Measured => "measured",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Record {
    pub name: String,
    /// The inequality or fact being checked, in plain notation.
    pub claim: String,
    pub measured: Option<Rat>,
    pub bound: Option<Rat>,
    pub status: Status,
    /// Extra key-value details, emitted in insertion order.
    pub details: Vec<(String, String)>,
}

impl Record {
    pub fn pass_fail(name: &str, claim: &str, measured: Rat, bound: Rat) -> Record {
        Record {
            name: name.to_string(),
            claim: claim.to_string(),
            measured: Some(measured),
            bound: Some(bound),
            status: if measured <= bound {
                Status::Pass
            } else {
                Status::Fail
            },
            details: Vec::new(),
        }
    }

    pub fn measured(name: &str, claim: &str, measured: Rat) -> Record {
        Record {
            name: name.to_string(),
            claim: claim.to_string(),
            measured: Some(measured),
            bound: None,
            status: Status::Measured,
            details: Vec::new(),
        }
    }

    pub fn boolean(name: &str, claim: &str, ok: bool) -> Record {
        Record {
            name: name.to_string(),
            claim: claim.to_string(),
            measured: None,
            bound: None,
            status: if ok { Status::Pass } else { Status::Fail },
            details: Vec::new(),
        }
    }

    pub fn with_detail(mut self, key: &str, value: impl ToString) -> Record {
        self.details.push((key.to_string(), value.to_string()));
        self
    }
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub config: Vec<(String, String)>,
    pub records: Vec<Record>,
}

impl Report {
    pub fn new() -> Report {
        Report::default()
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.config.push((key.to_string(), value.to_string()));
    }

    pub fn push(&mut self, r: Record) {
        self.records.push(r);
    }

    pub fn extend(&mut self, rs: impl IntoIterator<Item = Record>) {
        self.records.extend(rs);
    }

    pub fn any_fail(&self) -> bool {
        self.records.iter().any(|r| r.status == Status::Fail)
    }

    /// Full machine-readable rendering.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str("format=hypact-report-v1\n");
        for (k, v) in &self.config {
            let _ = writeln!(out, "config.{k}={v}");
        }
        for r in &self.records {
            out.push('\n');
            let _ = writeln!(out, "record={}", r.name);
            let _ = writeln!(out, "claim={}", r.claim);
            if let Some(m) = r.measured {
                let _ = writeln!(out, "measured={}", fmt_rat(m));
            }
            if let Some(b) = r.bound {
                let _ = writeln!(out, "bound={}", fmt_rat(b));
            }
            let _ = writeln!(out, "status={}", r.status.as_str());
            for (k, v) in &r.details {
                let _ = writeln!(out, "detail.{k}={v}");
            }
        }
        out
    }

    /// One line per record, for terminal output.
    pub fn summary_lines(&self) -> Vec<String> {
        self.records
            .iter()
            .map(|r| {
                let mut line = format!("{:<4} {}", r.status.as_str().to_uppercase(), r.name);
                if let Some(m) = r.measured {
                    let _ = write!(line, " measured={}", fmt_rat(m));
                }
                if let Some(b) = r.bound {
                    let _ = write!(line, " bound={}", fmt_rat(b));
                }
                line
            })
            .collect()
    }
}
