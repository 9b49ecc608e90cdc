//! Report records and their JSON and CSV renderings.
//!
//! Reports carry no timestamps or paths, so the same command, seed and
//! configuration always render to the same bytes.

use latsum_core::{NormEstimate, SearchConfig};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const TOOL: &str = "latsum";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum OutFormat {
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfigRecord {
    pub starts: usize,
    pub max_iters: usize,
    pub step_shrink: f64,
    pub tol: f64,
    pub seed: u64,
}

impl From<&SearchConfig> for ConfigRecord {
    fn from(c: &SearchConfig) -> Self {
        ConfigRecord {
            starts: c.starts,
            max_iters: c.max_iters,
            step_shrink: c.step_shrink,
            tol: c.tol,
            seed: c.seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateRecord {
    pub value: f64,
    pub exact: bool,
    pub method: &'static str,
    pub certificate: Vec<f64>,
    pub seed: u64,
    pub starts_used: usize,
    pub iterations: usize,
}

impl From<&NormEstimate> for EstimateRecord {
    fn from(e: &NormEstimate) -> Self {
        EstimateRecord {
            value: e.value,
            exact: e.exact,
            method: e.method.as_str(),
            certificate: e.certificate.clone(),
            seed: e.seed,
            starts_used: e.starts_used,
            iterations: e.iterations,
        }
    }
}

/// Output of `seqnorm`, `opnorm` and `tensornorm`.
#[derive(Clone, Debug, Serialize)]
pub struct NormReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub kind: String,
    pub params: serde_json::Value,
    pub input_sha256: String,
    pub config: ConfigRecord,
    pub estimate: EstimateRecord,
}

/// One check of a verification suite. An instance may produce several rows,
/// told apart by `label`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub index: usize,
    pub instance_hash: String,
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub instances: usize,
    pub rows: usize,
    pub passed: usize,
    pub failed: usize,
    pub pass_rate: f64,
    pub max_gap: f64,
}

impl Summary {
    pub fn of(instances: usize, rows: &[Row]) -> Self {
        let passed = rows.iter().filter(|r| r.pass).count();
        Summary {
            instances,
            rows: rows.len(),
            passed,
            failed: rows.len() - passed,
            pass_rate: if rows.is_empty() { 1.0 } else { passed as f64 / rows.len() as f64 },
            max_gap: rows.iter().map(|r| r.gap).fold(0.0, f64::max),
        }
    }

    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

/// Output of `verify`.
#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub suite: &'static str,
    pub statement: &'static str,
    pub seed: u64,
    pub count: usize,
    pub with_oracle: bool,
    pub config: ConfigRecord,
    pub rows: Vec<Row>,
    pub summary: Summary,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteLine {
    pub suite: &'static str,
    pub statement: &'static str,
    pub count: usize,
    pub config: ConfigRecord,
    pub summary: Summary,
}

/// Output of `report`: one summary per suite.
#[derive(Clone, Debug, Serialize)]
pub struct FullReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub seed: u64,
    pub with_oracle: bool,
    pub suites: Vec<SuiteLine>,
}

/// First 16 hex digits of the SHA-256 of the JSON form of `value`.
pub fn short_hash<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("plain data serializes");
    hex::encode(&Sha256::digest(&bytes)[..8])
}

pub fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

fn csv_text(header: &[&str], records: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in records {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

fn num(v: f64) -> String {
    serde_json::to_string(&v).expect("float serializes")
}

impl NormReport {
    pub fn render(&self, out: OutFormat) -> String {
        match out {
            OutFormat::Json => json(self),
            OutFormat::Csv => {
                let e = &self.estimate;
                let cert: Vec<String> = e.certificate.iter().map(|v| num(*v)).collect();
                csv_text(
                    &[
                        "command",
                        "kind",
                        "params",
                        "value",
                        "exact",
                        "method",
                        "starts_used",
                        "iterations",
                        "seed",
                        "input_sha256",
                        "certificate",
                    ],
                    [vec![
                        self.command.to_string(),
                        self.kind.clone(),
                        self.params.to_string(),
                        num(e.value),
                        e.exact.to_string(),
                        e.method.to_string(),
                        e.starts_used.to_string(),
                        e.iterations.to_string(),
                        e.seed.to_string(),
                        self.input_sha256.clone(),
                        cert.join(" "),
                    ]],
                )
            }
        }
    }
}

const ROW_HEADER: [&str; 9] = ["suite", "index", "instance_hash", "label", "lhs", "rhs", "gap", "tol", "pass"];

fn row_record(suite: &str, r: &Row) -> Vec<String> {
    vec![
        suite.to_string(),
        r.index.to_string(),
        r.instance_hash.clone(),
        r.label.clone(),
        num(r.lhs),
        num(r.rhs),
        num(r.gap),
        num(r.tol),
        r.pass.to_string(),
    ]
}

/// The CSV summary line: `index` holds `summary`, `lhs` the pass rate,
/// `rhs` the number of rows and `gap` the largest gap.
fn summary_record(suite: &str, s: &Summary) -> Vec<String> {
    vec![
        suite.to_string(),
        "summary".into(),
        String::new(),
        format!("{}/{} passed", s.passed, s.rows),
        num(s.pass_rate),
        s.rows.to_string(),
        num(s.max_gap),
        String::new(),
        s.ok().to_string(),
    ]
}

impl VerifyReport {
    pub fn render(&self, out: OutFormat) -> String {
        match out {
            OutFormat::Json => json(self),
            OutFormat::Csv => {
                let rows = self.rows.iter().map(|r| row_record(self.suite, r));
                csv_text(&ROW_HEADER, rows.chain([summary_record(self.suite, &self.summary)]))
            }
        }
    }
}

impl FullReport {
    pub fn render(&self, out: OutFormat) -> String {
        match out {
            OutFormat::Json => json(self),
            OutFormat::Csv => csv_text(&ROW_HEADER, self.suites.iter().map(|l| summary_record(l.suite, &l.summary))),
        }
    }

    pub fn ok(&self) -> bool {
        self.suites.iter().all(|l| l.summary.ok())
    }
}
