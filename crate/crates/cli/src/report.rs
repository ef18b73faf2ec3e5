use num_bigint::BigInt;
use serde_json::{json, Value};
use thiserror::Error;
use tropfan::exactlin::IntMatrix;
use tropfan::polyfan::Fan;
use tropfan::tropcycle::MinkowskiWeight;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{context}{source}")]
    Library { context: String, source: tropfan::Error },
    #[error("{0}")]
    Usage(String),
}

impl From<tropfan::Error> for CliError {
    fn from(source: tropfan::Error) -> Self {
        CliError::Library { context: String::new(), source }
    }
}

pub trait Context<T> {
    fn context(self, what: &str) -> Result<T, CliError>;
}

impl<T> Context<T> for tropfan::Result<T> {
    fn context(self, what: &str) -> Result<T, CliError> {
        self.map_err(|source| CliError::Library { context: format!("{what}: "), source })
    }
}

/// What a command produced: a report, its human summary, and optionally a fan
/// document that replaces the summary on standard output.
pub struct Output {
    pub report: Value,
    pub summary: Vec<String>,
    pub document: Option<String>,
    pub status: u8,
}

impl Output {
    pub fn new(command: &str, mut report: Value, summary: Vec<String>) -> Self {
        report["command"] = json!(command);
        Output { report, summary, document: None, status: 0 }
    }

    pub fn with_document(mut self, document: String) -> Self {
        self.document = Some(document);
        self
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            // serde_json maps are sorted, so the pretty form is canonical
            let mut s = serde_json::to_string_pretty(&self.report).expect("reports serialize");
            s.push('\n');
            return s;
        }
        if let Some(doc) = &self.document {
            return doc.clone();
        }
        let mut s = self.summary.join("\n");
        s.push('\n');
        s
    }
}

pub fn int(x: &BigInt) -> Value {
    Value::String(x.to_string())
}

pub fn ints(xs: &[BigInt]) -> Value {
    Value::Array(xs.iter().map(int).collect())
}

pub fn matrix(m: &IntMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| ints(m.row(i))).collect())
}

/// A Minkowski weight as a list of `{cone, value}` with cones given by ray indices.
pub fn weight(f: &Fan, w: &MinkowskiWeight) -> Value {
    Value::Array(
        w.values()
            .iter()
            .map(|(&c, v)| json!({ "cone": f.cone(c).rays(), "value": int(v) }))
            .collect(),
    )
}

pub fn show(xs: &[BigInt]) -> String {
    let parts: Vec<String> = xs.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(","))
}

pub fn yes_no(b: bool, yes: &str, no: &str) -> String {
    if b { yes } else { no }.to_string()
}
