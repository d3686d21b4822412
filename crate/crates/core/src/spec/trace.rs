use std::io::Read;
use std::path::Path;

use crate::predicate::Valuation;

#[derive(Debug, thiserror::Error)]
pub enum TraceError {
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("trace has no header row")]
    MissingHeader,
    #[error("line {line}: column `{column}` has non-numeric value `{value}`")]
    BadNumber { line: u64, column: String, value: String },
    #[error("line {line}: expected {expected} fields, found {found}")]
    Ragged { line: u64, expected: usize, found: usize },
}

/// Finite sequence of samples over a fixed set of variables.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    pub variables: Vec<String>,
    pub samples: Vec<Valuation>,
}

impl Trace {
    pub fn new(variables: Vec<String>) -> Self {
        Trace { variables, samples: Vec::new() }
    }

    /// Variables are taken from the first sample.
    pub fn from_samples(samples: Vec<Valuation>) -> Self {
        let variables = samples
            .first()
            .map(|v| v.variables().map(str::to_string).collect())
            .unwrap_or_default();
        Trace { variables, samples }
    }

    pub fn from_rows(variables: &[&str], rows: &[Vec<f64>]) -> Self {
        let samples = rows
            .iter()
            .map(|r| variables.iter().zip(r).map(|(k, v)| (*k, *v)).collect())
            .collect();
        Trace { variables: variables.iter().map(|s| s.to_string()).collect(), samples }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn push(&mut self, v: Valuation) {
        self.samples.push(v);
    }

    pub fn prefix(&self, n: usize) -> Trace {
        Trace { variables: self.variables.clone(), samples: self.samples[..n.min(self.len())].to_vec() }
    }

    /// CSV with a mandatory header row; blank lines are skipped.
    pub fn from_csv<R: Read>(reader: R) -> Result<Trace, TraceError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        if header.is_empty() || header.iter().all(String::is_empty) {
            return Err(TraceError::MissingHeader);
        }
        let mut trace = Trace::new(header.clone());
        for rec in rdr.records() {
            let rec = rec?;
            if rec.iter().all(str::is_empty) {
                continue;
            }
            let line = rec.position().map_or(0, |p| p.line());
            if rec.len() != header.len() {
                return Err(TraceError::Ragged { line, expected: header.len(), found: rec.len() });
            }
            let mut v = Valuation::new();
            for (name, field) in header.iter().zip(rec.iter()) {
                let x: f64 = field.parse().map_err(|_| TraceError::BadNumber {
                    line,
                    column: name.clone(),
                    value: field.to_string(),
                })?;
                v.insert(name, x);
            }
            trace.push(v);
        }
        Ok(trace)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Trace, TraceError> {
        Trace::from_csv(std::fs::File::open(path)?)
    }
}
