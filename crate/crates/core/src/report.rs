//! Per-check records and their two renderings.

use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRecord {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub seed: u64,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64, samples: usize, seed: u64) -> Self {
        Self {
            name: name.into(),
            residual,
            tolerance,
            samples,
            seed,
        }
    }

    /// An exact yes/no check: residual 0 when it holds, 1 otherwise.
    pub fn exact(name: impl Into<String>, holds: bool) -> Self {
        Self::new(name, if holds { 0.0 } else { 1.0 }, 0.0, 1, 0)
    }

    /// NaN residuals fail.
    pub fn pass(&self) -> bool {
        self.residual <= self.tolerance
    }

    fn verdict(&self) -> &'static str {
        if self.pass() { "pass" } else { "fail" }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerificationReport {
    pub records: Vec<CheckRecord>,
    /// Free-form lines printed before the records in the human rendering.
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, r: CheckRecord) {
        self.records.push(r);
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.notes.push(line.into());
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.records.extend(other.records);
        self.notes.extend(other.notes);
    }

    /// Prefixes every record name with `prefix.`.
    pub fn prefixed(mut self, prefix: &str) -> Self {
        for r in &mut self.records {
            r.name = format!("{prefix}.{}", r.name);
        }
        self
    }

    pub fn pass(&self) -> bool {
        self.records.iter().all(CheckRecord::pass)
    }

    /// `name\tresidual\ttolerance\tpass|fail`, one line per record.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            let _ = writeln!(out, "{}\t{:.6e}\t{:.6e}\t{}", r.name, r.residual, r.tolerance, r.verdict());
        }
        out
    }

    pub fn to_human(&self) -> String {
        let mut out = String::new();
        for n in &self.notes {
            let _ = writeln!(out, "{n}");
        }
        let width = self.records.iter().map(|r| r.name.len()).max().unwrap_or(0);
        for r in &self.records {
            let _ = writeln!(
                out,
                "{:width$}  {:.6e} <= {:.6e}  {}  (samples {}, seed {})",
                r.name,
                r.residual,
                r.tolerance,
                r.verdict().to_uppercase(),
                r.samples,
                r.seed,
            );
        }
        let passed = self.records.iter().filter(|r| r.pass()).count();
        let _ = writeln!(
            out,
            "overall: {} ({passed}/{} checks)",
            if self.pass() { "PASS" } else { "FAIL" },
            self.records.len()
        );
        out
    }
}
