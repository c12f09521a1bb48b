//! Independent checks of the kernel and the flows, each returning an [`OracleReport`].
//!
//! Constants whose existence is all that is known are reported as measured
//! values together with their change under one grid refinement.

mod bounds;
mod decay;
mod derivatives;
mod mc;
mod suite;

pub use bounds::check_bounds_suite;
pub use decay::check_lp_decay;
pub use derivatives::{check_derivatives, holder_increment, DerivativeGrid, HolderCheckParams, WeightFunction};
pub use mc::{mc_subordination_oracle, McEstimate, MIN_SAMPLES};
pub use suite::{default_suite, SuiteConfig};

use std::collections::BTreeMap;

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub name: String,
    pub passed: bool,
    pub measured: BTreeMap<String, f64>,
    /// Sample counts, standard errors, fit residuals.
    pub statistics: BTreeMap<String, f64>,
    pub seeds: Vec<u64>,
    pub notes: Vec<String>,
    pub children: Vec<OracleReport>,
}

impl OracleReport {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed: true,
            measured: BTreeMap::new(),
            statistics: BTreeMap::new(),
            seeds: Vec::new(),
            notes: Vec::new(),
            children: Vec::new(),
        }
    }

    pub fn measure(&mut self, key: &str, value: f64) -> &mut Self {
        self.measured.insert(key.into(), value);
        self
    }

    pub fn stat(&mut self, key: &str, value: f64) -> &mut Self {
        self.statistics.insert(key.into(), value);
        self
    }

    /// Records a failed condition; the report stays failed.
    pub fn require(&mut self, ok: bool, what: impl Into<String>) -> &mut Self {
        if !ok {
            self.passed = false;
            self.notes.push(format!("failed: {}", what.into()));
        }
        self
    }

    pub fn note(&mut self, text: impl Into<String>) -> &mut Self {
        self.notes.push(text.into());
        self
    }

    /// Adds a sub-report; a failing child fails the parent.
    pub fn child(&mut self, report: OracleReport) -> &mut Self {
        if !report.passed {
            self.passed = false;
        }
        self.children.push(report);
        self
    }

    /// A report for a check that could not run at all.
    pub fn errored(name: impl Into<String>, err: &crate::Error) -> Self {
        let mut r = Self::new(name);
        r.passed = false;
        r.notes.push(format!("error: {err}"));
        r
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("reports serialize")
    }
}

/// True iff every report passed.
pub fn roll_up(reports: &[OracleReport]) -> bool {
    reports.iter().all(|r| r.passed)
}

/// `|a - b| / |b|`, or `|a - b|` when `b = 0`.
pub(crate) fn relative_change(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        (a - b).abs()
    } else {
        ((a - b) / b).abs()
    }
}

/// Least-squares slope of `ys` against `xs`.
pub(crate) fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / sxx
}

#[cfg(test)]
mod tests;
