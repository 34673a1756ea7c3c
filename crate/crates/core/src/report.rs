//! Tabular results shared by the checks and the command-line front end.

use serde::{Deserialize, Serialize};

use crate::convergence::GUARD_BAND;

/// One `(n, q, function, norm/x)` cell.
///
/// `bound` and `slack` are NaN for informational rows, which always pass.
/// `x` is NaN for rows that summarise a whole grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub n: u32,
    pub q: f64,
    pub function: String,
    pub norm: String,
    pub x: f64,
    pub error: f64,
    pub bound: f64,
    pub slack: f64,
    pub pass: bool,
}

impl ReportRow {
    /// Row whose pass flag is `bound - error >= -GUARD_BAND`.
    pub fn check(n: u32, q: f64, function: &str, norm: &str, x: f64, error: f64, bound: f64) -> Self {
        let slack = bound - error;
        Self {
            n,
            q,
            function: function.to_string(),
            norm: norm.to_string(),
            x,
            error,
            bound,
            slack,
            pass: slack >= -GUARD_BAND,
        }
    }

    pub fn informational(n: u32, q: f64, function: &str, norm: &str, x: f64, error: f64) -> Self {
        Self {
            n,
            q,
            function: function.to_string(),
            norm: norm.to_string(),
            x,
            error,
            bound: f64::NAN,
            slack: f64::NAN,
            pass: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub rows: usize,
    pub failures: usize,
    /// Smallest finite slack, NaN when no row carries a bound.
    pub min_slack: f64,
    pub all_pass: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub rows: Vec<ReportRow>,
}

impl ConvergenceReport {
    pub fn push(&mut self, row: ReportRow) {
        self.rows.push(row);
    }

    pub fn extend(&mut self, other: ConvergenceReport) {
        self.rows.extend(other.rows);
    }

    pub fn summary(&self) -> Summary {
        let failures = self.rows.iter().filter(|r| !r.pass).count();
        let min_slack = self.rows.iter().map(|r| r.slack).filter(|s| s.is_finite()).fold(f64::NAN, f64::min);
        Summary { rows: self.rows.len(), failures, min_slack, all_pass: failures == 0 }
    }
}

/// Fixed-width scientific rendering with 15 significant digits.
pub fn format_sig15(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.14e}")
    }
}

/// `x` rounded to what [`format_sig15`] prints.
pub fn round_sig15(x: f64) -> f64 {
    if x.is_finite() {
        format_sig15(x).parse().expect("formatted float parses")
    } else {
        x
    }
}
