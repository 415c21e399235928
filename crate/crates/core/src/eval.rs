//! Clip-level evaluation: accuracy, false positives, false negatives.

use serde::{Deserialize, Serialize};

/// Outcome of one evaluated clip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClipOutcome {
    pub filename: String,
    pub truth_positive: bool,
    pub predicted_positive: bool,
    pub confidence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n_clips: usize,
    pub accuracy: f64,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub fp_per_1000: f64,
    pub fn_per_1000: f64,
    pub rows: Vec<ClipOutcome>,
}

impl EvalReport {
    /// Build a report from raw error counts; the per-row detail stays empty.
    pub fn from_counts(n_clips: usize, false_positives: usize, false_negatives: usize) -> EvalReport {
        assert!(false_positives + false_negatives <= n_clips);
        let n = n_clips as f64;
        EvalReport {
            n_clips,
            accuracy: 1.0 - (false_positives + false_negatives) as f64 / n,
            false_positives,
            false_negatives,
            fp_per_1000: false_positives as f64 * 1000.0 / n,
            fn_per_1000: false_negatives as f64 * 1000.0 / n,
            rows: Vec::new(),
        }
    }

    pub fn from_outcomes(rows: Vec<ClipOutcome>) -> EvalReport {
        let fp = rows
            .iter()
            .filter(|r| !r.truth_positive && r.predicted_positive)
            .count();
        let fneg = rows
            .iter()
            .filter(|r| r.truth_positive && !r.predicted_positive)
            .count();
        let mut report = EvalReport::from_counts(rows.len(), fp, fneg);
        report.rows = rows;
        report
    }

    pub fn to_text(&self) -> String {
        format!(
            "clips:           {}\n\
             accuracy:        {:.4}\n\
             false positives: {} ({:.1} per 1000)\n\
             false negatives: {} ({:.1} per 1000)\n",
            self.n_clips,
            self.accuracy,
            self.false_positives,
            self.fp_per_1000,
            self.false_negatives,
            self.fn_per_1000
        )
    }
}
