//! Text and JSON renderings of evaluation results.
//!
//! JSON documents serialize struct fields in declaration order and
//! configuration maps with sorted keys, so identical runs produce identical
//! bytes.

use std::fmt::Write;

use serde::Serialize;

use crate::evaluate::{CvReport, FoldOutcome, RankingReport};
use crate::gamedata::Dataset;

/// How mean accuracies are computed; stated in every report.
pub const POOLING_NOTE: &str =
    "mean accuracy is pooled: correct predictions over all evaluated test instances; failed folds are excluded";

/// Folds used by a report.
pub const FOLD_NOTE: &str = "folds are contiguous blocks of the instance order, larger folds first";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DataSummary {
    pub relation: String,
    pub instances: usize,
    pub classes: Vec<String>,
    pub class_counts: Vec<usize>,
}

impl DataSummary {
    pub fn of(d: &Dataset) -> DataSummary {
        DataSummary {
            relation: d.relation().to_string(),
            instances: d.len(),
            classes: d.class_attribute().values().to_vec(),
            class_counts: d.class_counts(),
        }
    }
}

/// One dataset evaluated against a set of classifiers.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Run {
    pub label: String,
    pub data: DataSummary,
    pub ranking: RankingReport,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub toolkit: String,
    pub version: String,
    /// Effective configuration of the run, echoed verbatim.
    pub config: serde_json::Value,
    pub notes: Vec<String>,
    pub runs: Vec<Run>,
}

impl EvaluationReport {
    pub fn new(config: serde_json::Value, runs: Vec<Run>) -> EvaluationReport {
        EvaluationReport {
            toolkit: "stratmine".into(),
            version: crate::VERSION.into(),
            config,
            notes: vec![POOLING_NOTE.into(), FOLD_NOTE.into()],
            runs,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> EvaluationReport {
        self.notes.push(note.into());
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is always serializable");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "stratmine {}", self.version);
        for note in &self.notes {
            let _ = writeln!(out, "note: {note}");
        }
        for run in &self.runs {
            out.push('\n');
            out.push_str(&run_text(run));
        }
        if self.runs.len() > 1 {
            out.push('\n');
            out.push_str(&comparison_text(&self.runs));
        }
        out
    }
}

fn percent(x: Option<f64>) -> String {
    x.map_or_else(|| "failed".to_string(), |a| format!("{:.2}%", 100.0 * a))
}

fn fold_line(r: &CvReport) -> String {
    r.folds
        .iter()
        .map(|f| match &f.outcome {
            FoldOutcome::Evaluated { accuracy, .. } => format!("{:.3}", accuracy),
            FoldOutcome::Failed { .. } => "FAIL".to_string(),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Ranking table of one run, with per-fold accuracies and failure reasons.
pub fn run_text(run: &Run) -> String {
    let mut out = String::new();
    let d = &run.data;
    let counts: Vec<String> = d
        .classes
        .iter()
        .zip(&d.class_counts)
        .map(|(c, n)| format!("{c}={n}"))
        .collect();
    let _ = writeln!(
        out,
        "== {} ({}: {} instances; {})",
        run.label,
        d.relation,
        d.instances,
        counts.join(" ")
    );
    let _ = writeln!(
        out,
        "{:<4} {:<22} {:>9} {:>13} {:>6}",
        "rank", "classifier", "accuracy", "correct", "failed"
    );
    for (i, r) in run.ranking.ranking.iter().enumerate() {
        let _ = writeln!(
            out,
            "{:<4} {:<22} {:>9} {:>13} {:>6}",
            i + 1,
            r.classifier.id(),
            percent(r.mean_accuracy),
            format!("{}/{}", r.correct, r.evaluated),
            r.failed_folds
        );
    }
    for r in &run.ranking.ranking {
        let _ = writeln!(out, "  {} folds: {}", r.classifier.id(), fold_line(r));
        let reasons: Vec<&str> = r
            .folds
            .iter()
            .filter_map(|f| match &f.outcome {
                FoldOutcome::Failed { reason } => Some(reason.as_str()),
                FoldOutcome::Evaluated { .. } => None,
            })
            .collect();
        if reasons.len() > 1 && reasons.iter().all(|x| *x == reasons[0]) {
            let _ = writeln!(out, "    {} folds failed: {}", reasons.len(), reasons[0]);
            continue;
        }
        for f in &r.folds {
            if let FoldOutcome::Failed { reason } = &f.outcome {
                let _ = writeln!(out, "    fold {} [{}..{}) failed: {reason}", f.fold + 1, f.start, f.end);
            }
        }
    }
    let _ = writeln!(out, "winner: {}", run.ranking.winner.as_deref().unwrap_or("none"));
    out
}

/// Accuracy of every classifier across runs, classifiers in first-run
/// ranking order.
pub fn comparison_text(runs: &[Run]) -> String {
    let mut ids: Vec<&str> = Vec::new();
    for run in runs {
        for r in &run.ranking.ranking {
            if !ids.contains(&r.classifier.id()) {
                ids.push(r.classifier.id());
            }
        }
    }
    let mut out = String::new();
    let _ = write!(out, "{:<12}", "run");
    for id in &ids {
        let _ = write!(out, " {:>22}", id);
    }
    out.push('\n');
    for run in runs {
        let _ = write!(out, "{:<12}", run.label);
        for id in &ids {
            let acc = run
                .ranking
                .ranking
                .iter()
                .find(|r| r.classifier.id() == *id)
                .and_then(|r| r.mean_accuracy);
            let _ = write!(out, " {:>22}", percent(acc));
        }
        out.push('\n');
    }
    out
}
