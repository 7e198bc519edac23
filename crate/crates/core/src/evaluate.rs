//! Order-preserving cross-validation and hypothesis-space ranking.
//!
//! Folds are contiguous blocks of the instance sequence. Accuracy is pooled
//! over all evaluated test instances rather than averaged per fold. A fold
//! whose training split cannot be fitted is recorded as failed and left out
//! of the pooled figure.

use std::cmp::Ordering;
use std::ops::Range;

use rayon::prelude::*;
use serde::Serialize;

use crate::classifiers::{self, ClassifierSpec, TrainedModel};
use crate::error::{Error, Result};
use crate::gamedata::Dataset;
use crate::seed;

/// Number of folds used in the reference protocol.
pub const DEFAULT_FOLDS: usize = 10;

/// Contiguous partition of `0..n` into `k` blocks, larger blocks first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FoldPlan {
    pub n: usize,
    pub k: usize,
    pub boundaries: Vec<Range<usize>>,
}

impl FoldPlan {
    /// Training indices for fold `f`, in original order.
    pub fn train_indices(&self, f: usize) -> impl Iterator<Item = usize> + '_ {
        let test = self.boundaries[f].clone();
        (0..self.n).filter(move |i| !test.contains(i))
    }
}

pub fn make_ordered_folds(n: usize, k: usize) -> Result<FoldPlan> {
    if k < 2 || k > n {
        return Err(Error::InvalidFolds { n, k });
    }
    let (base, extra) = (n / k, n % k);
    let mut boundaries = Vec::with_capacity(k);
    let mut start = 0;
    for i in 0..k {
        let size = base + usize::from(i < extra);
        boundaries.push(start..start + size);
        start += size;
    }
    Ok(FoldPlan { n, k, boundaries })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FoldOutcome {
    Evaluated {
        correct: usize,
        accuracy: f64,
        /// Rows are recorded classes, columns predicted classes.
        confusion: Vec<Vec<usize>>,
    },
    Failed {
        reason: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FoldResult {
    pub fold: usize,
    pub start: usize,
    pub end: usize,
    pub size: usize,
    #[serde(flatten)]
    pub outcome: FoldOutcome,
}

impl FoldResult {
    pub fn accuracy(&self) -> Option<f64> {
        match &self.outcome {
            FoldOutcome::Evaluated { accuracy, .. } => Some(*accuracy),
            FoldOutcome::Failed { .. } => None,
        }
    }

    pub fn is_failed(&self) -> bool {
        matches!(self.outcome, FoldOutcome::Failed { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CvReport {
    pub classifier: ClassifierSpec,
    pub n: usize,
    pub k: usize,
    pub folds: Vec<FoldResult>,
    /// Correct predictions over all evaluated folds.
    pub correct: usize,
    /// Test instances in evaluated folds.
    pub evaluated: usize,
    pub failed_folds: usize,
    /// `correct / evaluated`; `None` when every fold failed.
    pub mean_accuracy: Option<f64>,
}

impl CvReport {
    pub fn fold_accuracies(&self) -> Vec<Option<f64>> {
        self.folds.iter().map(FoldResult::accuracy).collect()
    }
}

/// Spec used for fold `fold`: randomized learners get a derived seed so
/// that folds do not replay the same stream.
fn fold_spec(spec: &ClassifierSpec, fold: usize) -> ClassifierSpec {
    match spec {
        ClassifierSpec::UniformRandom { seed: s } => ClassifierSpec::UniformRandom {
            seed: seed::derive(*s, fold as u64),
        },
        other => other.clone(),
    }
}

fn evaluate_fold(d: &Dataset, plan: &FoldPlan, f: usize, spec: &ClassifierSpec) -> FoldResult {
    let range = plan.boundaries[f].clone();
    let base = FoldResult {
        fold: f,
        start: range.start,
        end: range.end,
        size: range.len(),
        outcome: FoldOutcome::Failed { reason: String::new() },
    };
    let train = d.subset(plan.train_indices(f));
    let model = match classifiers::fit(&train, &fold_spec(spec, f)) {
        Ok(m) => m,
        Err(e) => {
            return FoldResult {
                outcome: FoldOutcome::Failed { reason: e.to_string() },
                ..base
            }
        }
    };
    let test = &d.instances()[range.clone()];
    let predictions = match model.predict_batch(test) {
        Ok(p) => p,
        Err(e) => {
            return FoldResult {
                outcome: FoldOutcome::Failed { reason: e.to_string() },
                ..base
            }
        }
    };
    let k = d.num_classes();
    let mut confusion = vec![vec![0usize; k]; k];
    let mut correct = 0;
    for (i, p) in range.clone().zip(&predictions) {
        let actual = d.class_of(i);
        confusion[actual][*p] += 1;
        correct += usize::from(actual == *p);
    }
    FoldResult {
        outcome: FoldOutcome::Evaluated {
            correct,
            accuracy: correct as f64 / range.len() as f64,
            confusion,
        },
        ..base
    }
}

pub fn cross_validate(d: &Dataset, spec: &ClassifierSpec, k: usize) -> Result<CvReport> {
    spec.validate()?;
    let plan = make_ordered_folds(d.len(), k)?;
    let folds: Vec<FoldResult> = (0..k)
        .into_par_iter()
        .map(|f| evaluate_fold(d, &plan, f, spec))
        .collect();
    let mut correct = 0;
    let mut evaluated = 0;
    let mut failed_folds = 0;
    for f in &folds {
        match &f.outcome {
            FoldOutcome::Evaluated { correct: c, .. } => {
                correct += c;
                evaluated += f.size;
            }
            FoldOutcome::Failed { .. } => failed_folds += 1,
        }
    }
    Ok(CvReport {
        classifier: spec.clone(),
        n: d.len(),
        k,
        folds,
        correct,
        evaluated,
        failed_folds,
        mean_accuracy: (evaluated > 0).then(|| correct as f64 / evaluated as f64),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankingReport {
    /// Descending by pooled accuracy; fully failed classifiers last.
    pub ranking: Vec<CvReport>,
    /// Id of the top-ranked classifier with an accuracy.
    pub winner: Option<String>,
}

fn rank_order(a: &CvReport, b: &CvReport) -> Ordering {
    let by_accuracy = match (a.mean_accuracy, b.mean_accuracy) {
        (Some(x), Some(y)) => y.total_cmp(&x),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => Ordering::Equal,
    };
    by_accuracy.then_with(|| a.classifier.id().cmp(b.classifier.id()))
}

/// Cross-validates every spec and ranks them: the top entry is the
/// hypothesis space whose best-found hypothesis matches the data best.
pub fn select_hypothesis_space(d: &Dataset, specs: &[ClassifierSpec], k: usize) -> Result<RankingReport> {
    if specs.is_empty() {
        return Err(Error::InvalidParam("no classifiers to rank".into()));
    }
    make_ordered_folds(d.len(), k)?;
    let mut ranking = specs
        .par_iter()
        .map(|s| cross_validate(d, s, k))
        .collect::<Result<Vec<_>>>()?;
    ranking.sort_by(rank_order);
    let winner = ranking
        .first()
        .filter(|r| r.mean_accuracy.is_some())
        .map(|r| r.classifier.id().to_string());
    Ok(RankingReport { ranking, winner })
}

/// Fraction of instances whose recorded class equals the model's
/// prediction, over the whole dataset.
pub fn rule_conformance(d: &Dataset, m: &TrainedModel) -> Result<f64> {
    m.check_dataset(d)?;
    if d.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let predictions = m.predict_batch(d.instances())?;
    let agree = predictions.iter().zip(d.classes()).filter(|(p, c)| **p == *c).count();
    Ok(agree as f64 / d.len() as f64)
}
