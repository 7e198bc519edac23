//! OneR: a single-attribute rule mapping each value (or numeric interval)
//! to its majority class.

use super::{condition, ClassifierSpec, ModelState, TrainedModel};
use crate::error::{Error, Result};
use crate::gamedata::dataset::argmax_first;
use crate::gamedata::{Attribute, Dataset, Value};

#[derive(Clone, Debug, PartialEq)]
pub enum OneRRule {
    /// Class per declared value; `None` for values unseen in training.
    Nominal { value_map: Vec<Option<usize>> },
    /// `classes[i]` covers values below `cuts[i]` (and at or above the
    /// previous cut); the last class covers everything from the last cut.
    Numeric { cuts: Vec<f64>, classes: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct OneRModel {
    pub attribute: usize,
    pub rule: OneRRule,
    pub default_class: usize,
}

impl OneRModel {
    pub fn predict(&self, inst: &[Value]) -> usize {
        match (&self.rule, inst[self.attribute]) {
            (OneRRule::Nominal { value_map }, Value::Nominal(v)) => {
                value_map.get(v).copied().flatten().unwrap_or(self.default_class)
            }
            (OneRRule::Numeric { cuts, classes }, Value::Numeric(x)) => {
                let bin = cuts.iter().position(|&c| x < c).unwrap_or(cuts.len());
                classes[bin]
            }
            _ => self.default_class,
        }
    }

    pub fn rule_text(&self, attributes: &[Attribute], class_index: usize) -> String {
        let attr = &attributes[self.attribute];
        let class = &attributes[class_index];
        let then = |c: usize| condition(class, Value::Nominal(c));
        let mut clauses = Vec::new();
        match &self.rule {
            OneRRule::Nominal { value_map } => {
                for (v, c) in value_map.iter().enumerate() {
                    if let Some(c) = c {
                        clauses.push(format!("IF {} THEN {}", condition(attr, Value::Nominal(v)), then(*c)));
                    }
                }
                if value_map.iter().any(Option::is_none) {
                    clauses.push(format!("ELSE {}", then(self.default_class)));
                }
            }
            OneRRule::Numeric { cuts, classes } => {
                let name = attr.name();
                for (i, c) in classes.iter().enumerate() {
                    let range = match (i.checked_sub(1).map(|j| cuts[j]), cuts.get(i)) {
                        (None, None) => "TRUE".to_string(),
                        (None, Some(hi)) => format!("{name}<{hi}"),
                        (Some(lo), None) => format!("{name}>={lo}"),
                        (Some(lo), Some(hi)) => format!("{lo}<={name}<{hi}"),
                    };
                    clauses.push(format!("IF {range} THEN {}", then(*c)));
                }
            }
        }
        clauses.join("; ")
    }
}

/// Rule and training error for one candidate attribute.
fn nominal_rule(d: &Dataset, attr: usize) -> (OneRRule, usize) {
    let num_values = d.attributes()[attr].values().len();
    let mut counts = vec![vec![0usize; d.num_classes()]; num_values];
    for (row, class) in d.instances().iter().zip(d.classes()) {
        if let Value::Nominal(v) = row[attr] {
            counts[v][class] += 1;
        }
    }
    let mut errors = 0;
    let value_map = counts
        .iter()
        .map(|c| {
            let total: usize = c.iter().sum();
            if total == 0 {
                return None;
            }
            let best = argmax_first(c);
            errors += total - c[best];
            Some(best)
        })
        .collect();
    (OneRRule::Nominal { value_map }, errors)
}

struct Bin {
    counts: Vec<usize>,
    class: usize,
    lo: f64,
    hi: f64,
}

/// Minimum-bucket discretization: each bucket grows until one class has
/// `min_bucket` members, then absorbs the following run of that class and
/// any ties on the attribute value. Neighbouring buckets with the same
/// majority class are merged.
fn numeric_rule(d: &Dataset, attr: usize, min_bucket: usize) -> (OneRRule, usize) {
    let mut order: Vec<(f64, usize)> = d
        .instances()
        .iter()
        .zip(d.classes())
        .map(|(row, class)| (row[attr].numeric().unwrap_or(0.0), class))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0));

    let k = d.num_classes();
    let n = order.len();
    let mut bins: Vec<Bin> = Vec::new();
    let mut i = 0;
    while i < n {
        let start = i;
        let mut counts = vec![0usize; k];
        loop {
            let c = order[i].1;
            counts[c] += 1;
            i += 1;
            if counts[c] >= min_bucket || i == n {
                break;
            }
        }
        let last_class = order[i - 1].1;
        while i < n && order[i].1 == last_class {
            counts[last_class] += 1;
            i += 1;
        }
        while i < n && order[i].0 == order[i - 1].0 {
            counts[order[i].1] += 1;
            i += 1;
        }
        let class = argmax_first(&counts);
        let (lo, hi) = (order[start].0, order[i - 1].0);
        match bins.last_mut() {
            Some(prev) if prev.class == class => {
                for (p, c) in prev.counts.iter_mut().zip(&counts) {
                    *p += c;
                }
                prev.hi = hi;
            }
            _ => bins.push(Bin { counts, class, lo, hi }),
        }
    }

    let errors = bins
        .iter()
        .map(|b| b.counts.iter().sum::<usize>() - b.counts[b.class])
        .sum();
    let cuts = bins.windows(2).map(|w| (w[0].hi + w[1].lo) / 2.0).collect();
    let classes = bins.iter().map(|b| b.class).collect();
    (OneRRule::Numeric { cuts, classes }, errors)
}

/// Training errors of every candidate attribute, in attribute order.
pub(crate) fn candidate_errors(d: &Dataset, min_bucket: usize) -> Vec<(usize, OneRRule, usize)> {
    d.input_indices()
        .map(|a| {
            let (rule, errors) = if d.attributes()[a].is_numeric() {
                numeric_rule(d, a, min_bucket)
            } else {
                nominal_rule(d, a)
            };
            (a, rule, errors)
        })
        .collect()
}

pub fn fit_one_r(d: &Dataset, min_bucket: usize) -> Result<TrainedModel> {
    if d.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if min_bucket == 0 {
        return Err(Error::InvalidParam("min_bucket must be positive".into()));
    }
    let spec = ClassifierSpec::OneR { min_bucket };
    let default_class = argmax_first(&d.class_counts());
    let mut best: Option<(usize, OneRRule, usize)> = None;
    for cand in candidate_errors(d, min_bucket) {
        if best.as_ref().is_none_or(|b| cand.2 < b.2) {
            best = Some(cand);
        }
    }
    let state = match best {
        Some((attribute, rule, _)) => OneRModel {
            attribute,
            rule,
            default_class,
        },
        // class-only schema: nothing to split on
        None => {
            return Err(Error::InvalidDataset(
                "OneR needs at least one non-class attribute".into(),
            ))
        }
    };
    Ok(TrainedModel::new(spec, d, ModelState::OneR(state)))
}
