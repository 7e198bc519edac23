//! Prescribed rules used as predictors without learning anything.

use serde::{Deserialize, Serialize};

use super::{ClassifierSpec, ModelState, TrainedModel};
use crate::error::{Error, Result};
use crate::featurize::{CT_ACCEPT, CT_REJECT};
use crate::gamedata::{Attribute, Dataset, Value};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum FixedRule {
    /// Accept when the responder gains, or when the responder is unaffected
    /// and the proposer gains; otherwise reject.
    Refusal,
    /// Class label chosen by the value of one nominal attribute. `map`
    /// pairs every source value with a class label.
    NominalMap { source: String, map: Vec<(String, String)> },
}

#[derive(Clone, Debug, PartialEq)]
pub enum ResolvedRule {
    Refusal {
        proposer: usize,
        responder: usize,
        accept: usize,
        reject: usize,
    },
    NominalMap {
        source: usize,
        classes: Vec<usize>,
    },
}

impl ResolvedRule {
    pub(crate) fn predict(&self, inst: &[Value]) -> usize {
        match self {
            ResolvedRule::Refusal {
                proposer,
                responder,
                accept,
                reject,
            } => {
                let p = inst[*proposer].numeric().unwrap_or(f64::NAN);
                let r = inst[*responder].numeric().unwrap_or(f64::NAN);
                if r > 0.0 || (r == 0.0 && p > 0.0) {
                    *accept
                } else {
                    *reject
                }
            }
            ResolvedRule::NominalMap { source, classes } => match inst[*source] {
                Value::Nominal(v) => classes[v],
                Value::Numeric(_) => unreachable!("schema checked"),
            },
        }
    }
}

fn numeric_input(attrs: &[Attribute], class_index: usize, name: &str) -> Result<usize> {
    attrs
        .iter()
        .enumerate()
        .position(|(i, a)| i != class_index && a.name() == name && a.is_numeric())
        .ok_or_else(|| Error::SchemaMismatch(format!("rule needs a numeric attribute {name}")))
}

/// Binds `rule` to attribute and label indices of a schema.
pub(crate) fn resolve(rule: &FixedRule, attrs: &[Attribute], class_index: usize) -> Result<ResolvedRule> {
    let class = &attrs[class_index];
    match rule {
        FixedRule::Refusal => {
            let (accept, reject) = match (class.value_index(CT_ACCEPT), class.value_index(CT_REJECT)) {
                (Some(a), Some(r)) => (a, r),
                _ => {
                    return Err(Error::SchemaMismatch(format!(
                        "refusal rule needs class labels {CT_ACCEPT} and {CT_REJECT}"
                    )))
                }
            };
            Ok(ResolvedRule::Refusal {
                proposer: numeric_input(attrs, class_index, "proposer_delta")?,
                responder: numeric_input(attrs, class_index, "responder_delta")?,
                accept,
                reject,
            })
        }
        FixedRule::NominalMap { source, map } => {
            let s = attrs
                .iter()
                .enumerate()
                .position(|(i, a)| i != class_index && a.name() == source && !a.is_numeric())
                .ok_or_else(|| Error::SchemaMismatch(format!("rule needs a nominal attribute {source}")))?;
            let values = attrs[s].values();
            let mut classes = vec![None; values.len()];
            for (from, to) in map {
                let v = attrs[s]
                    .value_index(from)
                    .ok_or_else(|| Error::InvalidParam(format!("{source} has no value {from}")))?;
                let c = class
                    .value_index(to)
                    .ok_or_else(|| Error::InvalidParam(format!("{} has no label {to}", class.name())))?;
                if classes[v].replace(c).is_some() {
                    return Err(Error::InvalidParam(format!("value {from} mapped twice")));
                }
            }
            let classes = classes
                .into_iter()
                .zip(values)
                .map(|(c, v)| c.ok_or_else(|| Error::InvalidParam(format!("value {v} of {source} is unmapped"))))
                .collect::<Result<Vec<_>>>()?;
            Ok(ResolvedRule::NominalMap { source: s, classes })
        }
    }
}

pub fn fit_fixed_rule(d: &Dataset, rule: &FixedRule) -> Result<TrainedModel> {
    let resolved = resolve(rule, d.attributes(), d.class_index())?;
    Ok(TrainedModel::new(
        ClassifierSpec::FixedRule(rule.clone()),
        d,
        ModelState::FixedRule(resolved),
    ))
}
