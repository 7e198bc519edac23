//! Supervised learners, one per hypothesis space.
//!
//! Every learner is fitted through [`fit`] from a [`ClassifierSpec`] and
//! yields an immutable [`TrainedModel`]. Predictions are class indices into
//! the class attribute's declared labels.

mod baseline;
mod decision_table;
mod fixed;
mod model_io;
mod one_r;
pub mod smo;
mod svm;

use serde::{Deserialize, Serialize};

pub use baseline::{fit_equilibrium_responder, fit_uniform_random, fit_zero_r};
pub use decision_table::{fit_decision_table, DecisionTableModel};
pub use fixed::{fit_fixed_rule, FixedRule, ResolvedRule};
pub use model_io::{read_model, write_model};
pub use one_r::{fit_one_r, OneRModel, OneRRule};
pub use smo::{Kernel, SmoParams};
pub use svm::{fit_smo_binary, fit_smo_multiclass, BinaryMachine, SvmModel};

use crate::error::{Error, Result};
use crate::gamedata::{Attribute, Dataset, Instance, Value};

/// Default minimum bucket size for OneR numeric discretization.
pub const DEFAULT_MIN_BUCKET: usize = 6;
/// Default number of consecutive non-improving expansions before the
/// decision-table search stops.
pub const DEFAULT_STALE_LIMIT: usize = 5;

/// A learner and its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case")]
pub enum ClassifierSpec {
    ZeroR,
    UniformRandom {
        seed: u64,
    },
    OneR {
        min_bucket: usize,
    },
    DecisionTable {
        stale_limit: usize,
    },
    Smo(SmoParams),
    EquilibriumResponder,
    /// A prescribed rule, used to measure conformance rather than learned.
    FixedRule(FixedRule),
}

impl ClassifierSpec {
    /// Ids of the learner suite accepted by [`ClassifierSpec::from_id`].
    pub const IDS: [&'static str; 6] = [
        "zero_r",
        "uniform_random",
        "one_r",
        "decision_table",
        "smo",
        "equilibrium_responder",
    ];

    pub fn id(&self) -> &'static str {
        match self {
            ClassifierSpec::ZeroR => "zero_r",
            ClassifierSpec::UniformRandom { .. } => "uniform_random",
            ClassifierSpec::OneR { .. } => "one_r",
            ClassifierSpec::DecisionTable { .. } => "decision_table",
            ClassifierSpec::Smo(_) => "smo",
            ClassifierSpec::EquilibriumResponder => "equilibrium_responder",
            ClassifierSpec::FixedRule(_) => "fixed_rule",
        }
    }

    /// Spec with default parameters for `id`; `seed` feeds the randomized
    /// learners.
    pub fn from_id(id: &str, seed: u64) -> Result<ClassifierSpec> {
        Ok(match id {
            "zero_r" => ClassifierSpec::ZeroR,
            "uniform_random" => ClassifierSpec::UniformRandom { seed },
            "one_r" => ClassifierSpec::OneR {
                min_bucket: DEFAULT_MIN_BUCKET,
            },
            "decision_table" => ClassifierSpec::DecisionTable {
                stale_limit: DEFAULT_STALE_LIMIT,
            },
            "smo" => ClassifierSpec::Smo(SmoParams {
                seed,
                ..SmoParams::default()
            }),
            "equilibrium_responder" => ClassifierSpec::EquilibriumResponder,
            other => {
                return Err(Error::InvalidParam(format!(
                    "unknown classifier {other:?} (known: {})",
                    Self::IDS.join(", ")
                )))
            }
        })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ClassifierSpec::OneR { min_bucket: 0 } => Err(Error::InvalidParam("min_bucket must be positive".into())),
            ClassifierSpec::DecisionTable { stale_limit: 0 } => {
                Err(Error::InvalidParam("stale_limit must be positive".into()))
            }
            ClassifierSpec::Smo(p) => p.validate(),
            _ => Ok(()),
        }
    }
}

/// Fitted parameters, one variant per learner.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelState {
    ZeroR {
        class: usize,
    },
    UniformRandom {
        seed: u64,
        num_classes: usize,
    },
    OneR(OneRModel),
    DecisionTable(DecisionTableModel),
    Svm(SvmModel),
    EquilibriumResponder {
        responder: usize,
        accept: usize,
        reject: usize,
    },
    FixedRule(ResolvedRule),
}

/// A fitted hypothesis together with the schema it was trained on.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainedModel {
    spec: ClassifierSpec,
    relation: String,
    attributes: Vec<Attribute>,
    class_index: usize,
    state: ModelState,
}

impl TrainedModel {
    pub(crate) fn new(spec: ClassifierSpec, d: &Dataset, state: ModelState) -> TrainedModel {
        TrainedModel {
            spec,
            relation: d.relation().to_string(),
            attributes: d.attributes().to_vec(),
            class_index: d.class_index(),
            state,
        }
    }

    pub fn spec(&self) -> &ClassifierSpec {
        &self.spec
    }

    pub fn state(&self) -> &ModelState {
        &self.state
    }

    pub fn relation(&self) -> &str {
        &self.relation
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn class_index(&self) -> usize {
        self.class_index
    }

    pub fn class_attribute(&self) -> &Attribute {
        &self.attributes[self.class_index]
    }

    /// Checks the non-class cells of `inst` against the training schema.
    pub fn check_instance(&self, inst: &[Value]) -> Result<()> {
        if inst.len() != self.attributes.len() {
            return Err(Error::SchemaMismatch(format!(
                "instance has {} values, model schema has {} attributes",
                inst.len(),
                self.attributes.len()
            )));
        }
        for (i, (v, a)) in inst.iter().zip(&self.attributes).enumerate() {
            if i != self.class_index && !a.accepts(v) {
                return Err(Error::SchemaMismatch(format!(
                    "value {v:?} does not fit attribute {}",
                    a.name()
                )));
            }
        }
        Ok(())
    }

    pub fn check_dataset(&self, d: &Dataset) -> Result<()> {
        if !d.same_schema(&self.attributes, self.class_index) {
            return Err(Error::SchemaMismatch(format!(
                "dataset {} does not have the schema the model was trained on",
                d.relation()
            )));
        }
        Ok(())
    }

    /// Prediction for one instance. For the uniform-random baseline this is
    /// the first draw of its seeded stream; use [`TrainedModel::predict_batch`]
    /// to consume the stream in sequence.
    pub fn predict(&self, inst: &[Value]) -> Result<usize> {
        self.check_instance(inst)?;
        Ok(match &self.state {
            ModelState::UniformRandom { seed, num_classes } => baseline::uniform_stream(*seed, *num_classes, 1)[0],
            _ => self.predict_deterministic(inst),
        })
    }

    /// Predictions for `instances` in order. The uniform-random baseline
    /// draws position `i` of its seeded stream for instance `i`.
    pub fn predict_batch(&self, instances: &[Instance]) -> Result<Vec<usize>> {
        for inst in instances {
            self.check_instance(inst)?;
        }
        Ok(match &self.state {
            ModelState::UniformRandom { seed, num_classes } => {
                baseline::uniform_stream(*seed, *num_classes, instances.len())
            }
            _ => instances.iter().map(|i| self.predict_deterministic(i)).collect(),
        })
    }

    fn predict_deterministic(&self, inst: &[Value]) -> usize {
        match &self.state {
            ModelState::ZeroR { class } => *class,
            ModelState::OneR(m) => m.predict(inst),
            ModelState::DecisionTable(m) => m.predict(inst),
            ModelState::Svm(m) => m.predict(inst),
            ModelState::EquilibriumResponder {
                responder,
                accept,
                reject,
            } => match inst[*responder] {
                Value::Numeric(x) if x > 0.0 => *accept,
                _ => *reject,
            },
            ModelState::FixedRule(r) => r.predict(inst),
            ModelState::UniformRandom { .. } => unreachable!("handled by callers"),
        }
    }

    /// Human-readable rule of a rule-based model, `None` for other kinds.
    pub fn rule_text(&self) -> Option<String> {
        match &self.state {
            ModelState::OneR(m) => Some(m.rule_text(&self.attributes, self.class_index)),
            ModelState::DecisionTable(m) => Some(m.rule_text(&self.attributes, self.class_index)),
            _ => None,
        }
    }
}

/// Fits the learner described by `spec` on `d`.
pub fn fit(d: &Dataset, spec: &ClassifierSpec) -> Result<TrainedModel> {
    spec.validate()?;
    match spec {
        ClassifierSpec::ZeroR => fit_zero_r(d),
        ClassifierSpec::UniformRandom { seed } => fit_uniform_random(d, *seed),
        ClassifierSpec::OneR { min_bucket } => fit_one_r(d, *min_bucket),
        ClassifierSpec::DecisionTable { stale_limit } => fit_decision_table(d, *stale_limit),
        ClassifierSpec::Smo(p) => fit_smo_multiclass(d, p),
        ClassifierSpec::EquilibriumResponder => fit_equilibrium_responder(d),
        ClassifierSpec::FixedRule(r) => fit_fixed_rule(d, r),
    }
}

/// Rule text of a rule-based model.
pub fn extract_rule_text(m: &TrainedModel) -> Result<String> {
    m.rule_text()
        .ok_or_else(|| Error::InvalidParam(format!("{} is not a rule-based model", m.spec().id())))
}

/// `IF`-clause fragment for one attribute/value condition.
pub(crate) fn condition(attr: &Attribute, value: Value) -> String {
    format!("{}={}", attr.name(), attr.render(value))
}
