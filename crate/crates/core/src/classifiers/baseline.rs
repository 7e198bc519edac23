//! Baselines: majority class, the uniform mixed strategy, and the
//! payoff-maximizing responder.

use rand::Rng;

use super::{ClassifierSpec, ModelState, TrainedModel};
use crate::error::{Error, Result};
use crate::featurize::{CT_ACCEPT, CT_REJECT};
use crate::gamedata::dataset::argmax_first;
use crate::gamedata::Dataset;
use crate::seed;

pub fn fit_zero_r(d: &Dataset) -> Result<TrainedModel> {
    if d.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let class = argmax_first(&d.class_counts());
    Ok(TrainedModel::new(ClassifierSpec::ZeroR, d, ModelState::ZeroR { class }))
}

/// Needs no training data: predictions are uniform draws over the declared
/// class labels.
pub fn fit_uniform_random(d: &Dataset, seed: u64) -> Result<TrainedModel> {
    Ok(TrainedModel::new(
        ClassifierSpec::UniformRandom { seed },
        d,
        ModelState::UniformRandom {
            seed,
            num_classes: d.num_classes(),
        },
    ))
}

pub(crate) fn uniform_stream(seed: u64, num_classes: usize, n: usize) -> Vec<usize> {
    let mut rng = seed::rng(seed);
    (0..n).map(|_| rng.gen_range(0..num_classes)).collect()
}

/// Accepts exactly the proposals that raise the responder's payoff.
pub fn fit_equilibrium_responder(d: &Dataset) -> Result<TrainedModel> {
    let responder = d
        .attributes()
        .iter()
        .position(|a| a.name() == "responder_delta" && a.is_numeric())
        .ok_or_else(|| Error::SchemaMismatch("equilibrium responder needs a numeric responder_delta".into()))?;
    let class = d.class_attribute();
    let (accept, reject) = match (class.value_index(CT_ACCEPT), class.value_index(CT_REJECT)) {
        (Some(a), Some(r)) => (a, r),
        _ => {
            return Err(Error::SchemaMismatch(format!(
                "equilibrium responder needs class labels {CT_ACCEPT} and {CT_REJECT}"
            )))
        }
    };
    Ok(TrainedModel::new(
        ClassifierSpec::EquilibriumResponder,
        d,
        ModelState::EquilibriumResponder {
            responder,
            accept,
            reject,
        },
    ))
}
