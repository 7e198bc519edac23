//! Support vector machines trained with SMO.
//!
//! Inputs are encoded with one indicator per nominal value and numerics
//! scaled to `[0, 1]` by the training extrema. More than two classes are
//! handled one-vs-one with majority voting.

use super::smo::{self, Kernel, SmoParams};
use super::{ClassifierSpec, ModelState, TrainedModel};
use crate::error::{Error, Result};
use crate::gamedata::{AttributeKind, Dataset, Value};

/// How one input attribute is encoded.
#[derive(Clone, Debug, PartialEq)]
pub enum Encoding {
    OneHot { attribute: usize, width: usize },
    Scaled { attribute: usize, min: f64, max: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Encoder {
    pub columns: Vec<Encoding>,
}

impl Encoder {
    pub fn fit(d: &Dataset) -> Result<Encoder> {
        let mut columns = Vec::new();
        for a in d.input_indices() {
            let attr = &d.attributes()[a];
            match attr.kind() {
                AttributeKind::Nominal(values) => columns.push(Encoding::OneHot {
                    attribute: a,
                    width: values.len(),
                }),
                AttributeKind::Numeric => {
                    let mut min = f64::INFINITY;
                    let mut max = f64::NEG_INFINITY;
                    for row in d.instances() {
                        let x = row[a].numeric().unwrap_or(f64::NAN);
                        if !x.is_finite() {
                            return Err(Error::NonFinite(attr.name().to_string()));
                        }
                        min = min.min(x);
                        max = max.max(x);
                    }
                    if d.is_empty() {
                        (min, max) = (0.0, 0.0);
                    }
                    columns.push(Encoding::Scaled { attribute: a, min, max });
                }
            }
        }
        Ok(Encoder { columns })
    }

    pub fn encode(&self, inst: &[Value]) -> Vec<f64> {
        let mut out = Vec::new();
        for col in &self.columns {
            match *col {
                Encoding::OneHot { attribute, width } => {
                    let hot = inst[attribute].nominal();
                    out.extend((0..width).map(|v| if Some(v) == hot { 1.0 } else { 0.0 }));
                }
                Encoding::Scaled { attribute, min, max } => {
                    let x = inst[attribute].numeric().unwrap_or(min);
                    out.push(if max > min { (x - min) / (max - min) } else { 0.0 });
                }
            }
        }
        out
    }
}

/// One pairwise machine. `negative` is the earlier-declared class (label
/// -1), `positive` the later one (+1).
#[derive(Clone, Debug, PartialEq)]
pub struct BinaryMachine {
    pub negative: usize,
    pub positive: usize,
    pub kind: MachineKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum MachineKind {
    /// Neither class present in training: abstains.
    Empty,
    /// Only one class present.
    Constant(usize),
    Trained {
        bias: f64,
        /// `(a_i * y_i, x_i)` for every multiplier `a_i > 0`.
        support: Vec<(f64, Vec<f64>)>,
        /// Primal weights, linear kernel only.
        weights: Option<Vec<f64>>,
    },
}

impl MachineKind {
    pub fn trained(kernel: Kernel, bias: f64, support: Vec<(f64, Vec<f64>)>, dim: usize) -> MachineKind {
        let weights = (kernel == Kernel::Linear).then(|| {
            let mut w = vec![0.0; dim];
            for (coef, x) in &support {
                for (wi, xi) in w.iter_mut().zip(x) {
                    *wi += coef * xi;
                }
            }
            w
        });
        MachineKind::Trained { bias, support, weights }
    }
}

impl BinaryMachine {
    pub fn decision(&self, kernel: Kernel, x: &[f64]) -> Option<f64> {
        match &self.kind {
            MachineKind::Trained { bias, support, weights } => Some(match weights {
                Some(w) => w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + bias,
                None => support.iter().map(|(coef, sv)| coef * kernel.eval(sv, x)).sum::<f64>() + bias,
            }),
            _ => None,
        }
    }

    /// The class this machine votes for, if any.
    pub fn vote(&self, kernel: Kernel, x: &[f64]) -> Option<usize> {
        match &self.kind {
            MachineKind::Empty => None,
            MachineKind::Constant(c) => Some(*c),
            MachineKind::Trained { .. } => {
                let f = self.decision(kernel, x)?;
                Some(if f > 0.0 { self.positive } else { self.negative })
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SvmModel {
    pub encoder: Encoder,
    pub kernel: Kernel,
    pub num_classes: usize,
    /// Pairwise machines in canonical `(i, j)`, `i < j` order.
    pub machines: Vec<BinaryMachine>,
}

impl SvmModel {
    pub fn votes(&self, inst: &[Value]) -> Vec<usize> {
        let x = self.encoder.encode(inst);
        let mut votes = vec![0; self.num_classes];
        for m in &self.machines {
            if let Some(c) = m.vote(self.kernel, &x) {
                votes[c] += 1;
            }
        }
        votes
    }

    pub fn predict(&self, inst: &[Value]) -> usize {
        crate::gamedata::dataset::argmax_first(&self.votes(inst))
    }

    pub fn dimension(&self) -> usize {
        self.encoder
            .columns
            .iter()
            .map(|c| match c {
                Encoding::OneHot { width, .. } => *width,
                Encoding::Scaled { .. } => 1,
            })
            .sum()
    }
}

fn train_pair(
    d: &Dataset,
    encoded: &[Vec<f64>],
    negative: usize,
    positive: usize,
    params: &SmoParams,
) -> Result<BinaryMachine> {
    let mut points = Vec::new();
    let mut labels = Vec::new();
    for (i, class) in d.classes().enumerate() {
        if class == negative || class == positive {
            points.push(encoded[i].clone());
            labels.push(if class == positive { 1.0 } else { -1.0 });
        }
    }
    let has_neg = labels.contains(&-1.0);
    let has_pos = labels.contains(&1.0);
    let kind = match (has_neg, has_pos) {
        (false, false) => MachineKind::Empty,
        (true, false) => MachineKind::Constant(negative),
        (false, true) => MachineKind::Constant(positive),
        (true, true) => {
            let sol = smo::solve(&points, &labels, params)?;
            let support = sol
                .alphas
                .iter()
                .zip(&labels)
                .zip(points)
                .filter(|((a, _), _)| **a > 0.0)
                .map(|((a, y), x)| (a * y, x))
                .collect();
            let dim = encoded.first().map_or(0, Vec::len);
            MachineKind::trained(params.kernel, sol.bias, support, dim)
        }
    };
    Ok(BinaryMachine {
        negative,
        positive,
        kind,
    })
}

fn check_classes(d: &Dataset) -> Result<()> {
    if d.num_classes() < 2 {
        return Err(Error::TooFewClasses(format!(
            "class attribute {} declares {} value(s)",
            d.class_attribute().name(),
            d.num_classes()
        )));
    }
    if d.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(())
}

/// One-vs-one SMO over all declared class pairs.
pub fn fit_smo_multiclass(d: &Dataset, params: &SmoParams) -> Result<TrainedModel> {
    params.validate()?;
    check_classes(d)?;
    let encoder = Encoder::fit(d)?;
    let encoded: Vec<Vec<f64>> = d.instances().iter().map(|r| encoder.encode(r)).collect();
    let k = d.num_classes();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    // pairs are independent; collect keeps canonical order
    let machines = {
        use rayon::prelude::*;
        pairs
            .par_iter()
            .map(|&(i, j)| train_pair(d, &encoded, i, j, params))
            .collect::<Result<Vec<_>>>()?
    };
    let model = SvmModel {
        encoder,
        kernel: params.kernel,
        num_classes: k,
        machines,
    };
    Ok(TrainedModel::new(
        ClassifierSpec::Smo(params.clone()),
        d,
        ModelState::Svm(model),
    ))
}

/// SMO on a dataset whose class attribute declares exactly two values.
pub fn fit_smo_binary(d: &Dataset, params: &SmoParams) -> Result<TrainedModel> {
    if d.num_classes() != 2 {
        return Err(Error::TooFewClasses(format!(
            "binary SMO needs exactly two declared classes, found {}",
            d.num_classes()
        )));
    }
    fit_smo_multiclass(d, params)
}
