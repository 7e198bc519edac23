//! Seeded rule-following subjects.
//!
//! A synthetic subject follows a prescribed rule with probability
//! `adherence` and deviates otherwise, so the adherence is exactly the best
//! accuracy any predictor can reach on its decisions. Generated logs use
//! the same types as ingested ones and serialize to the same CSV formats.

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rayon::prelude::*;

use crate::classifiers::FixedRule;
use crate::error::{Error, Result};
use crate::gamedata::{Cents, CtRecord, Episode, Gesture};
use crate::seed;

/// Label attached to reports built on generated data.
pub const SYNTHETIC_NOTE: &str =
    "synthetic data: generated by a seeded rule-following subject, not an empirical sample";

/// Subjects in the default CT layout; records are assigned round-robin.
pub const CT_SUBJECTS: usize = 25;

const ADHERENCE_SLACK: f64 = 1e-9;

/// Whose earlier gesture drives an RPS rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    Own,
    Opp,
}

impl Source {
    pub fn prefix(self) -> &'static str {
        match self {
            Source::Own => "own",
            Source::Opp => "opp",
        }
    }
}

/// "Play `map[g]` when the gesture `lag` turns back (own or opponent's)
/// was `g`", followed with probability `adherence`. Deviations are uniform
/// over the two other gestures.
#[derive(Clone, Debug, PartialEq)]
pub struct RpsSubjectRule {
    pub source: Source,
    pub lag: usize,
    /// Indexed by [`Gesture::index`].
    pub map: [Gesture; 3],
    pub adherence: f64,
    pub seed: u64,
}

impl RpsSubjectRule {
    /// The cyclic rule R→P, P→S, S→R.
    pub fn shift(source: Source, lag: usize, adherence: f64, seed: u64) -> RpsSubjectRule {
        RpsSubjectRule {
            source,
            lag,
            map: Gesture::ALL.map(Gesture::beaten_by),
            adherence,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1.0 / 3.0 - ADHERENCE_SLACK..=1.0).contains(&self.adherence) {
            return Err(Error::InvalidParam(format!(
                "RPS adherence must lie in [1/3, 1], got {}",
                self.adherence
            )));
        }
        if self.lag == 0 {
            return Err(Error::InvalidParam("rule lag must be at least 1".into()));
        }
        Ok(())
    }

    /// Name of the featurized attribute the rule reads.
    pub fn source_attribute(&self) -> String {
        format!("{}_prev_{}", self.source.prefix(), self.lag)
    }

    /// The noise-free rule as a fixed predictor over featurized data.
    pub fn fixed_rule(&self) -> FixedRule {
        FixedRule::NominalMap {
            source: self.source_attribute(),
            map: Gesture::ALL
                .iter()
                .map(|g| (g.token().to_string(), self.map[g.index()].token().to_string()))
                .collect(),
        }
    }

    fn play<R: Rng>(&self, own: &[Gesture], opp: &[Gesture], rng: &mut R) -> Gesture {
        let t = own.len();
        if t < self.lag {
            return Gesture::ALL[rng.gen_range(0..3)];
        }
        let cue = match self.source {
            Source::Own => own[t - self.lag],
            Source::Opp => opp[t - self.lag],
        };
        let target = self.map[cue.index()];
        if rng.gen::<f64>() < self.adherence {
            target
        } else {
            let shift = rng.gen_range(1..3);
            Gesture::ALL[(target.index() + shift) % 3]
        }
    }
}

/// `subjects × threads_per_subject` episodes of `turns` games each, ordered
/// by subject then thread. Episode `e` draws from sub-seeds derived from
/// the rule seeds and `e`, so episodes are independent of generation order.
/// Without an `opponent` rule the opponent plays uniformly at random.
pub fn synth_rps(
    subjects: usize,
    threads_per_subject: usize,
    turns: usize,
    rule: &RpsSubjectRule,
    opponent: Option<&RpsSubjectRule>,
) -> Result<Vec<Episode>> {
    rule.validate()?;
    if let Some(o) = opponent {
        o.validate()?;
    }
    if subjects == 0 || threads_per_subject == 0 || turns == 0 {
        return Err(Error::InvalidParam(
            "subjects, threads and turns must be positive".into(),
        ));
    }
    let width = subjects.to_string().len().max(2);
    let episodes = (0..subjects * threads_per_subject)
        .into_par_iter()
        .map(|e| {
            let stream = e as u64;
            let mut own_rng = seed::rng(seed::derive(seed::derive(rule.seed, stream), 0));
            let opp_seed = opponent.map_or(rule.seed, |o| o.seed);
            let mut opp_rng = seed::rng(seed::derive(seed::derive(opp_seed, stream), 1));
            let mut own = Vec::with_capacity(turns);
            let mut opp = Vec::with_capacity(turns);
            for _ in 0..turns {
                let a = rule.play(&own, &opp, &mut own_rng);
                let b = match opponent {
                    Some(o) => o.play(&opp, &own, &mut opp_rng),
                    None => Gesture::ALL[opp_rng.gen_range(0..3)],
                };
                own.push(a);
                opp.push(b);
            }
            Episode::from_pairs(
                format!("s{:0width$}", e / threads_per_subject + 1),
                format!("t{}", e % threads_per_subject + 1),
                own.into_iter().zip(opp),
            )
        })
        .collect();
    Ok(episodes)
}

/// Finite weighted support for one delta.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedGrid {
    pub values: Vec<Cents>,
    pub weights: Vec<f64>,
}

impl WeightedGrid {
    pub fn validate(&self, what: &str) -> Result<()> {
        if self.values.is_empty() || self.values.len() != self.weights.len() {
            return Err(Error::InvalidParam(format!("{what} grid needs one weight per value")));
        }
        if self.weights.iter().any(|w| !w.is_finite() || *w < 0.0) || self.weights.iter().sum::<f64>() <= 0.0 {
            return Err(Error::InvalidParam(format!(
                "{what} grid weights must be finite, non-negative and not all zero"
            )));
        }
        let mut sorted = self.values.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != self.values.len() {
            return Err(Error::InvalidParam(format!("{what} grid has duplicate values")));
        }
        Ok(())
    }

    /// `(value, probability)` pairs.
    pub fn probabilities(&self) -> impl Iterator<Item = (Cents, f64)> + '_ {
        let total: f64 = self.weights.iter().sum();
        self.values
            .iter()
            .copied()
            .zip(self.weights.iter().map(move |w| w / total))
    }
}

/// Independent proposer and responder delta distributions.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaGrid {
    pub proposer: WeightedGrid,
    pub responder: WeightedGrid,
}

impl DeltaGrid {
    /// Share of records whose responder delta is zero in the default grid.
    pub const ZERO_SHARE: f64 = 160.0 / 371.0;

    /// Values spanning the reference range.
    pub const REFERENCE_VALUES: [i64; 7] = [-135, -90, -45, 0, 45, 90, 145];

    /// [`Self::REFERENCE_VALUES`] for both deltas. Proposer deltas are
    /// uniform; a responder delta of zero carries [`Self::ZERO_SHARE`] of
    /// the mass and the remaining values share the rest. A stand-in, not an
    /// empirical distribution.
    pub fn reference() -> DeltaGrid {
        let values: Vec<Cents> = Self::REFERENCE_VALUES.iter().map(|&c| Cents(c)).collect();
        let others = (values.len() - 1) as f64;
        let responder_weights = values
            .iter()
            .map(|v| {
                if v.is_zero() {
                    Self::ZERO_SHARE
                } else {
                    (1.0 - Self::ZERO_SHARE) / others
                }
            })
            .collect();
        DeltaGrid {
            proposer: WeightedGrid {
                weights: vec![1.0; values.len()],
                values: values.clone(),
            },
            responder: WeightedGrid {
                values,
                weights: responder_weights,
            },
        }
    }
}

/// Refusal rule followed with probability `adherence`; otherwise the reply
/// is flipped.
#[derive(Clone, Debug, PartialEq)]
pub struct CtResponderRule {
    pub adherence: f64,
    pub seed: u64,
    pub grid: DeltaGrid,
}

impl CtResponderRule {
    pub fn new(adherence: f64, seed: u64) -> CtResponderRule {
        CtResponderRule {
            adherence,
            seed,
            grid: DeltaGrid::reference(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.adherence) {
            return Err(Error::InvalidParam(format!(
                "CT adherence must lie in [0, 1], got {}",
                self.adherence
            )));
        }
        self.grid.proposer.validate("proposer")?;
        self.grid.responder.validate("responder")
    }

    /// The noise-free reply: accept if the responder gains, or if the
    /// responder is unaffected and the proposer gains.
    pub fn prescribed(proposer: Cents, responder: Cents) -> bool {
        responder.is_positive() || (responder.is_zero() && proposer.is_positive())
    }

    pub fn fixed_rule(&self) -> FixedRule {
        FixedRule::Refusal
    }
}

/// `n` responder decisions over [`CT_SUBJECTS`] subjects, drawn in sequence
/// from the rule seed.
pub fn synth_ct(n: usize, rule: &CtResponderRule) -> Result<Vec<CtRecord>> {
    rule.validate()?;
    if n == 0 {
        return Err(Error::InvalidParam("n must be at least 1".into()));
    }
    let weights = |g: &WeightedGrid| WeightedIndex::new(&g.weights).map_err(|e| Error::InvalidParam(e.to_string()));
    let proposer = weights(&rule.grid.proposer)?;
    let responder = weights(&rule.grid.responder)?;
    let mut rng = seed::rng(rule.seed);
    Ok((0..n)
        .map(|i| {
            let p = rule.grid.proposer.values[proposer.sample(&mut rng)];
            let r = rule.grid.responder.values[responder.sample(&mut rng)];
            let follow = rng.gen::<f64>() < rule.adherence;
            CtRecord {
                subject_id: format!("c{:02}", i % CT_SUBJECTS + 1),
                proposer_delta: p,
                responder_delta: r,
                accepted: CtResponderRule::prescribed(p, r) == follow,
            }
        })
        .collect())
}

/// A generator whose expected accuracies can be enumerated.
#[derive(Clone, Copy, Debug)]
pub enum Generator<'a> {
    Rps(&'a RpsSubjectRule),
    Ct(&'a CtResponderRule),
}

/// Closed-form predictors supported by [`oracle_expected_accuracy`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Predictor {
    /// The generator's own noise-free rule.
    Rule,
    /// Uniform guess over the class labels.
    Uniform,
    /// Accept exactly when the responder delta is positive.
    EquilibriumResponder,
}

/// Expected accuracy of `predictor` on decisions drawn from `generator`
/// (RPS decisions after the rule's warmup turns).
pub fn oracle_expected_accuracy(generator: Generator<'_>, predictor: Predictor) -> Result<f64> {
    match (generator, predictor) {
        (Generator::Rps(r), Predictor::Rule) => r.validate().map(|_| r.adherence),
        (Generator::Rps(r), Predictor::Uniform) => r.validate().map(|_| 1.0 / 3.0),
        (Generator::Rps(_), Predictor::EquilibriumResponder) => Err(Error::InvalidParam(
            "the equilibrium responder does not apply to RPS".into(),
        )),
        (Generator::Ct(r), Predictor::Rule) => r.validate().map(|_| r.adherence),
        (Generator::Ct(r), Predictor::Uniform) => r.validate().map(|_| 0.5),
        (Generator::Ct(r), Predictor::EquilibriumResponder) => {
            r.validate()?;
            let mut total = 0.0;
            for (p, pp) in r.grid.proposer.probabilities() {
                for (q, pq) in r.grid.responder.probabilities() {
                    let agree = CtResponderRule::prescribed(p, q) == q.is_positive();
                    total += pp * pq * if agree { r.adherence } else { 1.0 - r.adherence };
                }
            }
            Ok(total)
        }
    }
}
