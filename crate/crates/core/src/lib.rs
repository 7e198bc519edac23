//! Behavior mining for repeated games.
//!
//! Play logs of repeated games are turned into supervised-learning
//! instances by a sliding history window, a small suite of classifiers is
//! trained on them, and the classifiers (each standing for one hypothesis
//! space) are ranked by order-preserving cross-validation accuracy.
//!
//! The pipeline, bottom-up:
//!
//! - [`gamedata`]: raw logs (Rock-Paper-Scissors threads, ultimatum
//!   responder records), the nominal/numeric [`Dataset`], CSV ingestion and
//!   ARFF interchange.
//! - [`featurize`]: the history window that maps a game history onto a
//!   fixed-length pattern.
//! - [`classifiers`]: ZeroR, a uniform-random baseline, OneR, decision
//!   tables, SMO-trained support vector machines and the equilibrium
//!   responder, plus fixed rules for measuring conformance.
//! - [`evaluate`]: contiguous-fold cross-validation, ranking and rule
//!   conformance.
//! - [`synthetic`]: seeded rule-following subjects used as ground truth.
//! - [`report`]: text and JSON renderings of evaluation results.

pub mod classifiers;
pub mod error;
pub mod evaluate;
pub mod featurize;
pub mod gamedata;
pub mod report;
pub mod seed;
pub mod synthetic;

pub use classifiers::{ClassifierSpec, SmoParams, TrainedModel};
pub use error::{Error, Result};
pub use evaluate::{CvReport, FoldPlan, RankingReport};
pub use featurize::WindowConfig;
pub use gamedata::{Attribute, AttributeKind, Cents, CtRecord, Dataset, Episode, Gesture, Instance, RpsTurn, Value};

/// Toolkit version stamped into ARFF headers, model files and reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
