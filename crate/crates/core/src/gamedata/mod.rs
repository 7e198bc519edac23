//! Raw game logs and featurized datasets.
//!
//! Two kinds of raw data are modelled: Rock-Paper-Scissors threads seen
//! from one player's side ([`Episode`]) and ultimatum-game responder
//! decisions ([`CtRecord`]). Both are ingested from CSV. Featurized data
//! lives in a [`Dataset`], which is exchanged as ARFF.

mod arff;
pub(crate) mod dataset;
mod logs;

use std::fmt;
use std::str::FromStr;

pub use arff::{read_arff, write_arff};
pub use dataset::{Attribute, AttributeKind, Dataset, Instance, Value};
pub use logs::{parse_ct_log, parse_ct_log_bounded, parse_rps_log, write_ct_log, write_rps_log, CT_HEADER, RPS_HEADER};

use crate::error::Error;

/// Default number of one-shot games in a thread.
pub const DEFAULT_THREAD_LENGTH: usize = 30;

/// A Rock-Paper-Scissors gesture. Nominal: there is no order between them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gesture {
    Rock,
    Paper,
    Scissors,
}

impl Gesture {
    /// Declaration order, also the order of nominal values in datasets.
    pub const ALL: [Gesture; 3] = [Gesture::Rock, Gesture::Paper, Gesture::Scissors];

    pub fn index(self) -> usize {
        match self {
            Gesture::Rock => 0,
            Gesture::Paper => 1,
            Gesture::Scissors => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Gesture> {
        Self::ALL.get(i).copied()
    }

    pub fn token(self) -> &'static str {
        match self {
            Gesture::Rock => "R",
            Gesture::Paper => "P",
            Gesture::Scissors => "S",
        }
    }

    /// The gesture this one loses to.
    pub fn beaten_by(self) -> Gesture {
        match self {
            Gesture::Rock => Gesture::Paper,
            Gesture::Paper => Gesture::Scissors,
            Gesture::Scissors => Gesture::Rock,
        }
    }
}

impl fmt::Display for Gesture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Gesture {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "R" => Ok(Gesture::Rock),
            "P" => Ok(Gesture::Paper),
            "S" => Ok(Gesture::Scissors),
            other => Err(format!("unknown gesture token {other:?} (expected R, P or S)")),
        }
    }
}

/// One one-shot game from the focal player's point of view.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RpsTurn {
    pub turn_index: usize,
    pub own: Gesture,
    pub opp: Gesture,
}

/// One subject's turns in one thread, ordered by `turn_index` from 0
/// without gaps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Episode {
    pub subject_id: String,
    pub thread_id: String,
    pub turns: Vec<RpsTurn>,
}

impl Episode {
    /// Builds an episode from gesture pairs, numbering turns from 0.
    pub fn from_pairs(
        subject_id: impl Into<String>,
        thread_id: impl Into<String>,
        pairs: impl IntoIterator<Item = (Gesture, Gesture)>,
    ) -> Episode {
        let turns = pairs
            .into_iter()
            .enumerate()
            .map(|(turn_index, (own, opp))| RpsTurn { turn_index, own, opp })
            .collect();
        Episode {
            subject_id: subject_id.into(),
            thread_id: thread_id.into(),
            turns,
        }
    }

    pub fn len(&self) -> usize {
        self.turns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.turns.is_empty()
    }

    pub fn validate(&self) -> Result<(), Error> {
        for (expected, turn) in self.turns.iter().enumerate() {
            if turn.turn_index != expected {
                return Err(Error::Episode {
                    subject: self.subject_id.clone(),
                    thread: self.thread_id.clone(),
                    message: format!("expected turn_index {expected}, found {}", turn.turn_index),
                });
            }
        }
        Ok(())
    }
}

/// A signed currency amount in integer cents.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cents(pub i64);

impl Cents {
    pub const ZERO: Cents = Cents(0);

    pub fn as_dollars(self) -> f64 {
        // Correctly rounded, so this equals parsing the decimal text.
        self.0 as f64 / 100.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }
}

impl fmt::Display for Cents {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        write!(f, "{sign}{}.{:02}", abs / 100, abs % 100)
    }
}

impl FromStr for Cents {
    type Err = String;

    /// Accepts an optional sign, at least one integer digit and exactly two
    /// fraction digits, e.g. `-1.35`, `0.00`, `+0.45`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("invalid amount {s:?} (expected signed decimal with two fraction digits)");
        let (negative, body) = match s.as_bytes().first() {
            Some(b'-') => (true, &s[1..]),
            Some(b'+') => (false, &s[1..]),
            _ => (false, s),
        };
        let (int_part, frac_part) = body.split_once('.').ok_or_else(bad)?;
        let digits = |p: &str| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit());
        if !digits(int_part) || frac_part.len() != 2 || !digits(frac_part) {
            return Err(bad());
        }
        let whole: i64 = int_part.parse().map_err(|_| bad())?;
        let frac: i64 = frac_part.parse().map_err(|_| bad())?;
        let magnitude = whole
            .checked_mul(100)
            .and_then(|w| w.checked_add(frac))
            .ok_or_else(bad)?;
        Ok(Cents(if negative { -magnitude } else { magnitude }))
    }
}

/// One responder decision of the ultimatum game.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CtRecord {
    pub subject_id: String,
    pub proposer_delta: Cents,
    pub responder_delta: Cents,
    pub accepted: bool,
}

/// Inclusive bounds on the responder's payoff update.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DeltaBounds {
    pub min: Cents,
    pub max: Cents,
}

impl DeltaBounds {
    /// Range observed in the reference experiment.
    pub const REFERENCE: DeltaBounds = DeltaBounds {
        min: Cents(-135),
        max: Cents(145),
    };

    pub fn contains(&self, c: Cents) -> bool {
        self.min <= c && c <= self.max
    }
}
