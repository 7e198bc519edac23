//! History window featurization.
//!
//! A game history is reduced to the last `w` gestures of each player; the
//! label is the focal player's next gesture. Ultimatum records map onto a
//! three-attribute instance without any discretization.

use crate::error::{Error, Result};
use crate::gamedata::{Attribute, CtRecord, Dataset, Episode, Gesture, Value};

/// Width of the history window, in turns per player.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WindowConfig {
    window: usize,
}

impl Default for WindowConfig {
    fn default() -> Self {
        WindowConfig { window: 3 }
    }
}

impl WindowConfig {
    pub fn new(window: usize) -> Result<WindowConfig> {
        if window == 0 {
            return Err(Error::InvalidParam("window must be at least 1".into()));
        }
        Ok(WindowConfig { window })
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// Attribute names in schema order: oldest own gesture first, then the
    /// opponent's, then the class.
    pub fn attribute_names(&self) -> Vec<String> {
        let w = self.window;
        let own = (1..=w).rev().map(|k| format!("own_prev_{k}"));
        let opp = (1..=w).rev().map(|k| format!("opp_prev_{k}"));
        own.chain(opp).chain(std::iter::once(RPS_CLASS.to_string())).collect()
    }

    /// Schema position of `own_prev_k` (`own == true`) or `opp_prev_k`.
    pub fn slot_index(&self, own: bool, lag: usize) -> Option<usize> {
        if lag == 0 || lag > self.window {
            return None;
        }
        let base = if own { 0 } else { self.window };
        Some(base + self.window - lag)
    }
}

pub const RPS_CLASS: &str = "next";
pub const CT_CLASS: &str = "reply";
pub const CT_ACCEPT: &str = "accept";
pub const CT_REJECT: &str = "reject";

fn gesture_attribute(name: String) -> Result<Attribute> {
    Attribute::nominal(name, Gesture::ALL.iter().map(|g| g.token()))
}

/// One instance per turn `t >= w` of every episode, episodes in input
/// order and turns ascending.
pub fn featurize_rps(episodes: &[Episode], cfg: WindowConfig) -> Result<Dataset> {
    let w = cfg.window;
    let attributes = cfg
        .attribute_names()
        .into_iter()
        .map(gesture_attribute)
        .collect::<Result<Vec<_>>>()?;
    let class_index = attributes.len() - 1;
    let mut d = Dataset::new(format!("rps-w{w}"), attributes, class_index)?;

    for e in episodes {
        if e.len() <= w {
            return Err(Error::Episode {
                subject: e.subject_id.clone(),
                thread: e.thread_id.clone(),
                message: format!("{} turns is too short for window {w}", e.len()),
            });
        }
        e.validate()?;
        for t in w..e.len() {
            let mut row = Vec::with_capacity(2 * w + 1);
            row.extend((1..=w).rev().map(|k| Value::Nominal(e.turns[t - k].own.index())));
            row.extend((1..=w).rev().map(|k| Value::Nominal(e.turns[t - k].opp.index())));
            row.push(Value::Nominal(e.turns[t].own.index()));
            d.push(row)?;
        }
    }
    Ok(d)
}

/// Schema of featurized ultimatum data: two numeric deltas in dollars and
/// the nominal reply as class.
pub fn ct_schema() -> Result<Dataset> {
    let attributes = vec![
        Attribute::numeric("proposer_delta")?,
        Attribute::numeric("responder_delta")?,
        Attribute::nominal(CT_CLASS, [CT_ACCEPT, CT_REJECT])?,
    ];
    Dataset::new("ct-responder", attributes, 2)
}

pub fn featurize_ct(records: &[CtRecord]) -> Result<Dataset> {
    if records.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut d = ct_schema()?;
    for r in records {
        d.push(vec![
            Value::Numeric(r.proposer_delta.as_dollars()),
            Value::Numeric(r.responder_delta.as_dollars()),
            Value::Nominal(if r.accepted { 0 } else { 1 }),
        ])?;
    }
    Ok(d)
}

/// Number of distinct full tuples (window plus label) over an alphabet,
/// `alphabet^(2w+1)`. `None` on overflow.
pub fn pattern_space_size(cfg: WindowConfig, alphabet: u32) -> Option<u128> {
    let exponent = u32::try_from(2 * cfg.window + 1).ok()?;
    u128::from(alphabet).checked_pow(exponent)
}
