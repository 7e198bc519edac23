//! CSV play logs.
//!
//! RPS: `subject_id,thread_id,turn_index,own,opp` with gestures `R|P|S`.
//! CT:  `subject_id,proposer_delta,responder_delta,accepted` with amounts
//! carrying exactly two fraction digits and replies `true|false`.

use std::collections::HashMap;
use std::fmt::Write as _;

use csv::{ReaderBuilder, StringRecord, Trim};

use super::{Cents, CtRecord, DeltaBounds, Episode, Gesture, RpsTurn};
use crate::error::{Error, Result};

pub const RPS_HEADER: [&str; 5] = ["subject_id", "thread_id", "turn_index", "own", "opp"];
pub const CT_HEADER: [&str; 4] = ["subject_id", "proposer_delta", "responder_delta", "accepted"];

/// Reads all records, checking the header and the arity of every row.
/// Yields `(line, record)` pairs for the data rows.
fn read_rows(text: &str, header: &[&str]) -> Result<Vec<(u64, StringRecord)>> {
    let mut reader = ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    let mut seen_header = false;
    for result in reader.records() {
        let record = result.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            Error::parse(line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if !seen_header {
            let found: Vec<&str> = record.iter().collect();
            if found != header {
                return Err(Error::parse(
                    line,
                    format!("expected header {:?}, found {found:?}", header.join(",")),
                ));
            }
            seen_header = true;
            continue;
        }
        if record.len() != header.len() {
            return Err(Error::parse(
                line,
                format!("expected {} fields, found {}", header.len(), record.len()),
            ));
        }
        rows.push((line, record));
    }
    Ok(rows)
}

/// Parses an RPS log into episodes.
///
/// Episodes appear in order of their first row; turns within an episode
/// are sorted by `turn_index`, which must run from 0 without gaps or
/// duplicates.
pub fn parse_rps_log(text: &str) -> Result<Vec<Episode>> {
    let mut episodes: Vec<Episode> = Vec::new();
    let mut lookup: HashMap<(String, String), usize> = HashMap::new();
    // line of each turn, for duplicate diagnostics
    let mut seen: Vec<HashMap<usize, u64>> = Vec::new();

    for (line, rec) in read_rows(text, &RPS_HEADER)? {
        let subject = rec[0].to_string();
        let thread = rec[1].to_string();
        if subject.is_empty() || thread.is_empty() {
            return Err(Error::parse(line, "empty subject_id or thread_id"));
        }
        let turn_index: usize = rec[2]
            .parse()
            .map_err(|_| Error::parse(line, format!("invalid turn_index {:?}", &rec[2])))?;
        let own: Gesture = rec[3].parse().map_err(|e: String| Error::parse(line, e))?;
        let opp: Gesture = rec[4].parse().map_err(|e: String| Error::parse(line, e))?;

        let slot = *lookup.entry((subject.clone(), thread.clone())).or_insert_with(|| {
            episodes.push(Episode {
                subject_id: subject,
                thread_id: thread,
                turns: Vec::new(),
            });
            seen.push(HashMap::new());
            episodes.len() - 1
        });
        if let Some(first) = seen[slot].insert(turn_index, line) {
            return Err(Error::parse(
                line,
                format!("duplicate turn_index {turn_index} (first seen on line {first})"),
            ));
        }
        episodes[slot].turns.push(RpsTurn { turn_index, own, opp });
    }

    for episode in &mut episodes {
        episode.turns.sort_by_key(|t| t.turn_index);
        episode.validate()?;
    }
    Ok(episodes)
}

/// Parses a CT responder log without range checks on the amounts.
pub fn parse_ct_log(text: &str) -> Result<Vec<CtRecord>> {
    parse_ct_log_bounded(text, None)
}

/// Parses a CT responder log, rejecting responder deltas outside `bounds`.
pub fn parse_ct_log_bounded(text: &str, bounds: Option<DeltaBounds>) -> Result<Vec<CtRecord>> {
    let mut records = Vec::new();
    for (line, rec) in read_rows(text, &CT_HEADER)? {
        let subject_id = rec[0].to_string();
        if subject_id.is_empty() {
            return Err(Error::parse(line, "empty subject_id"));
        }
        let proposer_delta: Cents = rec[1].parse().map_err(|e: String| Error::parse(line, e))?;
        let responder_delta: Cents = rec[2].parse().map_err(|e: String| Error::parse(line, e))?;
        let accepted = match &rec[3] {
            "true" => true,
            "false" => false,
            other => {
                return Err(Error::parse(
                    line,
                    format!("invalid reply {other:?} (expected true or false)"),
                ))
            }
        };
        if let Some(b) = bounds {
            if !b.contains(responder_delta) {
                return Err(Error::parse(
                    line,
                    format!("responder_delta {responder_delta} outside [{}, {}]", b.min, b.max),
                ));
            }
        }
        records.push(CtRecord {
            subject_id,
            proposer_delta,
            responder_delta,
            accepted,
        });
    }
    Ok(records)
}

pub fn write_rps_log(episodes: &[Episode]) -> String {
    let mut out = RPS_HEADER.join(",");
    out.push('\n');
    for e in episodes {
        for t in &e.turns {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                e.subject_id, e.thread_id, t.turn_index, t.own, t.opp
            );
        }
    }
    out
}

pub fn write_ct_log(records: &[CtRecord]) -> String {
    let mut out = CT_HEADER.join(",");
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.subject_id, r.proposer_delta, r.responder_delta, r.accepted
        );
    }
    out
}
