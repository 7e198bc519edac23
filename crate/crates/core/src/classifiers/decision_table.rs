//! Decision tables over a searched attribute subset.
//!
//! The subset is chosen by best-first search starting from the empty set,
//! moving by single-attribute additions and removals, scored by the
//! leave-one-out accuracy of the induced table. Leave-one-out is exact and
//! computed from per-cell class counts: holding out an instance of class
//! `y` only decrements `y` in its own cell.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};

use super::{condition, ClassifierSpec, ModelState, TrainedModel};
use crate::error::{Error, Result};
use crate::gamedata::dataset::argmax_first;
use crate::gamedata::{Attribute, Dataset, Value};

/// Hashable identity of a value: nominal index or the bits of a number
/// (with -0 folded onto 0).
fn key_word(v: Value) -> u64 {
    match v {
        Value::Nominal(i) => i as u64,
        Value::Numeric(x) => (x + 0.0).to_bits(),
    }
}

fn cell_key(inst: &[Value], selected: &[usize]) -> Vec<u64> {
    selected.iter().map(|&a| key_word(inst[a])).collect()
}

fn cmp_values(a: &[Value], b: &[Value]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = match (x, y) {
            (Value::Nominal(i), Value::Nominal(j)) => i.cmp(j),
            (Value::Numeric(p), Value::Numeric(q)) => p.total_cmp(q),
            (Value::Nominal(_), Value::Numeric(_)) => Ordering::Less,
            (Value::Numeric(_), Value::Nominal(_)) => Ordering::Greater,
        };
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

#[derive(Clone, Debug)]
pub struct DecisionTableModel {
    selected: Vec<usize>,
    /// Cells sorted canonically by key values.
    cells: Vec<(Vec<Value>, usize)>,
    global_majority: usize,
    lookup: HashMap<Vec<u64>, usize>,
}

impl PartialEq for DecisionTableModel {
    fn eq(&self, other: &Self) -> bool {
        self.selected == other.selected && self.cells == other.cells && self.global_majority == other.global_majority
    }
}

impl DecisionTableModel {
    pub fn new(selected: Vec<usize>, mut cells: Vec<(Vec<Value>, usize)>, global_majority: usize) -> Self {
        cells.sort_by(|a, b| cmp_values(&a.0, &b.0));
        let lookup = cells
            .iter()
            .map(|(k, c)| (k.iter().map(|v| key_word(*v)).collect(), *c))
            .collect();
        DecisionTableModel {
            selected,
            cells,
            global_majority,
            lookup,
        }
    }

    pub fn selected(&self) -> &[usize] {
        &self.selected
    }

    pub fn cells(&self) -> &[(Vec<Value>, usize)] {
        &self.cells
    }

    pub fn global_majority(&self) -> usize {
        self.global_majority
    }

    pub fn predict(&self, inst: &[Value]) -> usize {
        self.lookup
            .get(&cell_key(inst, &self.selected))
            .copied()
            .unwrap_or(self.global_majority)
    }

    pub fn rule_text(&self, attributes: &[Attribute], class_index: usize) -> String {
        let class = &attributes[class_index];
        let then = |c: usize| condition(class, Value::Nominal(c));
        if self.selected.is_empty() {
            return format!("ALWAYS {}", then(self.global_majority));
        }
        let mut clauses: Vec<String> = self
            .cells
            .iter()
            .map(|(key, c)| {
                let conds: Vec<String> = self
                    .selected
                    .iter()
                    .zip(key)
                    .map(|(&a, v)| condition(&attributes[a], *v))
                    .collect();
                format!("IF {} THEN {}", conds.join(" AND "), then(*c))
            })
            .collect();
        clauses.push(format!("ELSE {}", then(self.global_majority)));
        clauses.join("; ")
    }
}

/// Per-cell class counts for the attribute subset `selected`.
fn cell_counts(d: &Dataset, selected: &[usize]) -> HashMap<Vec<u64>, Vec<usize>> {
    let k = d.num_classes();
    let mut cells: HashMap<Vec<u64>, Vec<usize>> = HashMap::new();
    for (row, class) in d.instances().iter().zip(d.classes()) {
        cells.entry(cell_key(row, selected)).or_insert_with(|| vec![0; k])[class] += 1;
    }
    cells
}

/// Number of instances classified correctly by the table on `selected`
/// when each instance is held out in turn.
pub(crate) fn loo_correct(d: &Dataset, selected: &[usize], class_counts: &[usize]) -> usize {
    // fallback when the held-out instance was alone in its cell
    let fallback: Vec<usize> = (0..class_counts.len())
        .map(|y| {
            let mut rest = class_counts.to_vec();
            rest[y] -= usize::from(rest[y] > 0);
            argmax_first(&rest)
        })
        .collect();
    let mut correct = 0;
    for counts in cell_counts(d, selected).values() {
        let total: usize = counts.iter().sum();
        for (y, &n_y) in counts.iter().enumerate() {
            if n_y == 0 {
                continue;
            }
            let predicted = if total == 1 {
                fallback[y]
            } else {
                let mut rest = counts.clone();
                rest[y] -= 1;
                argmax_first(&rest)
            };
            if predicted == y {
                correct += n_y;
            }
        }
    }
    correct
}

/// Best-first subset search. Returns the best subset found (attribute
/// indices ascending) and its leave-one-out correct count.
fn search(d: &Dataset, stale_limit: usize) -> (Vec<usize>, usize) {
    let class_counts = d.class_counts();
    let candidates: Vec<usize> = d.input_indices().collect();
    let score = |s: &[usize]| loo_correct(d, s, &class_counts);

    let start: Vec<usize> = Vec::new();
    let start_score = score(&start);
    let mut best = (start.clone(), start_score);
    let mut visited: HashSet<Vec<usize>> = HashSet::from([start.clone()]);
    // (score, insertion order, subset)
    let mut open: Vec<(usize, usize, Vec<usize>)> = vec![(start_score, 0, start)];
    let mut inserted = 1;
    let mut stale = 0;

    while !open.is_empty() {
        let pick = (0..open.len())
            .max_by(|&i, &j| open[i].0.cmp(&open[j].0).then(open[j].1.cmp(&open[i].1)))
            .expect("open is non-empty");
        let (_, _, node) = open.swap_remove(pick);

        let mut improved = false;
        for &a in &candidates {
            let mut child = node.clone();
            match child.binary_search(&a) {
                Ok(pos) => {
                    child.remove(pos);
                }
                Err(pos) => child.insert(pos, a),
            }
            if !visited.insert(child.clone()) {
                continue;
            }
            let s = score(&child);
            if s > best.1 {
                best = (child.clone(), s);
                improved = true;
            }
            open.push((s, inserted, child));
            inserted += 1;
        }
        if improved {
            stale = 0;
        } else {
            stale += 1;
            if stale >= stale_limit {
                break;
            }
        }
    }
    best
}

pub fn fit_decision_table(d: &Dataset, stale_limit: usize) -> Result<TrainedModel> {
    if d.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if stale_limit == 0 {
        return Err(Error::InvalidParam("stale_limit must be positive".into()));
    }
    let (selected, _) = search(d, stale_limit);
    let global_majority = argmax_first(&d.class_counts());

    let mut first_seen: HashMap<Vec<u64>, usize> = HashMap::new();
    for (i, row) in d.instances().iter().enumerate() {
        first_seen.entry(cell_key(row, &selected)).or_insert(i);
    }
    let cells = cell_counts(d, &selected)
        .into_iter()
        .map(|(key, counts)| {
            let row = &d.instances()[first_seen[&key]];
            (selected.iter().map(|&a| row[a]).collect(), argmax_first(&counts))
        })
        .collect();
    let model = DecisionTableModel::new(selected, cells, global_majority);
    Ok(TrainedModel::new(
        ClassifierSpec::DecisionTable { stale_limit },
        d,
        ModelState::DecisionTable(model),
    ))
}
