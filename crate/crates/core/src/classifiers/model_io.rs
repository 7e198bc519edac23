//! Plain-text model files.
//!
//! ```text
//! stratmine-model 1
//! toolkit 0.1.0
//! spec {"id":"one_r","min_bucket":6}
//! relation rps-w3
//! class 6
//! attribute own_prev_3 nominal R P S
//! attribute proposer_delta numeric
//! [one_r]
//! ...state lines...
//! end
//! ```
//!
//! Numbers are written in Rust's shortest round-trip form, so reading a
//! written model reproduces it exactly.

use std::fmt::Write as _;

use super::decision_table::DecisionTableModel;
use super::one_r::{OneRModel, OneRRule};
use super::smo::Kernel;
use super::svm::{BinaryMachine, Encoder, Encoding, MachineKind, SvmModel};
use super::{ClassifierSpec, ModelState, TrainedModel};
use crate::error::{Error, Result};
use crate::gamedata::{Attribute, AttributeKind, Value};

const MAGIC: &str = "stratmine-model 1";

fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn write_model(m: &TrainedModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(out, "toolkit {}", crate::VERSION);
    let spec = serde_json::to_string(m.spec()).expect("spec serializes");
    let _ = writeln!(out, "spec {spec}");
    let _ = writeln!(out, "relation {}", m.relation());
    let _ = writeln!(out, "class {}", m.class_index());
    for a in m.attributes() {
        match a.kind() {
            AttributeKind::Numeric => {
                let _ = writeln!(out, "attribute {} numeric", a.name());
            }
            AttributeKind::Nominal(values) => {
                let _ = writeln!(out, "attribute {} nominal {}", a.name(), values.join(" "));
            }
        }
    }
    match m.state() {
        ModelState::ZeroR { class } => {
            let _ = writeln!(out, "[zero_r]\nclass {class}");
        }
        ModelState::UniformRandom { seed, num_classes } => {
            let _ = writeln!(out, "[uniform_random]\nseed {seed}\nclasses {num_classes}");
        }
        ModelState::EquilibriumResponder {
            responder,
            accept,
            reject,
        } => {
            let _ = writeln!(
                out,
                "[equilibrium_responder]\nresponder {responder}\naccept {accept}\nreject {reject}"
            );
        }
        ModelState::FixedRule(_) => {
            let _ = writeln!(out, "[fixed_rule]");
        }
        ModelState::OneR(r) => {
            let _ = writeln!(out, "[one_r]\nattribute {}\ndefault {}", r.attribute, r.default_class);
            match &r.rule {
                OneRRule::Nominal { value_map } => {
                    let cells: Vec<String> = value_map
                        .iter()
                        .map(|c| c.map_or_else(|| "-".to_string(), |c| c.to_string()))
                        .collect();
                    let _ = writeln!(out, "map {}", cells.join(" "));
                }
                OneRRule::Numeric { cuts, classes } => {
                    let cuts: Vec<String> = cuts.iter().map(|&c| num(c)).collect();
                    let classes: Vec<String> = classes.iter().map(usize::to_string).collect();
                    let _ = writeln!(out, "cuts {}", cuts.join(" "));
                    let _ = writeln!(out, "bins {}", classes.join(" "));
                }
            }
        }
        ModelState::DecisionTable(t) => {
            let selected: Vec<String> = t.selected().iter().map(usize::to_string).collect();
            let _ = writeln!(
                out,
                "[decision_table]\nselected {}\ndefault {}",
                selected.join(" "),
                t.global_majority()
            );
            for (key, class) in t.cells() {
                let mut line = format!("cell {class}");
                for v in key {
                    match v {
                        Value::Nominal(i) => {
                            let _ = write!(line, " {i}");
                        }
                        Value::Numeric(x) => {
                            let _ = write!(line, " {}", num(*x));
                        }
                    }
                }
                let _ = writeln!(out, "{line}");
            }
        }
        ModelState::Svm(s) => {
            let _ = writeln!(out, "[smo]\nclasses {}", s.num_classes);
            match s.kernel {
                Kernel::Linear => {
                    let _ = writeln!(out, "kernel linear");
                }
                Kernel::Polynomial { degree } => {
                    let _ = writeln!(out, "kernel polynomial {degree}");
                }
            }
            for col in &s.encoder.columns {
                match col {
                    Encoding::OneHot { attribute, width } => {
                        let _ = writeln!(out, "onehot {attribute} {width}");
                    }
                    Encoding::Scaled { attribute, min, max } => {
                        let _ = writeln!(out, "scaled {attribute} {} {}", num(*min), num(*max));
                    }
                }
            }
            for mach in &s.machines {
                let head = format!("machine {} {}", mach.negative, mach.positive);
                match &mach.kind {
                    MachineKind::Empty => {
                        let _ = writeln!(out, "{head} empty");
                    }
                    MachineKind::Constant(c) => {
                        let _ = writeln!(out, "{head} constant {c}");
                    }
                    MachineKind::Trained { bias, support, .. } => {
                        let _ = writeln!(out, "{head} trained {} {}", num(*bias), support.len());
                        for (coef, x) in support {
                            let xs: Vec<String> = x.iter().map(|&v| num(v)).collect();
                            let _ = writeln!(out, "sv {} {}", num(*coef), xs.join(" "));
                        }
                    }
                }
            }
        }
    }
    out.push_str("end\n");
    out
}

struct Lines<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn err(&self, message: impl Into<String>) -> Error {
        let line = self.lines.get(self.pos.saturating_sub(1)).map_or(0, |l| l.0);
        Error::ModelFormat {
            line,
            message: message.into(),
        }
    }

    fn next(&mut self) -> Result<&'a str> {
        let line = self.lines.get(self.pos).map(|l| l.1);
        self.pos += 1;
        line.ok_or_else(|| self.err("unexpected end of file"))
    }

    fn peek(&self) -> Option<&'a str> {
        self.lines.get(self.pos).map(|l| l.1)
    }

    /// Next line, which must start with `key`; returns the remainder.
    fn field(&mut self, key: &str) -> Result<&'a str> {
        let line = self.next()?;
        match line.split_once(' ') {
            Some((k, rest)) if k == key => Ok(rest),
            None if line == key => Ok(""),
            _ => Err(self.err(format!("expected {key:?}, found {line:?}"))),
        }
    }

    fn parse<T: std::str::FromStr>(&self, s: &str) -> Result<T> {
        s.parse().map_err(|_| self.err(format!("invalid number {s:?}")))
    }

    fn usize_field(&mut self, key: &str) -> Result<usize> {
        let rest = self.field(key)?;
        self.parse(rest)
    }

    fn list<T: std::str::FromStr>(&self, s: &str) -> Result<Vec<T>> {
        s.split_whitespace().map(|t| self.parse(t)).collect()
    }
}

pub fn read_model(text: &str) -> Result<TrainedModel> {
    let mut l = Lines {
        lines: text
            .lines()
            .enumerate()
            .map(|(i, s)| (i + 1, s.trim()))
            .filter(|(_, s)| !s.is_empty())
            .collect(),
        pos: 0,
    };
    if l.next()? != MAGIC {
        return Err(l.err(format!("not a model file (expected {MAGIC:?})")));
    }
    l.field("toolkit")?;
    let spec_json = l.field("spec")?;
    let spec: ClassifierSpec = serde_json::from_str(spec_json).map_err(|e| l.err(format!("invalid spec: {e}")))?;
    let relation = l.field("relation")?.to_string();
    let class_index = l.usize_field("class")?;

    let mut attributes = Vec::new();
    while l.peek().is_some_and(|s| s.starts_with("attribute ")) {
        let rest = l.field("attribute")?;
        let mut parts = rest.split_whitespace();
        let name = parts.next().ok_or_else(|| l.err("attribute without name"))?;
        let attr = match parts.next() {
            Some("numeric") => Attribute::numeric(name),
            Some("nominal") => Attribute::nominal(name, parts),
            _ => return Err(l.err("attribute kind must be numeric or nominal")),
        }
        .map_err(|e| l.err(e.to_string()))?;
        attributes.push(attr);
    }
    if class_index >= attributes.len() {
        return Err(l.err("class index out of range"));
    }
    let check_class = |l: &Lines, c: usize| -> Result<usize> {
        if c < attributes[class_index].values().len() {
            Ok(c)
        } else {
            Err(l.err(format!("class {c} out of range")))
        }
    };
    let check_attr = |l: &Lines, a: usize| -> Result<usize> {
        if a < attributes.len() && a != class_index {
            Ok(a)
        } else {
            Err(l.err(format!("attribute {a} out of range")))
        }
    };

    let section = l.next()?;
    let state = match section {
        "[zero_r]" => {
            let c = l.usize_field("class")?;
            ModelState::ZeroR {
                class: check_class(&l, c)?,
            }
        }
        "[uniform_random]" => {
            let seed = l.field("seed")?;
            let seed = l.parse(seed)?;
            let num_classes = l.usize_field("classes")?;
            ModelState::UniformRandom { seed, num_classes }
        }
        "[equilibrium_responder]" => {
            let responder = l.usize_field("responder")?;
            let accept = l.usize_field("accept")?;
            let reject = l.usize_field("reject")?;
            ModelState::EquilibriumResponder {
                responder: check_attr(&l, responder)?,
                accept: check_class(&l, accept)?,
                reject: check_class(&l, reject)?,
            }
        }
        "[fixed_rule]" => match &spec {
            ClassifierSpec::FixedRule(rule) => {
                ModelState::FixedRule(super::fixed::resolve(rule, &attributes, class_index)?)
            }
            _ => return Err(l.err("fixed_rule section needs a fixed_rule spec")),
        },
        "[one_r]" => {
            let attribute = l.usize_field("attribute")?;
            let attribute = check_attr(&l, attribute)?;
            let default_class = l.usize_field("default")?;
            let default_class = check_class(&l, default_class)?;
            let rule = if attributes[attribute].is_numeric() {
                let cuts = l.field("cuts")?;
                let cuts: Vec<f64> = l.list(cuts)?;
                let bins = l.field("bins")?;
                let classes: Vec<usize> = l.list(bins)?;
                if classes.len() != cuts.len() + 1 || !cuts.windows(2).all(|w| w[0] < w[1]) {
                    return Err(l.err("cuts must increase and number one less than bins"));
                }
                for &c in &classes {
                    check_class(&l, c)?;
                }
                OneRRule::Numeric { cuts, classes }
            } else {
                let map = l.field("map")?;
                let mut value_map = Vec::new();
                for tok in map.split_whitespace() {
                    value_map.push(if tok == "-" {
                        None
                    } else {
                        let c = l.parse(tok)?;
                        Some(check_class(&l, c)?)
                    });
                }
                if value_map.len() != attributes[attribute].values().len() {
                    return Err(l.err("map length differs from the attribute's value count"));
                }
                OneRRule::Nominal { value_map }
            };
            ModelState::OneR(OneRModel {
                attribute,
                rule,
                default_class,
            })
        }
        "[decision_table]" => {
            let selected = l.field("selected")?;
            let selected: Vec<usize> = l.list(selected)?;
            for &a in &selected {
                check_attr(&l, a)?;
            }
            let default = l.usize_field("default")?;
            let default = check_class(&l, default)?;
            let mut cells = Vec::new();
            while l.peek().is_some_and(|s| s.starts_with("cell")) {
                let rest = l.field("cell")?;
                let mut toks = rest.split_whitespace();
                let class = l.parse(toks.next().unwrap_or(""))?;
                let class = check_class(&l, class)?;
                let toks: Vec<&str> = toks.collect();
                if toks.len() != selected.len() {
                    return Err(l.err("cell key length differs from the selected attributes"));
                }
                let mut key = Vec::new();
                for (&a, tok) in selected.iter().zip(toks) {
                    key.push(if attributes[a].is_numeric() {
                        Value::Numeric(l.parse(tok)?)
                    } else {
                        Value::Nominal(l.parse(tok)?)
                    });
                }
                cells.push((key, class));
            }
            ModelState::DecisionTable(DecisionTableModel::new(selected, cells, default))
        }
        "[smo]" => {
            let num_classes = l.usize_field("classes")?;
            let kernel_line = l.field("kernel")?;
            let kernel = match kernel_line.split_whitespace().collect::<Vec<_>>().as_slice() {
                ["linear"] => Kernel::Linear,
                ["polynomial", d] => Kernel::Polynomial { degree: l.parse(d)? },
                _ => return Err(l.err(format!("unknown kernel {kernel_line:?}"))),
            };
            let mut columns = Vec::new();
            loop {
                match l.peek().and_then(|s| s.split_whitespace().next()) {
                    Some("onehot") => {
                        let rest = l.field("onehot")?;
                        let v: Vec<usize> = l.list(rest)?;
                        let [attribute, width] = v[..] else {
                            return Err(l.err("onehot takes two numbers"));
                        };
                        columns.push(Encoding::OneHot {
                            attribute: check_attr(&l, attribute)?,
                            width,
                        });
                    }
                    Some("scaled") => {
                        let rest = l.field("scaled")?;
                        let toks: Vec<&str> = rest.split_whitespace().collect();
                        let [a, lo, hi] = toks[..] else {
                            return Err(l.err("scaled takes three numbers"));
                        };
                        let a = l.parse(a)?;
                        columns.push(Encoding::Scaled {
                            attribute: check_attr(&l, a)?,
                            min: l.parse(lo)?,
                            max: l.parse(hi)?,
                        });
                    }
                    _ => break,
                }
            }
            let encoder = Encoder { columns };
            let mut machines = Vec::new();
            while l.peek().is_some_and(|s| s.starts_with("machine ")) {
                let rest = l.field("machine")?;
                let toks: Vec<&str> = rest.split_whitespace().collect();
                if toks.len() < 3 {
                    return Err(l.err("machine line too short"));
                }
                let negative = check_class(&l, l.parse(toks[0])?)?;
                let positive = check_class(&l, l.parse(toks[1])?)?;
                let kind = match (toks[2], &toks[3..]) {
                    ("empty", []) => MachineKind::Empty,
                    ("constant", [c]) => MachineKind::Constant(check_class(&l, l.parse(c)?)?),
                    ("trained", [bias, count]) => {
                        let bias: f64 = l.parse(bias)?;
                        let count: usize = l.parse(count)?;
                        let mut support = Vec::with_capacity(count);
                        for _ in 0..count {
                            let rest = l.field("sv")?;
                            let v: Vec<f64> = l.list(rest)?;
                            let (coef, x) = v.split_first().ok_or_else(|| l.err("empty support vector"))?;
                            support.push((*coef, x.to_vec()));
                        }
                        let dim = support.first().map_or(0, |s: &(f64, Vec<f64>)| s.1.len());
                        MachineKind::trained(kernel, bias, support, dim)
                    }
                    _ => return Err(l.err(format!("invalid machine line {rest:?}"))),
                };
                machines.push(BinaryMachine {
                    negative,
                    positive,
                    kind,
                });
            }
            ModelState::Svm(SvmModel {
                encoder,
                kernel,
                num_classes,
                machines,
            })
        }
        other => return Err(l.err(format!("unknown model section {other:?}"))),
    };
    if l.next()? != "end" {
        return Err(l.err("expected end"));
    }

    let kind_matches = matches!(
        (&spec, &state),
        (ClassifierSpec::ZeroR, ModelState::ZeroR { .. })
            | (ClassifierSpec::UniformRandom { .. }, ModelState::UniformRandom { .. })
            | (ClassifierSpec::OneR { .. }, ModelState::OneR(_))
            | (ClassifierSpec::DecisionTable { .. }, ModelState::DecisionTable(_))
            | (ClassifierSpec::Smo(_), ModelState::Svm(_))
            | (
                ClassifierSpec::EquilibriumResponder,
                ModelState::EquilibriumResponder { .. }
            )
            | (ClassifierSpec::FixedRule(_), ModelState::FixedRule(_))
    );
    if !kind_matches {
        return Err(l.err(format!("spec {} does not match model section {section}", spec.id())));
    }
    Ok(TrainedModel {
        spec,
        relation,
        attributes,
        class_index,
        state,
    })
}
