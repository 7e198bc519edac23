//! ARFF subset: `@relation`, nominal and numeric `@attribute`s, dense
//! `@data` rows.
//!
//! The writer adds two comment lines: the toolkit version and
//! `% class: <name>`. The reader honours the class comment and otherwise
//! takes the last attribute as the class.

use std::fmt::Write as _;

use super::dataset::{Attribute, Dataset};
use crate::error::{Error, Result};

const CLASS_COMMENT: &str = "% class:";

pub fn write_arff(d: &Dataset) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "% stratmine {}", crate::VERSION);
    let _ = writeln!(out, "{CLASS_COMMENT} {}", d.class_attribute().name());
    let _ = writeln!(out, "@relation {}", d.relation());
    out.push('\n');
    for a in d.attributes() {
        if a.is_numeric() {
            let _ = writeln!(out, "@attribute {} numeric", a.name());
        } else {
            let _ = writeln!(out, "@attribute {} {{{}}}", a.name(), a.values().join(","));
        }
    }
    out.push('\n');
    out.push_str("@data\n");
    for row in d.instances() {
        let cells: Vec<String> = row.iter().zip(d.attributes()).map(|(v, a)| a.render(*v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn unquote(s: &str) -> &str {
    let s = s.trim();
    for q in ['\'', '"'] {
        if s.len() >= 2 && s.starts_with(q) && s.ends_with(q) {
            return &s[1..s.len() - 1];
        }
    }
    s
}

/// Splits `@keyword rest`, returning the lower-cased keyword and the rest.
fn keyword(line: &str) -> (String, &str) {
    let (kw, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
    (kw.to_ascii_lowercase(), rest.trim())
}

/// Splits an attribute declaration into its (possibly quoted) name and
/// type text.
fn split_name(rest: &str) -> Option<(&str, &str)> {
    let first = rest.chars().next()?;
    if first == '\'' || first == '"' {
        let end = rest[1..].find(first)? + 1;
        Some((&rest[1..end], rest[end + 1..].trim()))
    } else {
        let (name, ty) = rest.split_once(char::is_whitespace)?;
        Some((name, ty.trim()))
    }
}

fn parse_attribute(line_no: u64, rest: &str) -> Result<Attribute> {
    let (name, ty) = split_name(rest).ok_or_else(|| Error::parse(line_no, "malformed @attribute line"))?;
    let map = |e: Error| match e {
        Error::InvalidDataset(m) => Error::parse(line_no, m),
        other => other,
    };
    if let Some(body) = ty.strip_prefix('{') {
        let body = body
            .strip_suffix('}')
            .ok_or_else(|| Error::parse(line_no, "unterminated nominal value list"))?;
        let values: Vec<&str> = body.split(',').map(unquote).collect();
        return Attribute::nominal(name, values).map_err(map);
    }
    match ty.to_ascii_lowercase().as_str() {
        "numeric" | "real" | "integer" => Attribute::numeric(name).map_err(map),
        other => Err(Error::Unsupported {
            line: line_no,
            feature: format!("attribute type {other:?}"),
        }),
    }
}

pub fn read_arff(text: &str) -> Result<Dataset> {
    let mut relation: Option<String> = None;
    let mut class_name: Option<String> = None;
    let mut attributes: Vec<Attribute> = Vec::new();
    let mut dataset: Option<Dataset> = None;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i as u64 + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix(CLASS_COMMENT) {
            if dataset.is_none() {
                class_name = Some(rest.trim().to_string());
            }
            continue;
        }
        if line.starts_with('%') {
            continue;
        }

        if let Some(d) = dataset.as_mut() {
            if line.starts_with('{') {
                return Err(Error::Unsupported {
                    line: line_no,
                    feature: "sparse data row".into(),
                });
            }
            let cells: Vec<&str> = line.split(',').map(unquote).collect();
            if cells.len() != d.attributes().len() {
                return Err(Error::parse(
                    line_no,
                    format!("expected {} values, found {}", d.attributes().len(), cells.len()),
                ));
            }
            let mut row = Vec::with_capacity(cells.len());
            for (cell, attr) in cells.iter().zip(d.attributes()) {
                if *cell == "?" {
                    return Err(Error::Unsupported {
                        line: line_no,
                        feature: "missing value '?'".into(),
                    });
                }
                if cell.starts_with('{') {
                    return Err(Error::Unsupported {
                        line: line_no,
                        feature: "instance weight".into(),
                    });
                }
                row.push(attr.parse_value(cell).map_err(|m| Error::parse(line_no, m))?);
            }
            d.push(row).map_err(|e| Error::parse(line_no, e.to_string()))?;
            continue;
        }

        if !line.starts_with('@') {
            return Err(Error::parse(line_no, format!("unexpected line {line:?} in header")));
        }
        let (kw, rest) = keyword(line);
        match kw.as_str() {
            "@relation" => {
                if rest.is_empty() {
                    return Err(Error::parse(line_no, "@relation without a name"));
                }
                relation = Some(unquote(rest).to_string());
            }
            "@attribute" => attributes.push(parse_attribute(line_no, rest)?),
            "@data" => {
                let relation = relation
                    .take()
                    .ok_or_else(|| Error::parse(line_no, "@data before @relation"))?;
                if attributes.is_empty() {
                    return Err(Error::parse(line_no, "no attributes declared"));
                }
                let class_index = match &class_name {
                    Some(name) => attributes
                        .iter()
                        .position(|a| a.name() == name)
                        .ok_or_else(|| Error::parse(line_no, format!("class attribute {name} not declared")))?,
                    None => attributes.len() - 1,
                };
                let attrs = std::mem::take(&mut attributes);
                dataset =
                    Some(Dataset::new(relation, attrs, class_index).map_err(|e| Error::parse(line_no, e.to_string()))?);
            }
            other => {
                return Err(Error::Unsupported {
                    line: line_no,
                    feature: format!("declaration {other}"),
                })
            }
        }
    }

    dataset.ok_or_else(|| Error::parse(text.lines().count() as u64, "missing @data section"))
}
