use std::fmt;

use crate::error::{Error, Result};

/// Kind of an attribute. Booleans are nominal attributes with two values.
#[derive(Clone, Debug, PartialEq)]
pub enum AttributeKind {
    Nominal(Vec<String>),
    Numeric,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Attribute {
    name: String,
    kind: AttributeKind,
}

/// Names and nominal labels are bare tokens so that every interchange
/// format can carry them unquoted.
pub(crate) fn check_token(what: &str, s: &str) -> Result<()> {
    let bad = s.is_empty()
        || s.chars()
            .any(|c| c.is_whitespace() || matches!(c, ',' | '{' | '}' | '\'' | '"' | '%' | '?'));
    if bad {
        return Err(Error::InvalidDataset(format!("{what} {s:?} is not a plain token")));
    }
    Ok(())
}

impl Attribute {
    pub fn nominal<S: Into<String>>(name: impl Into<String>, values: impl IntoIterator<Item = S>) -> Result<Attribute> {
        let name = name.into();
        check_token("attribute name", &name)?;
        let values: Vec<String> = values.into_iter().map(Into::into).collect();
        if values.is_empty() {
            return Err(Error::InvalidDataset(format!("nominal attribute {name} has no values")));
        }
        for (i, v) in values.iter().enumerate() {
            check_token("nominal value", v)?;
            if values[..i].contains(v) {
                return Err(Error::InvalidDataset(format!(
                    "nominal attribute {name} repeats value {v}"
                )));
            }
        }
        Ok(Attribute {
            name,
            kind: AttributeKind::Nominal(values),
        })
    }

    pub fn numeric(name: impl Into<String>) -> Result<Attribute> {
        let name = name.into();
        check_token("attribute name", &name)?;
        Ok(Attribute {
            name,
            kind: AttributeKind::Numeric,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &AttributeKind {
        &self.kind
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self.kind, AttributeKind::Numeric)
    }

    /// Declared labels, empty for numeric attributes.
    pub fn values(&self) -> &[String] {
        match &self.kind {
            AttributeKind::Nominal(v) => v,
            AttributeKind::Numeric => &[],
        }
    }

    pub fn value_index(&self, label: &str) -> Option<usize> {
        self.values().iter().position(|v| v == label)
    }

    /// Renders a value of this attribute the way ARFF and rule text show it.
    pub fn render(&self, value: Value) -> String {
        match (value, &self.kind) {
            (Value::Nominal(i), AttributeKind::Nominal(labels)) => {
                labels.get(i).cloned().unwrap_or_else(|| format!("#{i}"))
            }
            (Value::Numeric(x), _) => format!("{x}"),
            (Value::Nominal(i), AttributeKind::Numeric) => format!("#{i}"),
        }
    }

    /// Parses a textual value (nominal label or decimal number).
    pub fn parse_value(&self, text: &str) -> std::result::Result<Value, String> {
        match &self.kind {
            AttributeKind::Nominal(labels) => labels
                .iter()
                .position(|l| l == text)
                .map(Value::Nominal)
                .ok_or_else(|| format!("value {text:?} not declared for attribute {}", self.name)),
            AttributeKind::Numeric => match text.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(Value::Numeric(x)),
                _ => Err(format!(
                    "value {text:?} of attribute {} is not a finite number",
                    self.name
                )),
            },
        }
    }

    pub(crate) fn accepts(&self, value: &Value) -> bool {
        match (value, &self.kind) {
            (Value::Nominal(i), AttributeKind::Nominal(labels)) => *i < labels.len(),
            (Value::Numeric(x), AttributeKind::Numeric) => x.is_finite(),
            _ => false,
        }
    }
}

/// A cell of an instance: a nominal index into the declared labels, or a
/// finite number.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Value {
    Nominal(usize),
    Numeric(f64),
}

impl Value {
    pub fn nominal(self) -> Option<usize> {
        match self {
            Value::Nominal(i) => Some(i),
            Value::Numeric(_) => None,
        }
    }

    pub fn numeric(self) -> Option<f64> {
        match self {
            Value::Numeric(x) => Some(x),
            Value::Nominal(_) => None,
        }
    }
}

pub type Instance = Vec<Value>;

/// Ordered instances over a fixed schema with a nominal class attribute.
///
/// Instance order is significant: cross-validation folds are contiguous
/// runs of it, and no operation in the toolkit reorders it.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    relation: String,
    attributes: Vec<Attribute>,
    class_index: usize,
    instances: Vec<Instance>,
}

impl Dataset {
    pub fn new(relation: impl Into<String>, attributes: Vec<Attribute>, class_index: usize) -> Result<Dataset> {
        let relation = relation.into();
        check_token("relation name", &relation)?;
        let class = attributes
            .get(class_index)
            .ok_or_else(|| Error::InvalidDataset(format!("class index {class_index} out of range")))?;
        if class.is_numeric() {
            return Err(Error::InvalidDataset(format!(
                "class attribute {} must be nominal",
                class.name()
            )));
        }
        for (i, a) in attributes.iter().enumerate() {
            if attributes[..i].iter().any(|b| b.name() == a.name()) {
                return Err(Error::InvalidDataset(format!("duplicate attribute name {}", a.name())));
            }
        }
        Ok(Dataset {
            relation,
            attributes,
            class_index,
            instances: Vec::new(),
        })
    }

    /// Same schema, no instances.
    pub fn empty_like(&self) -> Dataset {
        Dataset {
            relation: self.relation.clone(),
            attributes: self.attributes.clone(),
            class_index: self.class_index,
            instances: Vec::new(),
        }
    }

    pub fn push(&mut self, instance: Instance) -> Result<()> {
        self.check_instance(&instance)?;
        self.instances.push(instance);
        Ok(())
    }

    /// Checks that `instance` conforms positionally to the schema.
    pub fn check_instance(&self, instance: &[Value]) -> Result<()> {
        if instance.len() != self.attributes.len() {
            return Err(Error::SchemaMismatch(format!(
                "instance has {} values, schema has {} attributes",
                instance.len(),
                self.attributes.len()
            )));
        }
        for (v, a) in instance.iter().zip(&self.attributes) {
            if !a.accepts(v) {
                return Err(Error::SchemaMismatch(format!(
                    "value {v:?} does not fit attribute {}",
                    a.name()
                )));
            }
        }
        Ok(())
    }

    pub fn relation(&self) -> &str {
        &self.relation
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn class_index(&self) -> usize {
        self.class_index
    }

    pub fn class_attribute(&self) -> &Attribute {
        &self.attributes[self.class_index]
    }

    pub fn num_classes(&self) -> usize {
        self.class_attribute().values().len()
    }

    /// Indices of all attributes except the class.
    pub fn input_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.attributes.len()).filter(move |&i| i != self.class_index)
    }

    pub fn instances(&self) -> &[Instance] {
        &self.instances
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    /// Class label index of instance `i`.
    pub fn class_of(&self, i: usize) -> usize {
        match self.instances[i][self.class_index] {
            Value::Nominal(c) => c,
            Value::Numeric(_) => unreachable!("class attribute is nominal"),
        }
    }

    pub fn classes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).map(move |i| self.class_of(i))
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_classes()];
        for c in self.classes() {
            counts[c] += 1;
        }
        counts
    }

    /// Instances at `indices`, in the order given.
    pub fn subset(&self, indices: impl IntoIterator<Item = usize>) -> Dataset {
        let mut out = self.empty_like();
        out.instances = indices.into_iter().map(|i| self.instances[i].clone()).collect();
        out
    }

    /// True when `other` has the same attributes and class attribute.
    pub fn same_schema(&self, other: &[Attribute], class_index: usize) -> bool {
        self.attributes == other && self.class_index == class_index
    }
}

impl fmt::Display for Dataset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} instances, {} attributes (class {})",
            self.relation,
            self.len(),
            self.attributes.len(),
            self.class_attribute().name()
        )
    }
}

/// Index of the largest count; ties go to the lowest index.
pub(crate) fn argmax_first(counts: &[usize]) -> usize {
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = i;
        }
    }
    best
}
