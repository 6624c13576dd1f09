//! JSON encoding of domains, classes and models.
//!
//! Classes use `{"domain": {"size": n}, "members": [[label, ...], ...]}` with
//! labels written as numbers or the string `"*"`.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::domain::{
    BinClass, BinHypothesis, BinLabel, BinModel, Class, Domain, Labeling, RealClass,
    RealHypothesis, RealLabel, RealModel,
};
use crate::error::{invalid, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
}

impl DomainSpec {
    pub fn of(d: &Domain) -> Self {
        DomainSpec {
            size: d.size(),
            names: d.names().map(|n| n.to_vec()),
        }
    }

    pub fn to_domain(&self) -> Result<Domain> {
        match &self.names {
            Some(names) => {
                if names.len() != self.size {
                    return invalid("domain names must match the domain size");
                }
                Domain::with_names(names.clone())
            }
            None => Domain::new(self.size),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassFile {
    pub domain: DomainSpec,
    pub members: Vec<Vec<Value>>,
}

fn real_label(v: &Value) -> Result<RealLabel> {
    match v {
        Value::String(s) if s == "*" => Ok(RealLabel::Star),
        Value::Number(n) => match n.as_f64() {
            Some(u) => Ok(RealLabel::Val(u)),
            None => invalid(format!("label {n} is not representable")),
        },
        other => invalid(format!("label {other} must be a number or \"*\"")),
    }
}

fn bin_label(v: &Value) -> Result<BinLabel> {
    match real_label(v)? {
        RealLabel::Star => Ok(BinLabel::Star),
        RealLabel::Val(u) if u == 1.0 => Ok(BinLabel::Plus),
        RealLabel::Val(u) if u == -1.0 => Ok(BinLabel::Minus),
        RealLabel::Val(u) => invalid(format!("binary label {u} must be 1, -1 or \"*\"")),
    }
}

fn real_json(l: RealLabel) -> Value {
    match l {
        RealLabel::Val(u) => json!(u),
        RealLabel::Star => json!("*"),
    }
}

fn bin_json(l: BinLabel) -> Value {
    match l.value() {
        Some(v) => json!(v),
        None => json!("*"),
    }
}

pub fn bin_class_from_file(f: &ClassFile) -> Result<BinClass> {
    let domain = f.domain.to_domain()?;
    let mut members = Vec::with_capacity(f.members.len());
    for row in &f.members {
        let labels: Result<Vec<BinLabel>> = row.iter().map(bin_label).collect();
        members.push(BinHypothesis::from_labels(&labels?));
    }
    Class::new(domain, members)
}

pub fn real_class_from_file(f: &ClassFile) -> Result<RealClass> {
    let domain = f.domain.to_domain()?;
    let mut members = Vec::with_capacity(f.members.len());
    for row in &f.members {
        let labels: Result<Vec<RealLabel>> = row.iter().map(real_label).collect();
        members.push(RealHypothesis::new(labels?)?);
    }
    Class::new(domain, members)
}

pub fn parse_bin_class(text: &str) -> Result<BinClass> {
    bin_class_from_file(&serde_json::from_str(text)?)
}

pub fn parse_real_class(text: &str) -> Result<RealClass> {
    real_class_from_file(&serde_json::from_str(text)?)
}

pub fn bin_class_file(c: &BinClass) -> ClassFile {
    ClassFile {
        domain: DomainSpec::of(c.domain()),
        members: c
            .iter()
            .map(|h| h.labels().into_iter().map(bin_json).collect())
            .collect(),
    }
}

pub fn real_class_file(c: &RealClass) -> ClassFile {
    ClassFile {
        domain: DomainSpec::of(c.domain()),
        members: c
            .iter()
            .map(|h| h.labels().iter().map(|&l| real_json(l)).collect())
            .collect(),
    }
}

pub fn bin_class_to_string(c: &BinClass) -> String {
    serde_json::to_string(&bin_class_file(c)).expect("class serializes")
}

pub fn real_class_to_string(c: &RealClass) -> String {
    serde_json::to_string(&real_class_file(c)).expect("class serializes")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Binary,
    Real,
}

/// Model JSON: total values plus free-form provenance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub domain: DomainSpec,
    pub kind: ModelKind,
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Value>,
}

impl ModelFile {
    pub fn from_real(f: &RealModel, provenance: Option<Value>) -> Self {
        ModelFile {
            domain: DomainSpec {
                size: f.len(),
                names: None,
            },
            kind: ModelKind::Real,
            values: f.values().to_vec(),
            provenance,
        }
    }

    pub fn from_bin(f: &BinModel, provenance: Option<Value>) -> Self {
        ModelFile {
            domain: DomainSpec {
                size: f.len(),
                names: None,
            },
            kind: ModelKind::Binary,
            values: f.values().iter().map(|&v| v as f64).collect(),
            provenance,
        }
    }

    fn check_len(&self) -> Result<()> {
        if self.values.len() != self.domain.size {
            return invalid("model values must match the domain size");
        }
        Ok(())
    }

    pub fn to_real(&self) -> Result<RealModel> {
        self.check_len()?;
        RealModel::new(self.values.clone())
    }

    pub fn to_bin(&self) -> Result<BinModel> {
        self.check_len()?;
        let mut v = Vec::with_capacity(self.values.len());
        for &u in &self.values {
            if u == 1.0 {
                v.push(1);
            } else if u == -1.0 {
                v.push(-1);
            } else {
                return invalid(format!("binary model value {u} must be ±1"));
            }
        }
        BinModel::new(v)
    }
}
