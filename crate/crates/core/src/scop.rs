//! State–context–property model of a concept and the prototype distance.
//!
//! A [`ScopConcept`] holds finite sets of states, contexts and properties,
//! a transition table `µ(q, e, p)` (probability that context `e` moves state
//! `p` to state `q`) and an applicability table `ν(p, a)`. A unit context
//! that leaves every state fixed is always present under [`UNIT_CONTEXT`].

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use thiserror::Error;

pub const UNIT_CONTEXT: &str = "unit";

const ROW_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScopError {
    #[error("feature vectors differ in length: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error("duplicate {kind} `{name}`")]
    Duplicate { kind: &'static str, name: String },
    #[error("{table} entry {value} outside [0, 1]")]
    OutOfRange { table: &'static str, value: f64 },
    #[error("transitions under context `{context}` from state `{from}` sum to {sum}")]
    RowSum {
        context: String,
        from: String,
        sum: f64,
    },
    #[error("the unit context is implicit and cannot be redefined")]
    UnitContextRedefined,
    #[error("invalid JSON: {0}")]
    Json(String),
}

/// Applicability weights `x_1 … x_M` of a fixed feature list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector(pub Vec<f64>);

/// Euclidean distance between an item's feature weights and the prototype's.
pub fn prototype_distance(
    item: &FeatureVector,
    prototype: &FeatureVector,
) -> Result<f64, ScopError> {
    if item.0.len() != prototype.0.len() {
        return Err(ScopError::LengthMismatch(item.0.len(), prototype.0.len()));
    }
    Ok(item
        .0
        .iter()
        .zip(&prototype.0)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionEntry {
    pub context: String,
    pub from: String,
    pub to: String,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApplicabilityEntry {
    pub state: String,
    pub property: String,
    pub weight: f64,
}

/// Serialized form. Missing table entries are zero; the unit context is not
/// listed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScopDocument {
    pub states: Vec<String>,
    pub ground_state: String,
    pub contexts: Vec<String>,
    pub properties: Vec<String>,
    pub transitions: Vec<TransitionEntry>,
    pub applicability: Vec<ApplicabilityEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScopConcept {
    states: Vec<String>,
    contexts: Vec<String>,
    properties: Vec<String>,
    ground: usize,
    // µ[(e * S + p) * S + q]
    transition: Vec<f64>,
    // ν[p * L + a]
    applicability: Vec<f64>,
}

fn index_of(names: &[String], kind: &'static str) -> Result<HashMap<String, usize>, ScopError> {
    let mut map = HashMap::with_capacity(names.len());
    for (i, n) in names.iter().enumerate() {
        if map.insert(n.clone(), i).is_some() {
            return Err(ScopError::Duplicate {
                kind,
                name: n.clone(),
            });
        }
    }
    Ok(map)
}

fn lookup(
    map: &HashMap<String, usize>,
    kind: &'static str,
    name: &str,
) -> Result<usize, ScopError> {
    map.get(name).copied().ok_or_else(|| ScopError::Unknown {
        kind,
        name: name.to_string(),
    })
}

impl ScopConcept {
    pub fn from_document(doc: &ScopDocument) -> Result<Self, ScopError> {
        if doc.contexts.iter().any(|c| c == UNIT_CONTEXT) {
            return Err(ScopError::UnitContextRedefined);
        }
        let states = doc.states.clone();
        let mut contexts = vec![UNIT_CONTEXT.to_string()];
        contexts.extend(doc.contexts.iter().cloned());
        let properties = doc.properties.clone();

        let s_idx = index_of(&states, "state")?;
        let c_idx = index_of(&contexts, "context")?;
        let p_idx = index_of(&properties, "property")?;
        let ground = lookup(&s_idx, "state", &doc.ground_state)?;

        let n = states.len();
        let mut transition = vec![0.0; contexts.len() * n * n];
        for p in 0..n {
            transition[p * n + p] = 1.0;
        }
        for t in &doc.transitions {
            if t.context == UNIT_CONTEXT {
                return Err(ScopError::UnitContextRedefined);
            }
            let e = lookup(&c_idx, "context", &t.context)?;
            let p = lookup(&s_idx, "state", &t.from)?;
            let q = lookup(&s_idx, "state", &t.to)?;
            if !(0.0..=1.0).contains(&t.probability) {
                return Err(ScopError::OutOfRange {
                    table: "transition",
                    value: t.probability,
                });
            }
            transition[(e * n + p) * n + q] = t.probability;
        }

        let l = properties.len();
        let mut applicability = vec![0.0; n * l];
        for a in &doc.applicability {
            let p = lookup(&s_idx, "state", &a.state)?;
            let k = lookup(&p_idx, "property", &a.property)?;
            if !(0.0..=1.0).contains(&a.weight) {
                return Err(ScopError::OutOfRange {
                    table: "applicability",
                    value: a.weight,
                });
            }
            applicability[p * l + k] = a.weight;
        }

        let concept = Self {
            states,
            contexts,
            properties,
            ground,
            transition,
            applicability,
        };
        concept.check_rows()?;
        Ok(concept)
    }

    pub fn from_json(text: &str) -> Result<Self, ScopError> {
        let doc: ScopDocument =
            serde_json::from_str(text).map_err(|e| ScopError::Json(e.to_string()))?;
        Self::from_document(&doc)
    }

    pub fn to_document(&self) -> ScopDocument {
        let n = self.states.len();
        let mut transitions = Vec::new();
        for (e, context) in self.contexts.iter().enumerate().skip(1) {
            for p in 0..n {
                for q in 0..n {
                    let v = self.transition[(e * n + p) * n + q];
                    if v != 0.0 {
                        transitions.push(TransitionEntry {
                            context: context.clone(),
                            from: self.states[p].clone(),
                            to: self.states[q].clone(),
                            probability: v,
                        });
                    }
                }
            }
        }
        let l = self.properties.len();
        let mut applicability = Vec::new();
        for p in 0..n {
            for a in 0..l {
                let w = self.applicability[p * l + a];
                if w != 0.0 {
                    applicability.push(ApplicabilityEntry {
                        state: self.states[p].clone(),
                        property: self.properties[a].clone(),
                        weight: w,
                    });
                }
            }
        }
        ScopDocument {
            states: self.states.clone(),
            ground_state: self.states[self.ground].clone(),
            contexts: self.contexts[1..].to_vec(),
            properties: self.properties.clone(),
            transitions,
            applicability,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("plain data serializes")
    }

    fn check_rows(&self) -> Result<(), ScopError> {
        let n = self.states.len();
        for e in 0..self.contexts.len() {
            for p in 0..n {
                let row = &self.transition[(e * n + p) * n..(e * n + p + 1) * n];
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() > ROW_SUM_TOL {
                    return Err(ScopError::RowSum {
                        context: self.contexts[e].clone(),
                        from: self.states[p].clone(),
                        sum,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    /// Contexts including the leading unit context.
    pub fn contexts(&self) -> &[String] {
        &self.contexts
    }

    pub fn properties(&self) -> &[String] {
        &self.properties
    }

    pub fn ground_state(&self) -> &str {
        &self.states[self.ground]
    }

    fn state(&self, name: &str) -> Result<usize, ScopError> {
        self.states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| ScopError::Unknown {
                kind: "state",
                name: name.into(),
            })
    }

    /// `µ(q, e, p)`: probability that context `e` changes state `p` into `q`.
    pub fn transition_probability(&self, q: &str, e: &str, p: &str) -> Result<f64, ScopError> {
        let n = self.states.len();
        let qi = self.state(q)?;
        let pi = self.state(p)?;
        let ei = self
            .contexts
            .iter()
            .position(|c| c == e)
            .ok_or_else(|| ScopError::Unknown {
                kind: "context",
                name: e.into(),
            })?;
        Ok(self.transition[(ei * n + pi) * n + qi])
    }

    /// `ν(p, a)`: applicability weight of property `a` in state `p`.
    pub fn applicability(&self, p: &str, a: &str) -> Result<f64, ScopError> {
        let pi = self.state(p)?;
        let ai = self
            .properties
            .iter()
            .position(|x| x == a)
            .ok_or_else(|| ScopError::Unknown {
                kind: "property",
                name: a.into(),
            })?;
        Ok(self.applicability[pi * self.properties.len() + ai])
    }
}
