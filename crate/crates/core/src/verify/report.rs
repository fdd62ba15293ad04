use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// Passes when `measured ≥ threshold`.
    AtLeast,
    /// Passes when `measured ≤ threshold`.
    AtMost,
}

/// One checked case of a harness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub case: String,
    /// NaN (serialized as null) when the case could not be computed.
    #[serde(with = "nan_as_null")]
    pub measured: f64,
    pub threshold: f64,
    pub relation: Relation,
    pub pass: bool,
    /// Supporting numbers (capacities, counts, intermediate values).
    #[serde(default)]
    pub values: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Record {
    pub fn check(case: impl Into<String>, measured: f64, relation: Relation, threshold: f64) -> Self {
        let pass = match relation {
            Relation::AtLeast => measured >= threshold,
            Relation::AtMost => measured <= threshold,
        };
        Self { case: case.into(), measured, threshold, relation, pass, values: BTreeMap::new(), error: None }
    }

    /// A failed case that could not be computed.
    pub fn failed(case: impl Into<String>, relation: Relation, threshold: f64, error: impl ToString) -> Self {
        Self {
            case: case.into(),
            measured: f64::NAN,
            threshold,
            relation,
            pass: false,
            values: BTreeMap::new(),
            error: Some(error.to_string()),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.values.insert(key.to_string(), value);
        self
    }
}

mod nan_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub harness: String,
    /// Set for sweeps over conjectured (unproven) statements.
    pub exploratory: bool,
    pub parameters: serde_json::Value,
    pub records: Vec<Record>,
    /// True iff every record passes.
    pub pass: bool,
    pub runtime_seconds: Option<f64>,
}

impl VerificationReport {
    pub fn new(harness: &str, parameters: serde_json::Value) -> Self {
        Self {
            harness: harness.to_string(),
            exploratory: false,
            parameters,
            records: Vec::new(),
            pass: true,
            runtime_seconds: None,
        }
    }

    pub fn push(&mut self, record: Record) {
        self.pass &= record.pass;
        self.records.push(record);
    }

    pub fn extend(&mut self, records: impl IntoIterator<Item = Record>) {
        for r in records {
            self.push(r);
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| !r.pass)
    }

    pub fn record(&self, case: &str) -> Option<&Record> {
        self.records.iter().find(|r| r.case == case)
    }
}
