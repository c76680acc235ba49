//! Structured pass/fail records emitted by every verification driver.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Error,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::Error => "error",
        }
    }
}

/// One claim checked at one parameter point.
///
/// `outcome == Pass` always comes with an empty `mismatches` list; the
/// constructors below are the only way to set the outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub claim: String,
    pub params: BTreeMap<String, Value>,
    pub outcome: Outcome,
    pub details: Map<String, Value>,
    pub mismatches: Vec<Value>,
    pub elapsed_ms: f64,
}

impl VerificationReport {
    pub fn new(claim: impl Into<String>) -> Self {
        VerificationReport {
            claim: claim.into(),
            params: BTreeMap::new(),
            outcome: Outcome::Pass,
            details: Map::new(),
            mismatches: Vec::new(),
            elapsed_ms: 0.0,
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.params.insert(key.to_owned(), to_value(value));
        self
    }

    pub fn set_detail(&mut self, key: &str, value: impl Serialize) {
        self.details.insert(key.to_owned(), to_value(value));
    }

    pub fn push_mismatch(&mut self, value: impl Serialize) {
        self.mismatches.push(to_value(value));
        if self.outcome == Outcome::Pass {
            self.outcome = Outcome::Fail;
        }
    }

    /// Record a check; a false `ok` becomes a mismatch entry.
    pub fn check(&mut self, ok: bool, what: impl FnOnce() -> Value) {
        if !ok {
            self.push_mismatch(what());
        }
    }

    pub fn set_error(&mut self, message: impl std::fmt::Display) {
        self.outcome = Outcome::Error;
        self.details.insert("error".into(), Value::String(message.to_string()));
    }

    pub fn finish(mut self, started: Instant) -> Self {
        self.elapsed_ms = started.elapsed().as_secs_f64() * 1e3;
        self
    }

    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report is always serialisable")
    }

    /// Flat CSV fields: claim, params as `k=v;...`, outcome, mismatch count, elapsed.
    pub fn csv_record(&self) -> [String; 5] {
        let params = self
            .params
            .iter()
            .map(|(k, v)| format!("{k}={}", value_text(v)))
            .collect::<Vec<_>>()
            .join(";");
        [
            self.claim.clone(),
            params,
            self.outcome.as_str().to_owned(),
            self.mismatches.len().to_string(),
            format!("{:.3}", self.elapsed_ms),
        ]
    }

    pub const CSV_HEADER: [&'static str; 5] = ["claim", "params", "outcome", "mismatches", "elapsed_ms"];
}

fn value_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).unwrap_or_else(|e| Value::String(format!("<unserialisable: {e}>")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn mismatch_flips_outcome() {
        let mut r = VerificationReport::new("demo").param("k", 12);
        assert!(r.passed());
        r.check(true, || json!("never"));
        assert!(r.passed());
        r.check(false, || json!({"i": 1}));
        assert_eq!(r.outcome, Outcome::Fail);
        assert_eq!(r.mismatches.len(), 1);
    }

    #[test]
    fn json_roundtrip_and_csv() {
        let mut r = VerificationReport::new("demo").param("k", 12).param("name", "x");
        r.set_detail("slopes", vec![3, 7]);
        let line = r.to_json_line();
        let back: VerificationReport = serde_json::from_str(&line).unwrap();
        assert_eq!(back, r);
        let rec = r.csv_record();
        assert_eq!(rec[1], "k=12;name=x");
        assert_eq!(rec[2], "pass");
    }
}
