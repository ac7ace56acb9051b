//! Machine-readable verification reports.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// Finite probe of a hypothesis that quantifies over infinitely many cases.
    EvidenceOnly,
}

impl Status {
    pub fn from_pass(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    /// Evidence-only when the probe held, fail otherwise.
    pub fn evidence(ok: bool) -> Self {
        if ok {
            Status::EvidenceOnly
        } else {
            Status::Fail
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub check_name: String,
    pub parameters: BTreeMap<String, Value>,
    pub status: Status,
    pub max_error: f64,
    pub witnesses: Vec<Value>,
    pub runtime_ms: u64,
    pub details: Value,
}

fn to_value<T: Serialize>(v: T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

impl Report {
    pub fn new(check_name: impl Into<String>, status: Status) -> Self {
        Report {
            check_name: check_name.into(),
            parameters: BTreeMap::new(),
            status,
            max_error: 0.0,
            witnesses: Vec::new(),
            runtime_ms: 0,
            details: Value::Object(Default::default()),
        }
    }

    pub fn param<T: Serialize>(mut self, key: &str, value: T) -> Self {
        self.parameters.insert(key.to_string(), to_value(value));
        self
    }

    pub fn max_error(mut self, e: f64) -> Self {
        self.max_error = e;
        self
    }

    pub fn witness<T: Serialize>(mut self, w: T) -> Self {
        self.witnesses.push(to_value(w));
        self
    }

    pub fn detail<T: Serialize>(mut self, key: &str, value: T) -> Self {
        if let Value::Object(map) = &mut self.details {
            map.insert(key.to_string(), to_value(value));
        }
        self
    }

    pub fn runtime(mut self, ms: u64) -> Self {
        self.runtime_ms = ms;
        self
    }

    pub fn is_fail(&self) -> bool {
        self.status == Status::Fail
    }

    /// Guarantees a failing report carries at least one witness.
    pub fn finalize(mut self) -> Self {
        if self.status == Status::Fail && self.witnesses.is_empty() {
            self.witnesses.push(json!({ "max_error": self.max_error }));
        }
        self
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }
}

pub trait ToReport {
    fn to_report(&self) -> Report;
}

/// Runs `f` and returns its result with the elapsed wall time in milliseconds.
pub fn timed<T>(f: impl FnOnce() -> T) -> (T, u64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_millis() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failing_report_gets_a_witness() {
        let r = Report::new("x", Status::Fail).max_error(0.5).finalize();
        assert_eq!(r.witnesses.len(), 1);
        let line = r.to_json_line();
        assert!(line.contains("\"status\":\"fail\""));
    }

    #[test]
    fn evidence_only_serializes_kebab() {
        let r = Report::new("probe", Status::EvidenceOnly).param("m", 3);
        assert!(r.to_json_line().contains("evidence-only"));
    }
}
