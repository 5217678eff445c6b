//! Machine-readable check reports (JSON and CSV).

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub expected: Value,
    pub actual: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

impl Check {
    /// Passes when `expected` and `actual` serialize to the same value.
    pub fn compare(
        name: impl Into<String>,
        expected: impl Serialize,
        actual: impl Serialize,
    ) -> Self {
        let (expected, actual) = (to_value(expected), to_value(actual));
        let status = if expected == actual {
            Status::Pass
        } else {
            Status::Fail
        };
        Check {
            name: name.into(),
            status,
            expected,
            actual,
            witness: None,
        }
    }

    pub fn predicate(
        name: impl Into<String>,
        ok: bool,
        expected: impl Serialize,
        actual: impl Serialize,
    ) -> Self {
        Check {
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            expected: to_value(expected),
            actual: to_value(actual),
            witness: None,
        }
    }

    /// A measured quantity with no asserted value.
    pub fn measured(name: impl Into<String>, actual: impl Serialize) -> Self {
        Check {
            name: name.into(),
            status: Status::Pass,
            expected: Value::Null,
            actual: to_value(actual),
            witness: None,
        }
    }

    /// Attaches a witness; `None`/null leaves the check without one.
    pub fn with_witness(mut self, w: impl Serialize) -> Self {
        let v = to_value(w);
        self.witness = if v.is_null() { None } else { Some(v) };
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub params: Value,
    pub command: String,
    pub checks: Vec<Check>,
    pub elapsed_ms: u64,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One row per check; `expected`, `actual` and `witness` are JSON cells.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Validation(format!("csv: {e}"));
        w.write_record(["command", "name", "status", "expected", "actual", "witness"])
            .map_err(io)?;
        for c in &self.checks {
            let status = if c.passed() { "pass" } else { "fail" };
            let witness = c.witness.as_ref().map(Value::to_string).unwrap_or_default();
            w.write_record([
                self.command.as_str(),
                c.name.as_str(),
                status,
                &c.expected.to_string(),
                &c.actual.to_string(),
                &witness,
            ])
            .map_err(io)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::Validation(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}
