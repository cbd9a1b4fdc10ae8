use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use crate::scenario::Scenario;

pub const SCHEMA: &str = "mvlab-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Certified,
    Failed,
    Undecided,
}

impl Status {
    pub fn from_bool(ok: bool) -> Status {
        if ok {
            Status::Certified
        } else {
            Status::Failed
        }
    }

    /// 0 certified, 1 failed, 2 undecided.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Certified => 0,
            Status::Failed => 1,
            Status::Undecided => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// The mathematical claim being certified.
    pub anchor: String,
    pub status: Status,
    pub numbers: BTreeMap<String, Value>,
}

impl Check {
    pub fn new(name: impl Into<String>, anchor: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            anchor: anchor.into(),
            status: Status::Undecided,
            numbers: BTreeMap::new(),
        }
    }

    pub fn num(mut self, key: &str, value: impl Serialize) -> Self {
        self.set(key, value);
        self
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) {
        let value = serde_json::to_value(value).unwrap_or(Value::Null);
        self.numbers.insert(key.to_owned(), value);
    }

    pub fn status(mut self, status: Status) -> Self {
        self.status = status;
        self
    }

    pub fn certified_if(self, ok: bool) -> Self {
        self.status(Status::from_bool(ok))
    }

    /// A check whose computation itself failed.
    pub fn errored(self, err: impl std::fmt::Display) -> Self {
        self.num("error", err.to_string()).status(Status::Failed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub scenario: Scenario,
    pub checks: Vec<Check>,
    pub verdict: Status,
    /// Only present with `--timing`, which makes reports non-reproducible.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_clock_seconds: Option<f64>,
}

impl Report {
    /// Sorts checks by name and derives the overall verdict: certified only
    /// if every check is, failed if any check failed, undecided otherwise.
    pub fn new(scenario: Scenario, mut checks: Vec<Check>) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let verdict = if checks.iter().any(|c| c.status == Status::Failed) {
            Status::Failed
        } else if checks.iter().all(|c| c.status == Status::Certified) {
            Status::Certified
        } else {
            Status::Undecided
        };
        Report {
            schema: SCHEMA,
            scenario,
            checks,
            verdict,
            wall_clock_seconds: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("reports serialize");
        text.push('\n');
        text
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}
