//! Machine-readable suite reports.

use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Check {
    pub fn pass(name: impl Into<String>) -> Self {
        Check { name: name.into(), status: Status::Pass, witness: None }
    }

    pub fn fail(name: impl Into<String>, witness: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            status: Status::Fail,
            witness: Some(witness.into()),
        }
    }
}

/// One suite run. `elapsed` is in milliseconds and is the only field that
/// varies between identical runs.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub suite: String,
    pub n: usize,
    pub parameters: BTreeMap<String, String>,
    pub checks: Vec<Check>,
    pub elapsed: u64,
}

impl Report {
    pub fn new(suite: impl Into<String>, n: usize) -> Self {
        Report {
            suite: suite.into(),
            n,
            parameters: BTreeMap::new(),
            checks: Vec::new(),
            elapsed: 0,
        }
    }

    pub fn param(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }

    pub fn text_summary(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("suite {} (n = {})\n", self.suite, self.n));
        for c in &self.checks {
            out.push_str(&format!(
                "  [{}] {}\n",
                match c.status {
                    Status::Pass => "pass",
                    Status::Fail => "FAIL",
                },
                c.name
            ));
            if let Some(w) = &c.witness {
                out.push_str(&format!("        witness: {w}\n"));
            }
        }
        out
    }
}
