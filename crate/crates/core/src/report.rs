//! Verdicts and reports shared by every check in the crate, plus the
//! canonical JSON / text emitters used by the command line front end.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Undetermined,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    fn label(self) -> &'static str {
        match self {
            Status::Pass => "OK",
            Status::Fail => "FAIL",
            Status::Undetermined => "UNDETERMINED",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub check: String,
    pub status: Status,
    pub detail: String,
}

impl Verdict {
    pub fn new(check: impl Into<String>, status: Status, detail: impl Into<String>) -> Self {
        Self {
            check: check.into(),
            status,
            detail: detail.into(),
        }
    }

    pub fn pass(check: impl Into<String>, detail: impl Into<String>) -> Self {
        Self::new(check, Status::Pass, detail)
    }

    pub fn fail(check: impl Into<String>, detail: impl Into<String>) -> Self {
        Self::new(check, Status::Fail, detail)
    }

    pub fn undetermined(check: impl Into<String>, detail: impl Into<String>) -> Self {
        Self::new(check, Status::Undetermined, detail)
    }
}

/// An ordered list of verdicts produced by one check.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub verdicts: Vec<Verdict>,
}

impl CheckReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, verdict: Verdict) {
        self.verdicts.push(verdict);
    }

    pub fn extend(&mut self, other: CheckReport) {
        self.verdicts.extend(other.verdicts);
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.status == Status::Pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Verdict> {
        self.verdicts.iter().filter(|v| v.status == Status::Fail)
    }
}

/// Output of one command: verdicts plus serialized artifacts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub verdicts: Vec<Verdict>,
    pub artifacts: Map<String, Value>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            command: command.into(),
            verdicts: Vec::new(),
            artifacts: Map::new(),
        }
    }

    pub fn add(&mut self, checks: CheckReport) {
        self.verdicts.extend(checks.verdicts);
    }

    pub fn push(&mut self, verdict: Verdict) {
        self.verdicts.push(verdict);
    }

    pub fn artifact(&mut self, key: impl Into<String>, value: Value) {
        self.artifacts.insert(key.into(), value);
    }

    /// Overall status: any failure wins, then any undetermined verdict.
    pub fn status(&self) -> Status {
        if self.verdicts.iter().any(|v| v.status == Status::Fail) {
            Status::Fail
        } else if self.verdicts.iter().any(|v| v.status == Status::Undetermined) {
            Status::Undetermined
        } else {
            Status::Pass
        }
    }

    pub fn emit(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_canonical_json(),
            Format::Text => self.to_text(),
        }
    }

    /// Key-sorted, pretty-printed JSON with a trailing newline.
    pub fn to_canonical_json(&self) -> String {
        // `serde_json::Value` objects are BTreeMap backed, so keys come out sorted.
        let value = serde_json::to_value(self).expect("report is always serializable");
        let mut out = serde_json::to_string_pretty(&value).expect("value is always serializable");
        out.push('\n');
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# {}", self.command);
        for v in &self.verdicts {
            let _ = writeln!(out, "{} {}: {}", v.status.label(), v.check, v.detail);
        }
        for (key, value) in &self.artifacts {
            let _ = writeln!(out, "\n[{key}]");
            render_text(&mut out, value, 1);
        }
        out
    }
}

fn render_text(out: &mut String, value: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                if v.is_object() || v.is_array() && v.as_array().is_some_and(|a| a.iter().any(|x| x.is_object())) {
                    let _ = writeln!(out, "{pad}{k}:");
                    render_text(out, v, depth + 1);
                } else {
                    let _ = writeln!(out, "{pad}{k}: {}", scalar_text(v));
                }
            }
        }
        Value::Array(items) if items.iter().any(|x| x.is_object()) => {
            for (i, v) in items.iter().enumerate() {
                let _ = writeln!(out, "{pad}- [{i}]");
                render_text(out, v, depth + 1);
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{}", scalar_text(other));
        }
    }
}

fn scalar_text(value: &Value) -> String {
    match value {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
