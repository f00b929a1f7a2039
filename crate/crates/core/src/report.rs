//! Machine-readable and text reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// A computation with nothing to check.
    Ok,
    Pass,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    /// The relation being tested, in words.
    pub expected: String,
    /// `None` for plain computations and skipped checks.
    pub pass: Option<bool>,
    pub summary: String,
    pub data: Value,
}

impl CheckResult {
    pub fn computed(name: impl Into<String>, summary: impl Into<String>, data: impl Serialize) -> Self {
        CheckResult {
            name: name.into(),
            expected: String::new(),
            pass: None,
            summary: summary.into(),
            data: to_value(data),
        }
    }

    pub fn checked(
        name: impl Into<String>,
        expected: impl Into<String>,
        pass: bool,
        summary: impl Into<String>,
        data: impl Serialize,
    ) -> Self {
        CheckResult {
            name: name.into(),
            expected: expected.into(),
            pass: Some(pass),
            summary: summary.into(),
            data: to_value(data),
        }
    }

    pub fn skipped(name: impl Into<String>, why: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            expected: String::new(),
            pass: None,
            summary: format!("skipped: {}", why.into()),
            data: Value::Null,
        }
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).unwrap_or_else(|e| Value::String(format!("unserializable: {e}")))
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool_version: String,
    pub command: String,
    pub inputs: BTreeMap<String, Value>,
    pub results: Vec<CheckResult>,
    pub verdict: Verdict,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Report {
            tool_version: TOOL_VERSION.to_string(),
            command: command.into(),
            inputs: BTreeMap::new(),
            results: Vec::new(),
            verdict: Verdict::Ok,
        }
    }

    pub fn input(mut self, key: &str, value: impl Serialize) -> Self {
        self.inputs.insert(key.to_string(), to_value(value));
        self
    }

    pub fn push(&mut self, r: CheckResult) {
        self.results.push(r);
        self.verdict = self.compute_verdict();
    }

    fn compute_verdict(&self) -> Verdict {
        let checks: Vec<bool> = self.results.iter().filter_map(|r| r.pass).collect();
        if checks.is_empty() {
            Verdict::Ok
        } else if checks.iter().all(|&p| p) {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn failed(&self) -> bool {
        self.verdict == Verdict::Fail
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "khf {} {}", self.tool_version, self.command);
        for (k, v) in &self.inputs {
            let shown = match v {
                Value::String(x) => x.clone(),
                other => other.to_string(),
            };
            let _ = writeln!(s, "  {k}: {shown}");
        }
        for r in &self.results {
            let tag = match r.pass {
                Some(true) => "PASS",
                Some(false) => "FAIL",
                None => "    ",
            };
            let _ = writeln!(s, "[{tag}] {}: {}", r.name, r.summary);
            if r.pass.is_some() && !r.expected.is_empty() {
                let _ = writeln!(s, "       expected {}", r.expected);
            }
        }
        let verdict = match self.verdict {
            Verdict::Ok => "ok",
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        };
        let _ = writeln!(s, "verdict: {verdict}");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_follows_checks() {
        let mut r = Report::new("verify");
        assert_eq!(r.verdict, Verdict::Ok);
        r.push(CheckResult::computed("kh", "total 2", 2));
        assert_eq!(r.verdict, Verdict::Ok);
        r.push(CheckResult::checked("a", "x = y", true, "", ()));
        assert_eq!(r.verdict, Verdict::Pass);
        r.push(CheckResult::skipped("b", "too big"));
        assert_eq!(r.verdict, Verdict::Pass);
        r.push(CheckResult::checked("c", "x = y", false, "", ()));
        assert!(r.failed());
    }

    #[test]
    fn json_has_the_schema_keys() {
        let r = Report::new("kh").input("fixture", "unknot");
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        for k in ["tool_version", "command", "inputs", "results", "verdict"] {
            assert!(v.get(k).is_some(), "{k}");
        }
    }
}
