//! Run reports shared by every command, with the exit-code contract.

use serde::Serialize;
use serde_json::Value;

/// Process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(into = "i32")]
pub enum ExitCode {
    Pass = 0,
    CheckFailed = 1,
    Parse = 2,
    Precondition = 3,
    Resource = 4,
}

impl From<ExitCode> for i32 {
    fn from(c: ExitCode) -> i32 {
        c as i32
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    /// One-line human summary.
    pub summary: String,
    pub details: Value,
    /// Text output replacing the summary line, such as one with timings;
    /// kept out of JSON so that reports are reproducible.
    #[serde(skip)]
    pub note: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, ok: bool, summary: impl Into<String>, details: Value) -> Self {
        Check { name: name.into(), status: Status::from_bool(ok), summary: summary.into(), details, note: None }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs_digest: String,
    pub checks: Vec<Check>,
    pub exit_code: ExitCode,
}

impl RunReport {
    /// Exit code 0 exactly when every check passes.
    pub fn from_checks(command: impl Into<String>, inputs_digest: String, checks: Vec<Check>) -> Self {
        let exit_code = if checks.iter().all(Check::passed) { ExitCode::Pass } else { ExitCode::CheckFailed };
        RunReport { command: command.into(), inputs_digest, checks, exit_code }
    }

    /// A report carrying one failed `error` check.
    pub fn error(command: impl Into<String>, inputs_digest: String, code: ExitCode, message: String) -> Self {
        let check = Check::new("error", false, message.clone(), Value::String(message));
        RunReport { command: command.into(), inputs_digest, checks: vec![check], exit_code: code }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let tag = if c.passed() { "PASS" } else { "FAIL" };
            match &c.note {
                Some(n) => out.push_str(&format!("{n}\n")),
                None => out.push_str(&format!("{tag}  {}: {}\n", c.name, c.summary)),
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn exit_code_follows_checks() {
        let ok = Check::new("a", true, "", json!(null));
        let bad = Check::new("b", false, "", json!(null));
        assert_eq!(RunReport::from_checks("c", String::new(), vec![ok.clone()]).exit_code, ExitCode::Pass);
        assert_eq!(RunReport::from_checks("c", String::new(), vec![ok, bad]).exit_code, ExitCode::CheckFailed);
        let r = RunReport::error("c", String::new(), ExitCode::Parse, "x".into());
        assert!(r.to_json().contains("\"exit_code\": 2"));
    }
}
