use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use quadrirational::consistency::{Mode, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Pass,
    Fail,
    NotApplicable,
}

/// One JSON line of output. A counterexample is present iff the outcome is `Fail`.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub claim: String,
    pub input: String,
    pub mode: &'static str,
    pub samples: usize,
    pub verdict: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
}

/// First 16 hex digits of the SHA-256 of the input description.
pub fn digest(input: &str) -> String {
    let h = Sha256::digest(input.as_bytes());
    h.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

pub fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Random => "random",
        Mode::ExactGrid => "exact",
    }
}

impl Report {
    pub fn new(claim: impl Into<String>, input: &str, mode: &'static str, samples: usize) -> Self {
        Report { claim: claim.into(), input: digest(input), mode, samples, verdict: Outcome::Pass, counterexample: None, result: None }
    }

    pub fn from_verdict(claim: impl Into<String>, input: &str, v: &Verdict) -> Self {
        let r = Report::new(claim, input, mode_name(v.mode), v.samples);
        if v.holds {
            r
        } else {
            let ce = v.counterexample.as_ref().map(|c| serde_json::to_value(c).expect("plain data"));
            r.fail(ce.unwrap_or_else(|| serde_json::json!({ "reason": "identity does not hold" })))
        }
    }

    pub fn fail(mut self, counterexample: Value) -> Self {
        self.verdict = Outcome::Fail;
        self.counterexample = Some(counterexample);
        self
    }

    pub fn not_applicable(mut self, reason: &str) -> Self {
        self.verdict = Outcome::NotApplicable;
        self.result = Some(serde_json::json!({ "reason": reason }));
        self
    }

    pub fn with_result(mut self, v: Value) -> Self {
        self.result = Some(v);
        self
    }

    pub fn line(&self) -> String {
        serde_json::to_string(self).expect("plain data")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_is_stable() {
        assert_eq!(digest("abc"), "ba7816bf8f01cfea");
    }

    #[test]
    fn fail_carries_counterexample() {
        let r = Report::new("c", "i", "exact", 1).fail(serde_json::json!({"x": "1"}));
        let v: Value = serde_json::from_str(&r.line()).unwrap();
        assert_eq!(v["verdict"], "fail");
        assert_eq!(v["counterexample"]["x"], "1");
        let p = Report::new("c", "i", "exact", 1);
        assert!(!p.line().contains("counterexample"));
    }
}
