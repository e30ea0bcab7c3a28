use serde::{Deserialize, Serialize};

use crate::serde_ext::{ext_f64, ext_f64_opt};

/// Version of the JSON documents written by the crate.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "==")]
    Equal,
    /// Recorded data without a verdict.
    #[serde(rename = "info")]
    Info,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub name: String,
    #[serde(with = "ext_f64")]
    pub value: f64,
    pub relation: Relation,
    #[serde(with = "ext_f64_opt")]
    pub bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// The statement the check verifies.
    pub anchor: String,
    pub status: Status,
    pub tolerance: f64,
    pub measured: Vec<Measurement>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// Accumulates measurements for one check; every bounded measurement that
/// misses its bound by more than the tolerance fails the check.
#[derive(Debug, Clone)]
pub struct CheckBuilder {
    check: Check,
}

impl CheckBuilder {
    pub fn new(name: &str, anchor: &str, tolerance: f64) -> Self {
        CheckBuilder {
            check: Check {
                name: name.into(),
                anchor: anchor.into(),
                status: Status::Pass,
                tolerance,
                measured: Vec::new(),
                detail: None,
            },
        }
    }

    fn push(&mut self, name: &str, value: f64, relation: Relation, bound: Option<f64>, ok: bool) -> &mut Self {
        if !ok {
            self.check.status = Status::Fail;
        }
        self.check.measured.push(Measurement { name: name.into(), value, relation, bound });
        self
    }

    pub fn at_most(&mut self, name: &str, value: f64, bound: f64) -> &mut Self {
        let ok = value <= bound + self.check.tolerance;
        self.push(name, value, Relation::AtMost, Some(bound), ok)
    }

    pub fn at_least(&mut self, name: &str, value: f64, bound: f64) -> &mut Self {
        let ok = value >= bound - self.check.tolerance;
        self.push(name, value, Relation::AtLeast, Some(bound), ok)
    }

    pub fn equal(&mut self, name: &str, value: f64, target: f64) -> &mut Self {
        let ok = value == target || (value - target).abs() <= self.check.tolerance;
        self.push(name, value, Relation::Equal, Some(target), ok)
    }

    /// Equality to within `tol` instead of the check tolerance.
    pub fn equal_within(&mut self, name: &str, value: f64, target: f64, tol: f64) -> &mut Self {
        let ok = value == target || (value - target).abs() <= tol;
        self.push(name, value, Relation::Equal, Some(target), ok)
    }

    pub fn holds(&mut self, name: &str, ok: bool) -> &mut Self {
        self.push(name, if ok { 1.0 } else { 0.0 }, Relation::Equal, Some(1.0), ok)
    }

    pub fn info(&mut self, name: &str, value: f64) -> &mut Self {
        self.push(name, value, Relation::Info, None, true)
    }

    pub fn detail(&mut self, text: impl Into<String>) -> &mut Self {
        self.check.detail = Some(text.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.check.status == Status::Pass
    }

    pub fn finish(self) -> Check {
        self.check
    }

    /// A check whose evaluation raised an error.
    pub fn errored(name: &str, anchor: &str, tolerance: f64, err: impl std::fmt::Display) -> Check {
        let mut b = Self::new(name, anchor, tolerance);
        b.check.status = Status::Fail;
        b.detail(format!("error: {err}"));
        b.finish()
    }
}

/// Outcome of the verification suite. Contains no timings, so reruns with
/// the same configuration serialize identically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

impl VerificationReport {
    pub fn new(seed: u64, checks: Vec<Check>) -> Self {
        let count = |s| checks.iter().filter(|c| c.status == s).count();
        let (passed, failed, skipped) = (count(Status::Pass), count(Status::Fail), count(Status::Skipped));
        VerificationReport { schema_version: SCHEMA_VERSION, seed, checks, passed, failed, skipped }
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0 && self.skipped == 0
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builder_applies_tolerance() {
        let mut b = CheckBuilder::new("x", "y", 1e-9);
        b.at_most("a", 1.0 + 1e-10, 1.0).at_least("b", 0.5, 0.5).info("c", f64::INFINITY);
        assert!(b.passed());
        b.equal("d", 2.0, 2.1);
        assert!(!b.passed());
        let report = VerificationReport::new(3, vec![b.finish()]);
        assert_eq!((report.passed, report.failed), (0, 1));
        let s = serde_json::to_string(&report).unwrap();
        assert_eq!(serde_json::from_str::<VerificationReport>(&s).unwrap(), report);
    }
}
