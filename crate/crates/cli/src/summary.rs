//! Pass/fail verdicts written to `summary.json`.

use std::collections::BTreeMap;

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationSummary {
    pub experiment: String,
    pub checks: Vec<Check>,
    pub pass: bool,
    /// Raw measurements that are reported but not judged.
    pub details: BTreeMap<String, f64>,
}

impl VerificationSummary {
    pub fn new(experiment: &str) -> Self {
        Self { experiment: experiment.to_string(), checks: Vec::new(), pass: true, details: BTreeMap::new() }
    }

    pub fn check(&mut self, name: impl Into<String>, measured: f64, bound: f64, pass: bool) {
        let pass = pass && !measured.is_nan();
        self.checks.push(Check { name: name.into(), measured, bound, pass });
        self.pass = self.checks.iter().all(|c| c.pass);
    }

    /// `measured <= bound`
    pub fn at_most(&mut self, name: impl Into<String>, measured: f64, bound: f64) {
        self.check(name, measured, bound, measured <= bound);
    }

    /// `measured >= bound`
    pub fn at_least(&mut self, name: impl Into<String>, measured: f64, bound: f64) {
        self.check(name, measured, bound, measured >= bound);
    }

    pub fn detail(&mut self, name: impl Into<String>, value: f64) {
        self.details.insert(name.into(), value);
    }

    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary is serializable")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overall_is_conjunction() {
        let mut s = VerificationSummary::new("x");
        assert!(s.pass);
        s.at_most("a", 1.0, 2.0);
        assert!(s.pass);
        s.at_least("b", 1.0, 2.0);
        assert!(!s.pass);
        assert_eq!(s.failed().count(), 1);
        s.at_most("c", f64::NAN, 1.0);
        assert_eq!(s.failed().count(), 2);
    }

    #[test]
    fn json_shape() {
        let mut s = VerificationSummary::new("decay");
        s.at_most("k_exponent", 0.001, 0.02);
        let v: serde_json::Value = serde_json::from_str(&s.to_json()).unwrap();
        assert_eq!(v["experiment"], "decay");
        assert_eq!(v["checks"][0]["name"], "k_exponent");
        assert_eq!(v["pass"], true);
    }
}
