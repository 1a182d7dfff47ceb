use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebra::AlgElem;
use crate::error::Error;
use crate::linalg::TolerancePolicy;

/// Whether a property is expected to hold on the sampled inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    Holds,
    /// A counterexample property: the suite passes when the failure is observed.
    Fails,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Outcome of one sampled property.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub property: String,
    pub samples: usize,
    /// Trials whose premise was false; they count towards `samples` but carry no evidence.
    pub vacuous: usize,
    /// Non-finite values (numeric failures) serialize as `null`.
    #[serde(with = "lossy_f64")]
    pub max_residual: f64,
    pub threshold: f64,
    /// The property held on every trial.
    pub holds: bool,
    pub expectation: Expectation,
    pub verdict: Verdict,
    pub seed: u64,
    /// Inputs of the worst trial, present whenever the property failed or the verdict is `Fail`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
    #[serde(skip)]
    worst_inputs: Option<Value>,
}

impl TrialReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn with_property(mut self, id: impl Into<String>) -> Self {
        self.property = id.into();
        self
    }

    pub fn with_expectation(mut self, expectation: Expectation) -> Self {
        self.expectation = expectation;
        self.verdict = verdict_for(self.holds, expectation);
        self.refresh_payload()
    }

    pub fn with_detail(mut self, detail: Value) -> Self {
        self.detail = Some(detail);
        self
    }

    /// Report for a property that could not be evaluated at all.
    pub fn errored(property: impl Into<String>, seed: u64, err: &Error) -> Self {
        Self {
            property: property.into(),
            samples: 0,
            vacuous: 0,
            max_residual: f64::INFINITY,
            threshold: 0.0,
            holds: false,
            expectation: Expectation::Holds,
            verdict: Verdict::Fail,
            seed,
            counterexample: Some(json!({ "error": err.to_string() })),
            detail: None,
            worst_inputs: Some(json!({ "error": err.to_string() })),
        }
    }
}

fn verdict_for(holds: bool, expectation: Expectation) -> Verdict {
    match (holds, expectation) {
        (true, Expectation::Holds) | (false, Expectation::Fails) => Verdict::Pass,
        _ => Verdict::Fail,
    }
}

mod lossy_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

/// `||lhs − rhs||_F / max(1, ||lhs||_F)`; mismatched algebras give `∞`.
pub fn residual(lhs: &AlgElem, rhs: &AlgElem) -> f64 {
    match lhs.sub(rhs) {
        Ok(d) => d.fro_norm() / lhs.fro_norm().max(1.0),
        Err(_) => f64::INFINITY,
    }
}

pub(crate) fn payload(items: &[(&str, &AlgElem)]) -> Value {
    Value::Object(items.iter().map(|(k, v)| (k.to_string(), serde_json::to_value(v).expect("serializable"))).collect())
}

/// Running maximum over trials, keeping the inputs of the worst one.
pub(crate) struct Tally {
    samples: usize,
    vacuous: usize,
    max: f64,
    worst: Option<Value>,
    threshold: f64,
}

impl Tally {
    pub fn new(tol: &TolerancePolicy) -> Self {
        Self::with_threshold(10.0 * tol.eq_tol)
    }

    pub fn with_threshold(threshold: f64) -> Self {
        Self { samples: 0, vacuous: 0, max: 0.0, worst: None, threshold }
    }

    pub fn record(&mut self, r: f64, inputs: impl FnOnce() -> Value) {
        let r = if r.is_nan() { f64::INFINITY } else { r };
        self.samples += 1;
        if self.worst.is_none() || r > self.max {
            self.max = r;
            self.worst = Some(inputs());
        }
    }

    /// Records `Ok(r)` or, on error, an infinite residual with the error attached.
    pub fn record_result(&mut self, r: crate::error::Result<f64>, inputs: impl FnOnce() -> Value) {
        match r {
            Ok(r) => self.record(r, inputs),
            Err(e) => self.record(f64::INFINITY, || {
                let mut v = inputs();
                if let Value::Object(m) = &mut v {
                    m.insert("error".into(), Value::String(e.to_string()));
                }
                v
            }),
        }
    }

    pub fn vacuous(&mut self) {
        self.samples += 1;
        self.vacuous += 1;
    }

    pub fn finish(self, property: impl Into<String>, seed: u64) -> TrialReport {
        let holds = self.max < self.threshold;
        let verdict = verdict_for(holds, Expectation::Holds);
        TrialReport {
            property: property.into(),
            samples: self.samples,
            vacuous: self.vacuous,
            max_residual: self.max,
            threshold: self.threshold,
            holds,
            expectation: Expectation::Holds,
            verdict,
            seed,
            counterexample: None,
            detail: None,
            worst_inputs: self.worst,
        }
        .refresh_payload()
    }
}

impl TrialReport {
    fn refresh_payload(mut self) -> Self {
        self.counterexample = if !self.holds || self.verdict == Verdict::Fail { self.worst_inputs.clone() } else { None };
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expected_failure_passes_when_it_fails() {
        let tol = TolerancePolicy::default();
        let mut t = Tally::new(&tol);
        t.record(2.0, || json!({"a": 1}));
        let r = t.finish("x", 1).with_expectation(Expectation::Fails);
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(!r.holds);
        assert!(r.counterexample.is_some());
    }

    #[test]
    fn failing_report_carries_payload() {
        let tol = TolerancePolicy::default();
        let mut t = Tally::new(&tol);
        t.record(0.0, || json!({"trial": 0}));
        t.record(f64::NAN, || json!({"trial": 1}));
        let r = t.finish("x", 1);
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.counterexample, Some(json!({"trial": 1})));
        let text = serde_json::to_string(&r).unwrap();
        assert!(text.contains("\"max_residual\":null"));
        let back: TrialReport = serde_json::from_str(&text).unwrap();
        assert!(back.max_residual.is_infinite());
    }

    #[test]
    fn passing_report_has_no_payload() {
        let tol = TolerancePolicy::default();
        let mut t = Tally::new(&tol);
        t.record(1e-15, || json!({}));
        let r = t.finish("x", 1);
        assert!(r.passed() && r.counterexample.is_none());
        let r = r.with_expectation(Expectation::Fails);
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(r.counterexample.is_some());
    }
}
