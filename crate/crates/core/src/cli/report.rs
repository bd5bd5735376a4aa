use super::request::SCHEMA;
use crate::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Whether a check needs `residual ≤ tolerance` or, for non-vacuity checks,
/// `residual > tolerance`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    Upper,
    Lower,
}

/// One verified quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub params: Value,
    pub value: Value,
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub bound: Bound,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, params: Value, value: Value, residual: f64, tolerance: f64) -> Self {
        Self::bounded(name, params, value, residual, tolerance, Bound::Upper)
    }

    pub fn bounded(
        name: impl Into<String>,
        params: Value,
        value: Value,
        residual: f64,
        tolerance: f64,
        bound: Bound,
    ) -> Self {
        let mut c = Self {
            name: name.into(),
            params,
            value,
            residual: Some(residual),
            tolerance,
            bound,
            pass: false,
            error: None,
        };
        c.grade();
        c
    }

    /// A check whose computation itself failed.
    pub fn failed(name: impl Into<String>, params: Value, tolerance: f64, err: &crate::Error) -> Self {
        Self {
            name: name.into(),
            params,
            value: Value::Null,
            residual: None,
            tolerance,
            bound: Bound::Upper,
            pass: false,
            error: Some(err.to_string()),
        }
    }

    /// Replaces the tolerance of an upper-bound check and re-grades it.
    pub fn override_tolerance(&mut self, tol: f64) {
        if self.bound == Bound::Upper {
            self.tolerance = tol;
            self.grade();
        }
    }

    fn grade(&mut self) {
        self.pass = match (self.residual, self.bound) {
            (Some(r), Bound::Upper) => r <= self.tolerance,
            (Some(r), Bound::Lower) => r > self.tolerance,
            (None, _) => false,
        };
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    /// Wall-clock seconds; only filled in on request, since it would break
    /// byte-stability of the report.
    pub runtime: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
    pub checks: Vec<Check>,
    pub summary: Summary,
}

impl Report {
    pub fn new(command: &str, suite: Option<&str>, checks: Vec<Check>) -> Self {
        let passed = checks.iter().filter(|c| c.pass).count();
        let failed = checks.len() - passed;
        Self {
            schema: SCHEMA,
            command: command.into(),
            suite: suite.map(Into::into),
            checks,
            summary: Summary { passed, failed, runtime: None },
        }
    }

    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// `[re, im]`.
pub fn cjson(z: Complex64) -> Value {
    serde_json::json!([z.re, z.im])
}
