use serde::{Deserialize, Serialize};

/// One named identity check with its pinned tolerance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn new() -> Self {
        Self::default()
    }

    /// NaN deviations fail.
    pub fn record(&mut self, name: impl Into<String>, max_deviation: f64, tolerance: f64) -> bool {
        let passed = max_deviation <= tolerance;
        self.checks.push(Check { name: name.into(), max_deviation, tolerance, passed });
        passed
    }

    /// Boolean check recorded as deviation 0 or 1 against tolerance 0.
    pub fn record_bool(&mut self, name: impl Into<String>, ok: bool) -> bool {
        self.record(name, if ok { 0.0 } else { 1.0 }, 0.0)
    }

    pub fn extend(&mut self, other: VerifyReport) {
        self.checks.extend(other.checks);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn max_deviation(&self) -> f64 {
        self.checks.iter().fold(0.0, |m, c| m.max(c.max_deviation))
    }
}
