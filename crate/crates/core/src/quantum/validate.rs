use serde::Serialize;

/// Default tolerance for positivity, completeness and no-signalling checks.
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    /// Worst raw violation observed (0 when the property holds exactly).
    pub violation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub object: &'static str,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl ValidationReport {
    pub(crate) fn new(object: &'static str) -> Self {
        Self { object, checks: Vec::new(), passed: true }
    }

    pub(crate) fn push(&mut self, name: &'static str, violation: f64, tolerance: f64) {
        let passed = violation <= tolerance;
        self.passed &= passed;
        self.checks.push(Check { name, violation, tolerance, passed });
    }

    pub fn violation(&self, name: &str) -> Option<f64> {
        self.checks.iter().find(|c| c.name == name).map(|c| c.violation)
    }

    /// First failing check rendered as a message.
    pub fn failure(&self) -> Option<String> {
        self.checks
            .iter()
            .find(|c| !c.passed)
            .map(|c| format!("{} violated by {:.3e} (tolerance {:.1e})", c.name, c.violation, c.tolerance))
    }
}
