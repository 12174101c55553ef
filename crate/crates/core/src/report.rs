//! Pass/fail reports produced by the verification suites.

use std::fmt;

/// Outcome of one named verification check.
///
/// `passed` implies `max_residual` did not exceed the tolerance the check ran
/// with; residuals are recorded either way so borderline results stay
/// auditable.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub max_residual: f64,
    pub details: Vec<String>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>) -> Self {
        CheckReport {
            name: name.into(),
            passed: true,
            max_residual: 0.0,
            details: Vec::new(),
        }
    }

    /// Record a residual against a tolerance; failure is sticky.
    pub fn record(&mut self, residual: f64, tol: f64, what: impl Into<String>) {
        if residual.abs() > self.max_residual {
            self.max_residual = residual.abs();
        }
        if !(residual.abs() <= tol) {
            self.passed = false;
            self.details
                .push(format!("{}: residual {:.3e} > tol {:.1e}", what.into(), residual, tol));
        }
    }

    /// Record a boolean condition with no associated residual.
    pub fn require(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.passed = false;
            self.details.push(what.into());
        }
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.details.push(line.into());
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<44} {}  max_residual {:.3e}",
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.max_residual
        )?;
        if !self.passed {
            for d in &self.details {
                write!(f, "\n    {d}")?;
            }
        }
        Ok(())
    }
}
