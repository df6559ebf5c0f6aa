//! Check reports and their accumulation over sample points.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
    Errored,
}

/// Largest residual of one identity over all sampled points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "bound", rename_all = "snake_case")]
pub enum Requirement {
    AtLeast(f64),
    AtMost(f64),
    Equals(f64),
    /// Informational only; always satisfied.
    Record,
}

impl Requirement {
    pub fn holds(&self, v: f64) -> bool {
        match *self {
            Requirement::AtLeast(b) => v >= b,
            Requirement::AtMost(b) => v <= b,
            Requirement::Equals(b) => v == b,
            Requirement::Record => true,
        }
    }
}

/// A scalar quantity with a stated requirement, e.g. a kernel dimension or a
/// lower bound on a norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub name: String,
    pub value: f64,
    pub requirement: Requirement,
    pub satisfied: bool,
}

/// Eigen data of `(∇ξ)²` at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    /// Sorted descending.
    pub eigenvalues: Vec<f64>,
    /// `(representative eigenvalue, multiplicity)` after clustering.
    pub multiplicities: Vec<(f64, usize)>,
    /// Elementary symmetric polynomials `e_0 = 1, …, e_dim` of the eigenvalues.
    pub elementary: Vec<f64>,
    /// Power sums `p_1, …, p_dim`, i.e. traces of powers.
    pub power_sums: Vec<f64>,
}

impl SpectrumResult {
    /// Largest violation of `s·e_s = Σ_{j=1..s} (−1)^{j−1} e_{s−j} p_j`,
    /// relative to `1 + |s·e_s|`.
    pub fn newton_residual(&self) -> f64 {
        newton_residual(&self.elementary, &self.power_sums)
    }
}

pub fn newton_residual(e: &[f64], p: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for s in 1..e.len().min(p.len() + 1) {
        let lhs = s as f64 * e[s];
        let rhs: f64 = (1..=s)
            .map(|j| {
                let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
                sign * e[s - j] * p[j - 1]
            })
            .sum();
        worst = worst.max((lhs - rhs).abs() / (1.0 + lhs.abs().max(rhs.abs())));
    }
    worst
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub model: String,
    pub points: usize,
    pub seed: u64,
    pub status: Status,
    pub tolerance: f64,
    pub residuals: Vec<Residual>,
    pub observations: Vec<Observation>,
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub spectrum: Option<SpectrumResult>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub errored_point: Option<Vec<f64>>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn residual(&self, name: &str) -> Option<f64> {
        self.residuals.iter().find(|r| r.name == name).map(|r| r.value)
    }

    pub fn observation(&self, name: &str) -> Option<f64> {
        self.observations.iter().find(|o| o.name == name).map(|o| o.value)
    }

    /// Largest residual over all identities in the report.
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, r| m.max(r.value))
    }
}

/// Accumulates residuals over points, keeping the maximum per identity in
/// first-seen order.
#[derive(Debug, Clone)]
pub struct ReportBuilder {
    report: CheckReport,
}

impl ReportBuilder {
    pub fn new(check: &str, model: &str, points: usize, seed: u64, tolerance: f64) -> Self {
        Self {
            report: CheckReport {
                check: check.to_string(),
                model: model.to_string(),
                points,
                seed,
                status: Status::Pass,
                tolerance,
                residuals: Vec::new(),
                observations: Vec::new(),
                notes: Vec::new(),
                spectrum: None,
                errored_point: None,
            },
        }
    }

    pub fn tolerance(&self) -> f64 {
        self.report.tolerance
    }

    /// Records a residual under the report's default tolerance.
    pub fn residual(&mut self, name: &str, value: f64) {
        let tol = self.report.tolerance;
        self.residual_with(name, value, tol);
    }

    pub fn residual_with(&mut self, name: &str, value: f64, tolerance: f64) {
        match self.report.residuals.iter_mut().find(|r| r.name == name) {
            Some(r) => {
                if value > r.value || value.is_nan() {
                    r.value = value;
                }
            }
            None => self.report.residuals.push(Residual {
                name: name.to_string(),
                value,
                tolerance,
                passed: true,
            }),
        }
    }

    /// Records an observation; repeated names keep the least favourable value.
    pub fn observe(&mut self, name: &str, value: f64, requirement: Requirement) {
        match self.report.observations.iter_mut().find(|o| o.name == name) {
            Some(o) => {
                let worse = match requirement {
                    Requirement::AtLeast(_) => value < o.value,
                    Requirement::AtMost(_) => value > o.value,
                    Requirement::Equals(_) => !requirement.holds(value),
                    Requirement::Record => false,
                };
                if worse || value.is_nan() {
                    o.value = value;
                }
            }
            None => self.report.observations.push(Observation {
                name: name.to_string(),
                value,
                requirement,
                satisfied: true,
            }),
        }
    }

    pub fn note(&mut self, text: impl Into<String>) {
        let text = text.into();
        if !self.report.notes.contains(&text) {
            self.report.notes.push(text);
        }
    }

    pub fn spectrum(&mut self, s: SpectrumResult) {
        self.report.spectrum = Some(s);
    }

    pub fn finish(mut self) -> CheckReport {
        let mut ok = true;
        for r in &mut self.report.residuals {
            r.passed = r.value < r.tolerance;
            ok &= r.passed;
        }
        for o in &mut self.report.observations {
            o.satisfied = o.requirement.holds(o.value);
            ok &= o.satisfied;
        }
        self.report.status = if ok { Status::Pass } else { Status::Fail };
        self.report
    }

    pub fn skip(mut self, reason: impl Into<String>) -> CheckReport {
        self.note(reason);
        self.report.residuals.clear();
        self.report.observations.clear();
        self.report.status = Status::Skipped;
        self.report
    }

    /// Skips while keeping whatever was measured, evaluating requirements.
    pub fn skip_with_measurements(mut self, reason: impl Into<String>) -> CheckReport {
        self.note(reason);
        let mut r = self.finish();
        r.status = Status::Skipped;
        r
    }

    pub fn error(mut self, reason: impl Into<String>, point: Option<Vec<f64>>) -> CheckReport {
        self.note(reason);
        self.report.status = Status::Errored;
        self.report.errored_point = point;
        self.report
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builder_keeps_maximum_and_decides_status() {
        let mut b = ReportBuilder::new("c", "m", 3, 1, 1e-8);
        b.residual("a", 1e-12);
        b.residual("a", 1e-10);
        b.residual("a", 1e-11);
        b.residual_with("b", 0.5, 1.0);
        let r = b.clone().finish();
        assert_eq!(r.residual("a"), Some(1e-10));
        assert!(r.passed());
        b.residual("a", 1e-6);
        assert_eq!(b.finish().status, Status::Fail);
    }

    #[test]
    fn nan_residual_fails() {
        let mut b = ReportBuilder::new("c", "m", 1, 1, 1e-8);
        b.residual("a", 0.0);
        b.residual("a", f64::NAN);
        assert_eq!(b.finish().status, Status::Fail);
    }

    #[test]
    fn observations_keep_worst_value() {
        let mut b = ReportBuilder::new("c", "m", 1, 1, 1e-8);
        b.observe("norm", 0.4, Requirement::AtLeast(0.1));
        b.observe("norm", 0.05, Requirement::AtLeast(0.1));
        b.observe("norm", 0.3, Requirement::AtLeast(0.1));
        let r = b.finish();
        assert_eq!(r.observation("norm"), Some(0.05));
        assert_eq!(r.status, Status::Fail);
    }

    #[test]
    fn skip_and_error_states() {
        let b = ReportBuilder::new("c", "m", 1, 1, 1e-8);
        let s = b.clone().skip("needs a positive definite metric");
        assert_eq!(s.status, Status::Skipped);
        let e = b.error("singular metric", Some(vec![0.0]));
        assert_eq!(e.status, Status::Errored);
        assert_eq!(e.errored_point, Some(vec![0.0]));
    }

    #[test]
    fn newton_identities_for_known_roots() {
        // roots 1, 2: e = (1, 3, 2), p = (3, 5)
        assert!(newton_residual(&[1.0, 3.0, 2.0], &[3.0, 5.0]) < 1e-15);
        assert!(newton_residual(&[1.0, 3.0, 2.5], &[3.0, 5.0]) > 0.1);
    }

    #[test]
    fn report_serializes_losslessly() {
        let mut b = ReportBuilder::new("c", "m", 2, 9, 1e-8);
        b.residual("a", 0.1 + 0.2);
        b.observe("k", 5.0, Requirement::Equals(5.0));
        let r = b.finish();
        let s = serde_json::to_string(&r).unwrap();
        let back: CheckReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }
}
