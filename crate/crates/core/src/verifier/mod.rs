//! Numerical checks of the identities satisfied by nearly Sasakian
//! structures, evaluated over sampled chart points of a model.
//!
//! Every check produces a [`CheckReport`]. Checks that presuppose a nearly
//! Sasakian structure are gated: the model must validate as an almost
//! contact metric structure and its nearly Sasakian defect must vanish at
//! every sampled point, otherwise the check reports `errored` (unless the
//! gate is disabled, which is how negative controls are exercised).

mod algebraic;
mod forms;
mod spectral;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::GeometryError;
use crate::parallel;
use crate::report::{CheckReport, ReportBuilder, Requirement};
use crate::tensor::vanishing;
use crate::zoo::{validate_acms, AcmsField, AcmsPoint};

pub use forms::{lefschetz_kernel_dim, lefschetz_matrix, top_wedge_value};
pub use spectral::{adapted_basis, cluster_eigenvalues, elementary_from_roots};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("two-form is degenerate (smallest singular value {0:.3e})")]
    DegenerateForm(f64),
    #[error("expected a square antisymmetric matrix of even size, got size {0}")]
    Shape(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckId {
    EasyFacts,
    Contactness,
    IphiRiem,
    CurvatureReeb,
    CharpolyConstancy,
    Eigenbundles,
    SecondOrderPhi,
    ImageKernelCases,
    MainishFormula,
    StrangeForms,
    LefschetzInjectivity,
    MainTheoremMechanism,
}

impl CheckId {
    pub const ALL: [CheckId; 12] = [
        CheckId::EasyFacts,
        CheckId::Contactness,
        CheckId::IphiRiem,
        CheckId::CurvatureReeb,
        CheckId::CharpolyConstancy,
        CheckId::Eigenbundles,
        CheckId::SecondOrderPhi,
        CheckId::ImageKernelCases,
        CheckId::MainishFormula,
        CheckId::StrangeForms,
        CheckId::LefschetzInjectivity,
        CheckId::MainTheoremMechanism,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckId::EasyFacts => "check_easy_facts",
            CheckId::Contactness => "check_contactness",
            CheckId::IphiRiem => "check_iphi_riem",
            CheckId::CurvatureReeb => "check_curvature_reeb",
            CheckId::CharpolyConstancy => "check_charpoly_constancy",
            CheckId::Eigenbundles => "check_eigenbundles",
            CheckId::SecondOrderPhi => "check_second_order_phi",
            CheckId::ImageKernelCases => "check_image_kernel_cases",
            CheckId::MainishFormula => "check_mainish_formula",
            CheckId::StrangeForms => "check_strange_forms",
            CheckId::LefschetzInjectivity => "check_lefschetz_injectivity",
            CheckId::MainTheoremMechanism => "check_main_theorem_mechanism",
        }
    }

    pub fn parse(name: &str) -> Option<CheckId> {
        CheckId::ALL.into_iter().find(|c| c.name() == name)
    }

    pub fn description(self) -> &'static str {
        match self {
            CheckId::EasyFacts => "first-order identities: Killing Reeb field, skew h and φh, dη = −2g∘∇ξ",
            CheckId::Contactness => "η is a contact form: spectrum of (∇ξ)², rank of ∇ξ, volume η∧(dη)ⁿ",
            CheckId::IphiRiem => "i_φRiem vanishes and equals the symmetrised g((R φ)·,·); Rφ two ways",
            CheckId::CurvatureReeb => "curvature along the Reeb field and second derivatives of ξ",
            CheckId::CharpolyConstancy => "characteristic polynomial and traces of (∇ξ)² are constant",
            CheckId::Eigenbundles => "eigenprojectors of (∇ξ)² are complementary, g-orthogonal and φ-invariant",
            CheckId::SecondOrderPhi => "second covariant derivative of φ and (anti)commutators with h",
            CheckId::ImageKernelCases => "∇φ on the image of h and on ker((∇ξ)² + id)",
            CheckId::MainishFormula => "closed formula for ∇φ in terms of g, η, ξ and h",
            CheckId::StrangeForms => "dΦ = 3η∧Ψ, η∧dΨ = 0 and dη∧Ψ = 0",
            CheckId::LefschetzInjectivity => "kernel of L_ω: Λ² → Λ⁴ for random symplectic ω in dimensions 4, 6, 8",
            CheckId::MainTheoremMechanism => "in dimension ≥ 7, dη∧Ψ = 0 and injectivity of L_dη force h = 0",
        }
    }

    /// Checks whose argument needs a positive definite metric; they are
    /// skipped on pseudo-Riemannian models.
    pub fn riemannian_only(self) -> bool {
        matches!(
            self,
            CheckId::Contactness
                | CheckId::Eigenbundles
                | CheckId::ImageKernelCases
                | CheckId::MainishFormula
                | CheckId::StrangeForms
                | CheckId::MainTheoremMechanism
        )
    }

    /// Whether the check presupposes a nearly Sasakian structure.
    pub fn gated(self) -> bool {
        self != CheckId::LefschetzInjectivity
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckInfo {
    pub id: &'static str,
    pub description: &'static str,
    pub gated: bool,
    pub riemannian_only: bool,
}

pub fn checks_catalogue() -> Vec<CheckInfo> {
    CheckId::ALL
        .into_iter()
        .map(|c| CheckInfo {
            id: c.name(),
            description: c.description(),
            gated: c.gated(),
            riemannian_only: c.riemannian_only(),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    pub enforce_gate: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self { enforce_gate: true }
    }
}

/// Sampled chart points together with everything evaluated at them.
#[derive(Debug, Clone)]
pub struct Sample {
    pub seed: u64,
    pub coords: Vec<Vec<f64>>,
    pub points: Vec<Result<AcmsPoint, GeometryError>>,
}

impl Sample {
    pub fn new(model: &AcmsField, count: usize, seed: u64) -> Self {
        Self::from_coords(model, model.sample_points(count, seed), seed)
    }

    pub fn from_coords(model: &AcmsField, coords: Vec<Vec<f64>>, seed: u64) -> Self {
        let points = parallel::map(&coords, |x| model.point(x));
        Self { seed, coords, points }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// The first point that failed to evaluate.
    pub fn first_error(&self) -> Option<(&[f64], &GeometryError)> {
        self.coords
            .iter()
            .zip(&self.points)
            .find_map(|(x, p)| p.as_ref().err().map(|e| (x.as_slice(), e)))
    }

    fn evaluated(&self) -> Vec<&AcmsPoint> {
        self.points.iter().filter_map(|p| p.as_ref().ok()).collect()
    }
}

/// Outcome of the nearly Sasakian precondition.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub passed: bool,
    pub reason: Option<String>,
    pub point: Option<Vec<f64>>,
}

pub fn gate(model: &AcmsField, sample: &Sample, tol: f64) -> Gate {
    if let Some((x, e)) = sample.first_error() {
        return Gate {
            passed: false,
            reason: Some(e.to_string()),
            point: Some(x.to_vec()),
        };
    }
    let v = validate_acms(model, &sample.coords, sample.seed, tol);
    if !v.passed() {
        let failing: Vec<&str> = v
            .residuals
            .iter()
            .filter(|r| !r.passed)
            .map(|r| r.name.as_str())
            .chain(v.observations.iter().filter(|o| !o.satisfied).map(|o| o.name.as_str()))
            .collect();
        return Gate {
            passed: false,
            reason: Some(format!("not an almost contact metric structure: {}", failing.join(", "))),
            point: None,
        };
    }
    for p in sample.evaluated() {
        let d = vanishing(&p.nearly_sasakian_defect());
        if d >= tol {
            return Gate {
                passed: false,
                reason: Some(format!("not nearly Sasakian: defect {d:.3e} ≥ {tol:.1e}")),
                point: Some(p.x.clone()),
            };
        }
    }
    Gate {
        passed: true,
        reason: None,
        point: None,
    }
}

/// Per-point measurements, merged into a report in point order.
#[derive(Debug, Clone, Default)]
pub(crate) struct Measurements {
    residuals: Vec<(&'static str, f64, Option<f64>)>,
    observations: Vec<(&'static str, f64, Requirement)>,
    notes: Vec<String>,
}

impl Measurements {
    pub(crate) fn residual(&mut self, name: &'static str, v: f64) {
        self.residuals.push((name, v, None));
    }

    pub(crate) fn residual_with(&mut self, name: &'static str, v: f64, tol: f64) {
        self.residuals.push((name, v, Some(tol)));
    }

    pub(crate) fn observe(&mut self, name: &'static str, v: f64, req: Requirement) {
        self.observations.push((name, v, req));
    }

    pub(crate) fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    fn merge_into(self, b: &mut ReportBuilder) {
        for (name, v, tol) in self.residuals {
            match tol {
                Some(t) => b.residual_with(name, v, t),
                None => b.residual(name, v),
            }
        }
        for (name, v, req) in self.observations {
            b.observe(name, v, req);
        }
        for n in self.notes {
            b.note(n);
        }
    }
}

fn over_points<F>(b: &mut ReportBuilder, pts: &[&AcmsPoint], f: F)
where
    F: Fn(&AcmsPoint) -> Measurements + Sync + Send,
{
    for m in parallel::map(pts, |p| f(p)) {
        m.merge_into(b);
    }
}

/// Runs one check on a model at the sampled points.
pub fn run_check(id: CheckId, model: &AcmsField, sample: &Sample, tol: f64, options: CheckOptions) -> CheckReport {
    let mut b = ReportBuilder::new(id.name(), model.id(), sample.len(), sample.seed, tol);
    if id == CheckId::LefschetzInjectivity {
        forms::lefschetz(&mut b, sample.seed);
        return b.finish();
    }
    if let Some((x, e)) = sample.first_error() {
        return b.error(e.to_string(), Some(x.to_vec()));
    }
    if id.gated() {
        let g = gate(model, sample, tol);
        if !g.passed {
            let reason = format!("precondition failed: {}", g.reason.unwrap_or_default());
            if options.enforce_gate {
                return b.error(reason, g.point);
            }
            b.note(format!("{reason} (gate disabled)"));
        }
    }
    if id.riemannian_only() && !model.is_riemannian() {
        return b.skip("needs a positive definite metric");
    }
    let pts = sample.evaluated();
    match id {
        CheckId::EasyFacts => over_points(&mut b, &pts, algebraic::easy_facts),
        CheckId::IphiRiem => over_points(&mut b, &pts, algebraic::iphi_riem),
        CheckId::CurvatureReeb => over_points(&mut b, &pts, algebraic::curvature_reeb),
        CheckId::SecondOrderPhi => over_points(&mut b, &pts, algebraic::second_order_phi),
        CheckId::MainishFormula => over_points(&mut b, &pts, algebraic::mainish),
        CheckId::StrangeForms => over_points(&mut b, &pts, forms::strange),
        CheckId::ImageKernelCases => {
            over_points(&mut b, &pts, algebraic::image_kernel);
            algebraic::image_kernel_notes(&mut b);
        }
        CheckId::CharpolyConstancy => spectral::charpoly(&mut b, &pts, model.is_riemannian()),
        CheckId::Contactness => {
            over_points(&mut b, &pts, spectral::contactness);
            if let Some(p) = pts.first() {
                b.spectrum(spectral::spectrum(p));
            }
        }
        CheckId::Eigenbundles => over_points(&mut b, &pts, spectral::eigenbundles),
        CheckId::MainTheoremMechanism => {
            if model.dim() < 5 {
                return b.skip(format!("dimension {} is below the range of the argument", model.dim()));
            }
            over_points(&mut b, &pts, forms::main_theorem);
            if model.dim() < 7 {
                return b.skip_with_measurements(format!(
                    "dimension {} < 7: L_dη has a kernel on Λ², so dη∧Ψ = 0 does not force Ψ = 0",
                    model.dim()
                ));
            }
        }
        CheckId::LefschetzInjectivity => unreachable!("handled above"),
    }
    b.finish()
}

/// Runs several checks on one shared sample.
pub fn run_checks(ids: &[CheckId], model: &AcmsField, sample: &Sample, tol: f64, options: CheckOptions) -> Vec<CheckReport> {
    ids.iter().map(|&id| run_check(id, model, sample, tol, options)).collect()
}

#[cfg(test)]
mod tests;
