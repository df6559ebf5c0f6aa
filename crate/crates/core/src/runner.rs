//! Runs a selection of checks on one model and renders the reports.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::report::{CheckReport, Status};
use crate::verifier::{checks_catalogue, run_checks, CheckId, CheckOptions, Sample};
use crate::zoo::{self, ZooError};

pub const SCHEMA: &str = "sasakian-verify/report/v1";
pub const DEFAULT_POINTS: usize = 20;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub model: String,
    /// Check names; empty or `["all"]` selects every check.
    pub checks: Vec<String>,
    pub seed: u64,
    /// Falls back to the model's default tolerance.
    pub tol: Option<f64>,
    pub points: usize,
    pub format: OutputFormat,
    pub enforce_gate: bool,
}

impl RunConfig {
    pub fn new(model: impl Into<String>) -> Self {
        Self {
            model: model.into(),
            checks: vec!["all".into()],
            seed: DEFAULT_SEED,
            tol: None,
            points: DEFAULT_POINTS,
            format: OutputFormat::Text,
            enforce_gate: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RunError {
    #[error("unknown check {0:?} (see `list`)")]
    UnknownCheck(String),
    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),
    #[error("at least one sample point is required")]
    NoPoints,
    #[error(transparent)]
    Model(#[from] ZooError),
}

/// The outcome of a run: reports plus the configuration actually used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub schema: String,
    pub config: ResolvedConfig,
    pub reports: Vec<CheckReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedConfig {
    pub model: String,
    pub checks: Vec<String>,
    pub seed: u64,
    pub tol: f64,
    pub points: usize,
    pub enforce_gate: bool,
}

impl RunResult {
    /// `0` iff no check failed or errored.
    pub fn exit_code(&self) -> i32 {
        exit_code(&self.reports)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        render_text(self)
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Text => self.to_text(),
            OutputFormat::Json => self.to_json(),
        }
    }
}

pub fn exit_code(reports: &[CheckReport]) -> i32 {
    let bad = reports.iter().any(|r| matches!(r.status, Status::Fail | Status::Errored));
    i32::from(bad)
}

/// Resolves check names, rejecting unknown ones.
pub fn resolve_checks(names: &[String]) -> Result<Vec<CheckId>, RunError> {
    if names.is_empty() || names.iter().any(|n| n == "all") {
        return Ok(CheckId::ALL.to_vec());
    }
    let mut out = Vec::new();
    for name in names {
        let id = CheckId::parse(name).ok_or_else(|| RunError::UnknownCheck(name.clone()))?;
        if !out.contains(&id) {
            out.push(id);
        }
    }
    Ok(out)
}

pub fn run(cfg: &RunConfig) -> Result<RunResult, RunError> {
    let model = zoo::model(&cfg.model)?;
    let ids = resolve_checks(&cfg.checks)?;
    if cfg.points == 0 {
        return Err(RunError::NoPoints);
    }
    let tol = cfg.tol.unwrap_or(model.default_tolerance());
    if !(tol.is_finite() && tol > 0.0) {
        return Err(RunError::BadTolerance(tol));
    }
    let sample = Sample::new(&model, cfg.points, cfg.seed);
    let options = CheckOptions {
        enforce_gate: cfg.enforce_gate,
    };
    let reports = run_checks(&ids, &model, &sample, tol, options);
    Ok(RunResult {
        schema: SCHEMA.to_string(),
        config: ResolvedConfig {
            model: model.id().to_string(),
            checks: ids.iter().map(|c| c.name().to_string()).collect(),
            seed: cfg.seed,
            tol,
            points: cfg.points,
            enforce_gate: cfg.enforce_gate,
        },
        reports,
    })
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
        Status::Skipped => "SKIP",
        Status::Errored => "ERROR",
    }
}

fn render_text(r: &RunResult) -> String {
    let c = &r.config;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "model {}  points {}  seed {}  tol {:.1e}{}",
        c.model,
        c.points,
        c.seed,
        c.tol,
        if c.enforce_gate { "" } else { "  (gate disabled)" }
    );
    for rep in &r.reports {
        let _ = writeln!(
            out,
            "{:<6} {:<30} max residual {:.3e}",
            status_word(rep.status),
            rep.check,
            rep.max_residual()
        );
        for res in rep.residuals.iter().filter(|x| !x.passed) {
            let _ = writeln!(out, "         residual {} = {:.3e} (tol {:.1e})", res.name, res.value, res.tolerance);
        }
        for o in rep.observations.iter().filter(|o| !o.satisfied) {
            let _ = writeln!(out, "         observation {} = {} violates {:?}", o.name, o.value, o.requirement);
        }
        for n in &rep.notes {
            let _ = writeln!(out, "         note: {n}");
        }
        if let Some(p) = &rep.errored_point {
            let _ = writeln!(out, "         at point {p:?}");
        }
    }
    let counts = |s: Status| r.reports.iter().filter(|x| x.status == s).count();
    let _ = writeln!(
        out,
        "{} passed, {} failed, {} errored, {} skipped",
        counts(Status::Pass),
        counts(Status::Fail),
        counts(Status::Errored),
        counts(Status::Skipped)
    );
    out
}

/// Stable listing of models and checks.
pub fn list_models_and_checks() -> String {
    let mut out = String::from("models:\n");
    for m in zoo::catalogue() {
        let tag = if m.negative_control { " [negative control]" } else { "" };
        let _ = writeln!(out, "  {:<24} {}{}", m.id, m.description, tag);
    }
    let _ = writeln!(
        out,
        "  families: darboux-sasakian:n, darboux-perturbed:n, darboux-pseudo:n:signs (1 <= n <= {})",
        zoo::MAX_DARBOUX_N
    );
    out.push_str("checks:\n");
    for c in checks_catalogue() {
        let _ = writeln!(out, "  {:<30} {}", c.id, c.description);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(model: &str, checks: &[&str]) -> RunConfig {
        RunConfig {
            checks: checks.iter().map(|s| s.to_string()).collect(),
            points: 3,
            ..RunConfig::new(model)
        }
    }

    #[test]
    fn unknown_ids_are_rejected_before_computing() {
        assert!(matches!(run(&cfg("nope", &["all"])), Err(RunError::Model(ZooError::UnknownModel(_)))));
        assert!(matches!(
            run(&cfg("darboux-sasakian:2", &["check_nothing"])),
            Err(RunError::UnknownCheck(_))
        ));
        let mut c = cfg("darboux-sasakian:2", &["all"]);
        c.tol = Some(-1.0);
        assert!(matches!(run(&c), Err(RunError::BadTolerance(_))));
        c.tol = None;
        c.points = 0;
        assert!(matches!(run(&c), Err(RunError::NoPoints)));
    }

    #[test]
    fn json_is_deterministic_and_round_trips() {
        let c = cfg("s5-nearly-sasakian", &["check_easy_facts", "check_strange_forms"]);
        let a = run(&c).unwrap();
        let b = run(&c).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        let back: RunResult = serde_json::from_str(&a.to_json()).unwrap();
        assert_eq!(back, a);
        assert_eq!(back.schema, SCHEMA);
        assert_eq!(a.exit_code(), 0);
    }

    #[test]
    fn exit_code_reflects_failures() {
        let mut c = cfg("darboux-perturbed:2", &["check_easy_facts"]);
        assert_eq!(run(&c).unwrap().exit_code(), 1);
        c.enforce_gate = false;
        let r = run(&c).unwrap();
        assert_eq!(r.reports[0].status, Status::Fail);
        assert_eq!(r.exit_code(), 1);
        let skipped = run(&cfg("s5-nearly-sasakian", &["check_main_theorem_mechanism"])).unwrap();
        assert_eq!(skipped.reports[0].status, Status::Skipped);
        assert_eq!(skipped.exit_code(), 0);
    }

    #[test]
    fn duplicate_and_all_selections() {
        let ids = resolve_checks(&["check_easy_facts".into(), "check_easy_facts".into()]).unwrap();
        assert_eq!(ids, vec![CheckId::EasyFacts]);
        assert_eq!(resolve_checks(&[]).unwrap().len(), 12);
    }

    #[test]
    fn listing_is_stable_and_complete() {
        let l = list_models_and_checks();
        assert_eq!(l, list_models_and_checks());
        for m in zoo::catalogue() {
            assert!(l.contains(m.id));
        }
        for c in CheckId::ALL {
            assert!(l.contains(c.name()));
        }
    }

    #[test]
    fn text_output_names_every_check() {
        let r = run(&cfg("darboux-sasakian:1", &["all"])).unwrap();
        let t = r.to_text();
        for c in CheckId::ALL {
            assert!(t.contains(c.name()));
        }
    }
}
