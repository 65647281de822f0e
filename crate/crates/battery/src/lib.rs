//! The acceptance battery: eleven criteria, each a list of numeric checks
//! against a tolerance, plus a runtime budget where one applies.

mod criteria;

use serde::{Deserialize, Serialize};
use std::time::Instant;

/// One numeric comparison inside a criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub label: String,
    /// Observed deviation (or the failure message when `value` is NaN).
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub elapsed_s: f64,
    pub budget_s: Option<f64>,
    pub checks: Vec<Check>,
}

impl CriterionOutcome {
    /// First failing check, for one-line summaries.
    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    /// Largest value/tolerance ratio over the checks.
    pub fn worst_ratio(&self) -> f64 {
        self.checks
            .iter()
            .map(|c| if c.value.is_nan() { f64::INFINITY } else { c.value / c.tolerance })
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub seed: u64,
    pub passed: bool,
    pub criteria: Vec<CriterionOutcome>,
}

/// Accumulates checks for one criterion.
#[derive(Debug, Default)]
pub struct Checks {
    items: Vec<Check>,
}

impl Checks {
    /// Passes when `value ≤ tol`.
    pub fn le(&mut self, label: impl Into<String>, value: f64, tol: f64) {
        self.items.push(Check { label: label.into(), value, tolerance: tol, passed: value <= tol, note: None });
    }

    /// Boolean condition, recorded as deviation 0 or 1 against tolerance 0.
    pub fn holds(&mut self, label: impl Into<String>, ok: bool) {
        self.items.push(Check { label: label.into(), value: if ok { 0.0 } else { 1.0 }, tolerance: 0.0, passed: ok, note: None });
    }

    /// An operation that errored where a value was expected.
    pub fn error(&mut self, label: impl Into<String>, err: impl std::fmt::Display) {
        self.items.push(Check { label: label.into(), value: f64::NAN, tolerance: 0.0, passed: false, note: Some(err.to_string()) });
    }

    /// Keeps the worst `value` per label: many samples, one line.
    pub fn worst(&mut self, label: &str, value: f64, tol: f64) {
        if let Some(c) = self.items.iter_mut().find(|c| c.label == label) {
            if !(value <= c.value) {
                c.value = value;
                c.passed = value <= tol;
            }
        } else {
            self.le(label, value, tol);
        }
    }
}

type CriterionFn = fn(u64, &mut Checks);

/// (id, name, runtime budget in seconds, body)
pub const CRITERIA: [(u8, &str, Option<f64>, CriterionFn); 11] = [
    (1, "special-function anchors", Some(1.0), criteria::special_functions),
    (2, "principal-value identities", Some(30.0), criteria::principal_values),
    (3, "Kelvin integral identities", Some(30.0), criteria::kelvin_integrals),
    (4, "unitarity battery", None, criteria::unitarity),
    (5, "flow group law", None, criteria::flow_group_law),
    (6, "propagator consistency", None, criteria::propagator_consistency),
    (7, "resolvent triangle", Some(300.0), criteria::resolvent_triangle),
    (8, "spectral closed forms", None, criteria::spectral_closed_forms),
    (9, "scattering", Some(120.0), criteria::scattering),
    (10, "classical dynamics", Some(60.0), criteria::classical_dynamics),
    (11, "domain diagnostics", None, criteria::domain_diagnostics),
];

pub fn run_criterion(id: u8, seed: u64) -> Option<CriterionOutcome> {
    let &(id, name, budget, f) = CRITERIA.iter().find(|c| c.0 == id)?;
    let start = Instant::now();
    let mut checks = Checks::default();
    f(seed, &mut checks);
    let elapsed = start.elapsed().as_secs_f64();
    if let Some(b) = budget {
        checks.le("runtime [s]", elapsed, b);
    }
    let passed = !checks.items.is_empty() && checks.items.iter().all(|c| c.passed);
    Some(CriterionOutcome { id, name: name.to_string(), passed, elapsed_s: elapsed, budget_s: budget, checks: checks.items })
}

/// Runs every criterion in order; `on_done` sees each outcome as it completes.
pub fn run_all(seed: u64, mut on_done: impl FnMut(&CriterionOutcome)) -> Report {
    let mut criteria = Vec::with_capacity(CRITERIA.len());
    for c in CRITERIA.iter() {
        let out = run_criterion(c.0, seed).expect("listed criterion");
        on_done(&out);
        criteria.push(out);
    }
    Report { seed, passed: criteria.iter().all(|c| c.passed), criteria }
}

/// `PASS [ 1] special-function anchors (0.01 s)` or FAIL with the first failing check.
pub fn summary_line(c: &CriterionOutcome) -> String {
    let head = format!("{} [{:2}] {} ({:.2} s)", if c.passed { "PASS" } else { "FAIL" }, c.id, c.name, c.elapsed_s);
    match c.first_failure() {
        None => head,
        Some(f) => match &f.note {
            Some(n) => format!("{head}: {}: {n}", f.label),
            None => format!("{head}: {} = {:.3e} > {:.1e}", f.label, f.value, f.tolerance),
        },
    }
}
