//! Semantic evaluation of a candidate model against an expected solution.

use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::analysis::{split_assumptions, stasis_check, Polarity};
use crate::ir::{Formula, FreeVars};
use crate::solver::{check_validity, SolverConfig, SolverQuery, SolverVerdict, DEFAULT_TIMEOUT_MS};
use crate::symexec::{wp_box, wp_diamond, ToolFailureKind, ToolFailureReason};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckSpec {
    /// Modality-free.
    pub expected: Formula,
    pub min_writes: usize,
    /// Shared by every solver call of one check.
    pub timeout_ms: u64,
}

impl CheckSpec {
    pub fn new(expected: Formula, min_writes: usize) -> Self {
        CheckSpec { expected, min_writes, timeout_ms: DEFAULT_TIMEOUT_MS }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout_ms = timeout.as_millis().try_into().unwrap_or(u64::MAX);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailedStage {
    Shape,
    Stasis,
    AssumptionsUnsat,
    NotEquivalent,
}

impl FailedStage {
    pub fn as_str(self) -> &'static str {
        match self {
            FailedStage::Shape => "shape",
            FailedStage::Stasis => "stasis",
            FailedStage::AssumptionsUnsat => "assumptions_unsat",
            FailedStage::NotEquivalent => "not_equivalent",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum CheckVerdict {
    Success,
    Failed {
        stage: FailedStage,
        detail: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        counterexample: Option<BTreeMap<String, String>>,
    },
    Timeout {
        detail: String,
    },
    ToolFailure {
        reason: ToolFailureReason,
    },
}

/// The four result buckets, ordered worst to best. Tool failures and
/// timeouts share a rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Failed,
    Timeout,
    ToolFailure,
    Success,
}

impl Outcome {
    pub fn rank(self) -> u8 {
        match self {
            Outcome::Failed => 0,
            Outcome::Timeout | Outcome::ToolFailure => 1,
            Outcome::Success => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Failed => "failed",
            Outcome::Timeout => "timeout",
            Outcome::ToolFailure => "tool_failure",
            Outcome::Success => "success",
        }
    }

    pub fn parse(s: &str) -> Option<Outcome> {
        [Outcome::Failed, Outcome::Timeout, Outcome::ToolFailure, Outcome::Success].into_iter().find(|o| o.as_str() == s)
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl CheckVerdict {
    pub fn outcome(&self) -> Outcome {
        match self {
            CheckVerdict::Success => Outcome::Success,
            CheckVerdict::Failed { .. } => Outcome::Failed,
            CheckVerdict::Timeout { .. } => Outcome::Timeout,
            CheckVerdict::ToolFailure { .. } => Outcome::ToolFailure,
        }
    }

    pub fn is_success(&self) -> bool {
        matches!(self, CheckVerdict::Success)
    }

    /// `success`, `failed:<stage>`, `timeout` or `tool_failure:<kind>`.
    pub fn label(&self) -> String {
        match self {
            CheckVerdict::Success => "success".into(),
            CheckVerdict::Failed { stage, .. } => format!("failed:{}", stage.as_str()),
            CheckVerdict::Timeout { .. } => "timeout".into(),
            CheckVerdict::ToolFailure { reason } => format!("tool_failure:{}", reason.kind),
        }
    }
}

impl fmt::Display for CheckVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Failure tags used in reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureTag {
    OptimizationBlowup,
    NonPolynomial,
    ComplicatedDynamics,
    Other,
}

impl FailureTag {
    pub fn as_str(self) -> &'static str {
        match self {
            FailureTag::OptimizationBlowup => "optimization-blowup",
            FailureTag::NonPolynomial => "non-polynomial",
            FailureTag::ComplicatedDynamics => "complicated-dynamics",
            FailureTag::Other => "other",
        }
    }
}

pub fn classify_tool_failure(reason: &ToolFailureReason) -> FailureTag {
    match reason.kind {
        ToolFailureKind::NonPolynomialRhs | ToolFailureKind::DivisionInOde => FailureTag::NonPolynomial,
        ToolFailureKind::NonSolvableOde => FailureTag::ComplicatedDynamics,
        ToolFailureKind::LoopUnsupported | ToolFailureKind::Other => FailureTag::Other,
    }
}

/// Report tag for a verdict; `None` unless it is a tool failure or timeout.
/// Timeouts on benchmarks tagged `optimization` count as optimization blowup.
pub fn failure_tag(verdict: &CheckVerdict, bench_tags: &[String]) -> Option<FailureTag> {
    match verdict {
        CheckVerdict::ToolFailure { reason } => Some(classify_tool_failure(reason)),
        CheckVerdict::Timeout { .. } if bench_tags.iter().any(|t| t == "optimization") => {
            Some(FailureTag::OptimizationBlowup)
        }
        CheckVerdict::Timeout { .. } => Some(FailureTag::ComplicatedDynamics),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: String,
    pub status: String,
    pub millis: u64,
    pub detail: String,
}

/// Solver answers for the two directions of a failed equivalence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Directional {
    /// `A -> (expected -> wp)`
    pub expected_implies_wp: SolverVerdict,
    /// `A -> (wp -> expected)`
    pub wp_implies_expected: SolverVerdict,
    /// `A -> wp`: the model wins regardless of the answer.
    pub wp_valid_standalone: SolverVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub verdict: CheckVerdict,
    pub trace: Vec<StageRecord>,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub directional: Option<Directional>,
    /// The weakest precondition of the modal core, printed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wp: Option<String>,
}

impl CheckReport {
    /// One JSON object per line, one line per stage.
    pub fn trace_jsonl(&self) -> String {
        self.trace.iter().map(|r| serde_json::to_string(r).expect("plain record") + "\n").collect()
    }
}

#[derive(Debug, Clone)]
pub struct Checker {
    pub solver: SolverConfig,
    /// Run the directional queries after a failed equivalence.
    pub directional: bool,
}

struct Trace {
    records: Vec<StageRecord>,
    mark: Instant,
}

impl Trace {
    fn record(&mut self, stage: &str, status: &str, detail: impl Into<String>) {
        let now = Instant::now();
        let millis = now.duration_since(self.mark).as_millis().try_into().unwrap_or(u64::MAX);
        self.mark = now;
        self.records.push(StageRecord { stage: stage.into(), status: status.into(), millis, detail: detail.into() });
    }
}

fn solver_status(v: &SolverVerdict) -> &'static str {
    match v {
        SolverVerdict::Valid => "valid",
        SolverVerdict::Invalid { .. } => "invalid",
        SolverVerdict::Unknown => "unknown",
        SolverVerdict::TimedOut => "timeout",
        SolverVerdict::ProcessError { .. } => "error",
    }
}

fn solver_trouble(v: &SolverVerdict) -> Option<CheckVerdict> {
    match v {
        SolverVerdict::Unknown => Some(CheckVerdict::Timeout { detail: "solver answered unknown".into() }),
        SolverVerdict::TimedOut => Some(CheckVerdict::Timeout { detail: "time budget exhausted".into() }),
        SolverVerdict::ProcessError { detail } => Some(CheckVerdict::ToolFailure {
            reason: ToolFailureReason::new(ToolFailureKind::Other, format!("solver error: {detail}")),
        }),
        _ => None,
    }
}

impl Checker {
    pub fn new(solver: SolverConfig) -> Self {
        Checker { solver, directional: true }
    }

    fn query(&self, goal: Formula, deadline: Instant) -> SolverVerdict {
        let left = deadline.saturating_duration_since(Instant::now());
        if left.is_zero() {
            return SolverVerdict::TimedOut;
        }
        check_validity(&self.solver, &SolverQuery::new(goal).with_timeout(left))
    }

    pub fn check(&self, model: &Formula, spec: &CheckSpec) -> CheckReport {
        let mut trace = Trace { records: Vec::new(), mark: Instant::now() };
        let mut report = CheckReport { verdict: CheckVerdict::Success, trace: Vec::new(), warnings: Vec::new(), directional: None, wp: None };
        report.verdict = self.run(model, spec, &mut trace, &mut report);
        report.trace = trace.records;
        report
    }

    fn run(&self, model: &Formula, spec: &CheckSpec, trace: &mut Trace, report: &mut CheckReport) -> CheckVerdict {
        let missing: Vec<_> = spec.expected.free_vars().difference(&model.free_vars()).map(|v| v.to_string()).collect();
        if !missing.is_empty() {
            report.warnings.push(format!("expected solution mentions variables absent from the model: {}", missing.join(", ")));
        }

        let split = match split_assumptions(model) {
            Ok(s) => s,
            Err(e) => {
                trace.record("shape", "fail", e.to_string());
                return CheckVerdict::Failed { stage: FailedStage::Shape, detail: e.to_string(), counterexample: None };
            }
        };
        trace.record("shape", "pass", format!("{} assumption(s)", split.assumption_list.len()));

        match stasis_check(&split.game, spec.min_writes) {
            Ok(written) => {
                let names: Vec<_> = written.iter().map(|v| v.as_str()).collect();
                trace.record("stasis", "pass", format!("writes {}", names.join(", ")));
            }
            Err(e) => {
                trace.record("stasis", "fail", e.to_string());
                return CheckVerdict::Failed { stage: FailedStage::Stasis, detail: e.to_string(), counterexample: None };
            }
        }

        let deadline = Instant::now() + Duration::from_millis(spec.timeout_ms);
        let assumptions = split.assumptions();
        let sat = self.query(Formula::not(assumptions.clone()), deadline);
        trace.record("assumptions", solver_status(&sat), "validity of the negated assumptions");
        if let Some(v) = solver_trouble(&sat) {
            return v;
        }
        if sat.is_valid() {
            return CheckVerdict::Failed {
                stage: FailedStage::AssumptionsUnsat,
                detail: "the assumptions are unsatisfiable".into(),
                counterexample: None,
            };
        }

        let wp = match split.polarity {
            Polarity::Diamond => wp_diamond(&split.game, &split.post),
            Polarity::Box => wp_box(&split.game, &split.post),
        };
        let wp = match wp {
            Ok(wp) => wp,
            Err(reason) => {
                trace.record("wp", "tool_failure", reason.to_string());
                return CheckVerdict::ToolFailure { reason };
            }
        };
        report.wp = Some(crate::parser::print_formula(&wp));
        trace.record("wp", "pass", if split.polarity == Polarity::Diamond { "diamond" } else { "box" });

        let goal = Formula::imply(assumptions.clone(), Formula::equiv(spec.expected.clone(), wp.clone()));
        let eq = self.query(goal, deadline);
        trace.record("equivalence", solver_status(&eq), "assumptions -> (expected <-> wp)");
        if let Some(v) = solver_trouble(&eq) {
            return v;
        }
        match eq {
            SolverVerdict::Valid => CheckVerdict::Success,
            SolverVerdict::Invalid { counterexample } => {
                let mut detail = "the weakest precondition is not equivalent to the expected solution".to_string();
                if self.directional {
                    let dir = self.directional(&assumptions, &spec.expected, &wp, deadline);
                    trace.record(
                        "directional",
                        "done",
                        format!(
                            "expected->wp: {}, wp->expected: {}, wp alone: {}",
                            solver_status(&dir.expected_implies_wp),
                            solver_status(&dir.wp_implies_expected),
                            solver_status(&dir.wp_valid_standalone)
                        ),
                    );
                    if dir.wp_valid_standalone.is_valid() {
                        detail.push_str("; the model is won regardless of the expected solution");
                    } else if dir.expected_implies_wp.is_valid() {
                        detail.push_str("; the model admits answers other than the expected one");
                    } else if dir.wp_implies_expected.is_valid() {
                        detail.push_str("; the model cannot be won for some instances of the expected solution");
                    }
                    report.directional = Some(dir);
                }
                CheckVerdict::Failed { stage: FailedStage::NotEquivalent, detail, counterexample }
            }
            _ => unreachable!("handled above"),
        }
    }

    fn directional(&self, a: &Formula, expected: &Formula, wp: &Formula, deadline: Instant) -> Directional {
        let under = |f: Formula| Formula::imply(a.clone(), f);
        Directional {
            expected_implies_wp: self.query(under(Formula::imply(expected.clone(), wp.clone())), deadline),
            wp_implies_expected: self.query(under(Formula::imply(wp.clone(), expected.clone())), deadline),
            wp_valid_standalone: self.query(under(wp.clone()), deadline),
        }
    }
}

/// Checks with the solver taken from the environment.
pub fn check(model: &Formula, spec: &CheckSpec) -> CheckVerdict {
    Checker::new(SolverConfig::from_env()).check(model, spec).verdict
}
