mod common;

use std::time::Duration;

use common::*;
use dglform::bench::BenchStore;
use dglform::checker::{CheckSpec, CheckVerdict, Checker};
use dglform::ir::Formula;
use dglform::parser::parse_formula;

fn checker() -> Option<Checker> {
    solver().map(Checker::new)
}

fn mean_velocity_spec() -> CheckSpec {
    CheckSpec::new(parse_formula(&fixture_text("mean_velocity.expected")).unwrap(), 2)
}

fn model(name: &str) -> Formula {
    parse_formula(&fixture_text(name)).unwrap()
}

#[test]
fn exploit_then_repair() {
    let Some(c) = checker() else { return };
    let spec = mean_velocity_spec();
    for _ in 0..3 {
        let first = c.check(&model("model1.dgl"), &spec);
        assert_eq!(first.verdict.label(), "failed:not_equivalent");
        let dir = first.directional.expect("directional diagnostics");
        assert!(dir.wp_valid_standalone.is_valid());
        assert!(dir.expected_implies_wp.is_valid());
        let second = c.check(&model("model2.dgl"), &spec);
        assert_eq!(second.verdict, CheckVerdict::Success);
    }
}

#[test]
fn success_runs_every_stage() {
    let Some(c) = checker() else { return };
    let r = c.check(&model("model2.dgl"), &mean_velocity_spec());
    let stages: Vec<_> = r.trace.iter().map(|s| (s.stage.as_str(), s.status.as_str())).collect();
    assert_eq!(
        stages,
        [("shape", "pass"), ("stasis", "pass"), ("assumptions", "invalid"), ("wp", "pass"), ("equivalence", "valid")]
    );
    for line in r.trace_jsonl().lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        for key in ["stage", "status", "millis", "detail"] {
            assert!(v.get(key).is_some());
        }
    }
}

#[test]
fn dropping_the_assumptions_breaks_equivalence() {
    let Some(c) = checker() else { return };
    let text = fixture_text("model2.dgl");
    let without = text.replace("(dh > 0 & v0 > 0 & v1 + v2 > 0) ->", "");
    let r = c.check(&parse_formula(&without).unwrap(), &mean_velocity_spec());
    assert_eq!(r.verdict.label(), "failed:not_equivalent");
}

#[test]
fn stasis_and_tool_failures() {
    let Some(c) = checker() else { return };
    let r = c.check(&model("stasis.dgl"), &mean_velocity_spec());
    assert_eq!(r.verdict.label(), "failed:stasis");
    let spec = CheckSpec::new(parse_formula("T >= 0").unwrap(), 1);
    assert_eq!(c.check(&model("sqrt_ode.dgl"), &spec).verdict.label(), "tool_failure:non_polynomial_rhs");
    let spec = CheckSpec::new(parse_formula("n >= 0").unwrap(), 1);
    assert_eq!(c.check(&model("loop.dgl"), &spec).verdict.label(), "tool_failure:loop_unsupported");
    let spec = mean_velocity_spec().with_timeout(Duration::from_millis(1));
    assert_eq!(c.check(&model("model2.dgl"), &spec).verdict.label(), "timeout");
}

#[test]
fn shipped_reference_models_pass_and_wrong_answers_fail() {
    let Some(c) = checker() else { return };
    let store = BenchStore::load(&repo_root().join("benchmarks")).unwrap();
    assert_eq!(store.benchmarks.len(), 5);
    assert_eq!(store.fewshot.len(), 4);
    for b in &store.benchmarks {
        let reference = model(&format!("reference/{}.dgl", b.id));
        let spec = b.check_spec(Duration::from_secs(60)).unwrap();
        assert_eq!(c.check(&reference, &spec).verdict, CheckVerdict::Success, "{}", b.id);
        // Scaling the answer by two must be rejected.
        let Formula::Cmp(lhs, rel, rhs) = spec.expected.clone() else { continue };
        let wrong = Formula::Cmp(lhs, rel, dglform::ir::Term::mul(dglform::ir::Term::int(2), rhs));
        let wrong_spec = CheckSpec { expected: wrong, ..spec };
        assert_eq!(c.check(&reference, &wrong_spec).verdict.label(), "failed:not_equivalent", "{}", b.id);
    }
    for ex in &store.fewshot {
        let reference = parse_formula(ex.reference_model.as_deref().unwrap()).unwrap();
        let spec = ex.check_spec(Duration::from_secs(60)).unwrap();
        assert_eq!(c.check(&reference, &spec).verdict, CheckVerdict::Success, "{}", ex.id);
    }
}

#[test]
fn verdict_json_round_trip() {
    let verdicts = [
        CheckVerdict::Success,
        CheckVerdict::Timeout { detail: "t".into() },
        CheckVerdict::Failed {
            stage: dglform::checker::FailedStage::NotEquivalent,
            detail: "d".into(),
            counterexample: Some([("x".to_string(), "1/2".to_string())].into()),
        },
    ];
    for v in verdicts {
        let json = serde_json::to_string(&v).unwrap();
        assert_eq!(serde_json::from_str::<CheckVerdict>(&json).unwrap(), v);
    }
}
