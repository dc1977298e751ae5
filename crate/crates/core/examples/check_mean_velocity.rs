//! The mean velocity problem: a first model that assigns the half distance
//! is won trivially and gets rejected; the repaired model is accepted.
//!
//! Needs z3 on PATH (or `DGL_SOLVER`).

use std::path::PathBuf;

use dglform::checker::{CheckSpec, Checker};
use dglform::parser::parse_formula;
use dglform::solver::SolverConfig;

fn fixture(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    std::fs::read_to_string(path).unwrap()
}

fn main() {
    let solver = SolverConfig::from_env();
    if !solver.is_available() {
        eprintln!("no SMT solver found");
        std::process::exit(1);
    }
    let checker = Checker::new(solver);
    let expected = parse_formula(&fixture("mean_velocity.expected")).unwrap();
    let spec = CheckSpec::new(expected, 2);

    for name in ["model1.dgl", "model2.dgl"] {
        let model = parse_formula(&fixture(name)).unwrap();
        let report = checker.check(&model, &spec);
        println!("{name}: {}", report.verdict);
        for stage in &report.trace {
            println!("  {:<12} {:<8} {:>5} ms  {}", stage.stage, stage.status, stage.millis, stage.detail);
        }
        if let Some(d) = &report.directional {
            println!("  expected -> wp: {:?}", d.expected_implies_wp);
            println!("  wp -> expected: {:?}", d.wp_implies_expected);
            println!("  wp alone:       {:?}", d.wp_valid_standalone);
        }
    }
}
