//! SMT-LIB scripts for validity queries, and a round trip through the solver
//! when one is installed.

use std::collections::BTreeSet;

use dglform::parser::parse_formula;
use dglform::solver::{check_validity, validity_script, SolverConfig, SolverQuery};

fn main() {
    let goals = [
        "\\forall x (x^2 >= 0)",
        "x > 0 -> x/3 + 2*x/3 = x",
        "y >= -2.5 | y < -2.5",
        "x^2 = 2",
    ];
    let solver = SolverConfig::from_env();
    let available = solver.is_available();
    for src in goals {
        let f = parse_formula(src).unwrap();
        println!("; {src}\n{}", validity_script(&f, &BTreeSet::new()));
        if available {
            println!("; => {:?}\n", check_validity(&solver, &SolverQuery::new(f)));
        }
    }
}
