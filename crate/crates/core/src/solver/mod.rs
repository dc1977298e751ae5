//! Validity checking through an external SMT-LIB 2 solver.

mod model;
mod process;
mod smtlib;

pub use model::parse_model;
pub use process::{
    check_validity, run_script, verdict_of, Answer, InputMode, SolverConfig, SolverQuery, SolverRun, SolverVerdict,
    DEFAULT_SOLVER, DEFAULT_TIMEOUT_MS, SOLVER_ENV,
};
pub use smtlib::{formula as smt_formula, real_literal, symbol, term as smt_term, to_smtlib, validity_script};
