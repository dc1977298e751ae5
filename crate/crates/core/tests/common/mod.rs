//! Shared helpers for the integration tests: fixture paths, random syntax
//! generators and a reference evaluator for loop-free, ODE-free games.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use dglform::ir::{ident, Formula, Game, Ident, Numeral, OdeEquation, Rel, Term};
use dglform::solver::SolverConfig;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

pub fn repo_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn fixture(name: &str) -> PathBuf {
    repo_root().join("fixtures").join(name)
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).expect("fixture present")
}

pub fn solver() -> Option<SolverConfig> {
    let c = SolverConfig::from_env();
    if c.is_available() {
        Some(c)
    } else {
        eprintln!("no SMT solver available; skipping solver-dependent checks");
        None
    }
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

const NAMES: &[&str] = &["x", "y", "z", "v0", "t_h", "dvavg", "a1", "T"];

fn pick<'a, T>(r: &mut StdRng, items: &'a [T]) -> &'a T {
    &items[r.random_range(0..items.len())]
}

pub fn random_numeral(r: &mut StdRng) -> Numeral {
    let lit = match r.random_range(0..4) {
        0 => format!("{}", r.random_range(0..10)),
        1 => format!("{}", r.random_range(0..1000)),
        2 => format!("{}.{}", r.random_range(0..10), r.random_range(0..100)),
        _ => format!("0.{:03}", r.random_range(0..1000)),
    };
    Numeral::from_decimal(&lit).expect("decimal literal")
}

/// Arbitrary term, any constructor.
pub fn random_term(r: &mut StdRng, depth: u32) -> Term {
    if depth == 0 || r.random_bool(0.3) {
        return if r.random_bool(0.6) { Term::Var(ident(pick(r, NAMES))) } else { Term::Num(random_numeral(r)) };
    }
    let d = depth - 1;
    match r.random_range(0..7) {
        0 => Term::neg(random_term(r, d)),
        1 => Term::add(random_term(r, d), random_term(r, d)),
        2 => Term::sub(random_term(r, d), random_term(r, d)),
        3 => Term::mul(random_term(r, d), random_term(r, d)),
        4 => Term::div(random_term(r, d), random_term(r, d)),
        5 => Term::pow(random_term(r, d), r.random_range(0..5)),
        _ => Term::Var(ident(pick(r, NAMES))),
    }
}

/// Arbitrary formula over every constructor, modalities included.
pub fn random_formula(r: &mut StdRng, depth: u32) -> Formula {
    if depth == 0 || r.random_bool(0.2) {
        return match r.random_range(0..6) {
            0 => Formula::True,
            1 => Formula::False,
            _ => Formula::Cmp(random_term(r, 2), *pick(r, &Rel::ALL), random_term(r, 2)),
        };
    }
    let d = depth - 1;
    let b = |f: Formula| Box::new(f);
    match r.random_range(0..11) {
        0 => Formula::Not(b(random_formula(r, d))),
        1 => Formula::And(b(random_formula(r, d)), b(random_formula(r, d))),
        2 => Formula::Or(b(random_formula(r, d)), b(random_formula(r, d))),
        3 => Formula::Imply(b(random_formula(r, d)), b(random_formula(r, d))),
        4 => Formula::Equiv(b(random_formula(r, d)), b(random_formula(r, d))),
        5 => Formula::Forall(ident(pick(r, NAMES)), b(random_formula(r, d))),
        6 => Formula::Exists(ident(pick(r, NAMES)), b(random_formula(r, d))),
        7 => Formula::Diamond(Box::new(random_game(r, d)), b(random_formula(r, d))),
        8 => Formula::Box(Box::new(random_game(r, d)), b(random_formula(r, d))),
        _ => Formula::Cmp(random_term(r, 3), *pick(r, &Rel::ALL), random_term(r, 3)),
    }
}

pub fn random_game(r: &mut StdRng, depth: u32) -> Game {
    let d = depth.saturating_sub(1);
    let b = |g: Game| Box::new(g);
    let atomic = depth == 0 || r.random_bool(0.3);
    match if atomic { r.random_range(0..4) } else { r.random_range(0..8) } {
        0 => Game::Assign(ident(pick(r, NAMES)), random_term(r, 2)),
        1 => Game::AssignAny(ident(pick(r, NAMES))),
        2 => Game::Test(random_formula(r, d.min(2))),
        3 => {
            let n = r.random_range(1..=3);
            let mut vars: Vec<&str> = NAMES.to_vec();
            let mut eqs = Vec::new();
            for _ in 0..n {
                let i = r.random_range(0..vars.len());
                eqs.push(OdeEquation { var: ident(vars.remove(i)), rhs: random_term(r, 2) });
            }
            let domain = if r.random_bool(0.5) { Formula::True } else { random_formula(r, 1) };
            Game::Ode(eqs, domain)
        }
        4 => Game::Seq(b(random_game(r, d)), b(random_game(r, d))),
        5 => Game::Choice(b(random_game(r, d)), b(random_game(r, d))),
        6 => Game::Loop(b(random_game(r, d))),
        _ => Game::Dual(b(random_game(r, d))),
    }
}

// ---- reference semantics over exact rationals ----

pub type State = BTreeMap<Ident, BigRational>;

pub fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `None` on division by zero.
pub fn eval_term(t: &Term, s: &State) -> Option<BigRational> {
    Some(match t {
        Term::Var(x) => s.get(x).cloned().unwrap_or_else(BigRational::zero),
        Term::Num(n) => n.value().clone(),
        Term::Neg(a) => -eval_term(a, s)?,
        Term::Add(a, b) => eval_term(a, s)? + eval_term(b, s)?,
        Term::Sub(a, b) => eval_term(a, s)? - eval_term(b, s)?,
        Term::Mul(a, b) => eval_term(a, s)? * eval_term(b, s)?,
        Term::Div(a, b) => {
            let d = eval_term(b, s)?;
            if d.is_zero() {
                return None;
            }
            eval_term(a, s)? / d
        }
        Term::Pow(a, n) => {
            let base = eval_term(a, s)?;
            (0..*n).fold(BigRational::one(), |acc, _| acc * &base)
        }
    })
}

/// Quantifier- and modality-free formulas only.
pub fn eval_formula(f: &Formula, s: &State) -> Option<bool> {
    Some(match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Cmp(a, rel, b) => {
            let (a, b) = (eval_term(a, s)?, eval_term(b, s)?);
            match rel {
                Rel::Eq => a == b,
                Rel::Ne => a != b,
                Rel::Lt => a < b,
                Rel::Le => a <= b,
                Rel::Gt => a > b,
                Rel::Ge => a >= b,
            }
        }
        Formula::Not(a) => !eval_formula(a, s)?,
        Formula::And(a, b) => eval_formula(a, s)? && eval_formula(b, s)?,
        Formula::Or(a, b) => eval_formula(a, s)? || eval_formula(b, s)?,
        Formula::Imply(a, b) => !eval_formula(a, s)? || eval_formula(b, s)?,
        Formula::Equiv(a, b) => eval_formula(a, s)? == eval_formula(b, s)?,
        other => panic!("reference evaluator cannot handle {other:?}"),
    })
}

/// Whether Angel wins `g` from `s` when the continuation `k` decides the
/// end states. `angel` is true while Angel controls the choices.
pub fn angel_wins(g: &Game, s: &State, angel: bool, k: &dyn Fn(&State) -> bool) -> bool {
    match g {
        Game::Assign(x, e) => {
            let mut s2 = s.clone();
            s2.insert(x.clone(), eval_term(e, s).expect("no division in generated games"));
            k(&s2)
        }
        Game::Test(f) => {
            let holds = eval_formula(f, s).expect("no division in generated games");
            if angel {
                holds && k(s)
            } else {
                !holds || k(s)
            }
        }
        Game::Seq(a, b) => angel_wins(a, s, angel, &|s2: &State| angel_wins(b, s2, angel, k)),
        Game::Choice(a, b) => {
            if angel {
                angel_wins(a, s, angel, k) || angel_wins(b, s, angel, k)
            } else {
                angel_wins(a, s, angel, k) && angel_wins(b, s, angel, k)
            }
        }
        Game::Dual(a) => angel_wins(a, s, !angel, k),
        other => panic!("reference game evaluator cannot handle {other:?}"),
    }
}

pub const SMALL_VARS: &[&str] = &["x", "y"];

fn small_term(r: &mut StdRng, depth: u32) -> Term {
    if depth == 0 || r.random_bool(0.4) {
        return if r.random_bool(0.6) {
            Term::Var(ident(pick(r, SMALL_VARS)))
        } else {
            Term::int(r.random_range(0..3))
        };
    }
    let d = depth - 1;
    match r.random_range(0..4) {
        0 => Term::add(small_term(r, d), small_term(r, d)),
        1 => Term::sub(small_term(r, d), small_term(r, d)),
        2 => Term::mul(small_term(r, d), small_term(r, d)),
        _ => Term::neg(small_term(r, d)),
    }
}

pub fn small_formula(r: &mut StdRng, depth: u32) -> Formula {
    if depth == 0 || r.random_bool(0.5) {
        return Formula::Cmp(small_term(r, 1), *pick(r, &Rel::ALL), small_term(r, 1));
    }
    let d = depth - 1;
    match r.random_range(0..4) {
        0 => Formula::Not(Box::new(small_formula(r, d))),
        1 => Formula::And(Box::new(small_formula(r, d)), Box::new(small_formula(r, d))),
        2 => Formula::Or(Box::new(small_formula(r, d)), Box::new(small_formula(r, d))),
        _ => Formula::Imply(Box::new(small_formula(r, d)), Box::new(small_formula(r, d))),
    }
}

/// Assignments, tests, sequences, choices and duals over `x`, `y` and
/// constants in {0, 1, 2}.
pub fn small_game(r: &mut StdRng, depth: u32) -> Game {
    if depth == 0 || r.random_bool(0.25) {
        return if r.random_bool(0.6) {
            Game::Assign(ident(pick(r, SMALL_VARS)), small_term(r, 2))
        } else {
            Game::Test(small_formula(r, 1))
        };
    }
    let d = depth - 1;
    match r.random_range(0..3) {
        0 => Game::Seq(Box::new(small_game(r, d)), Box::new(small_game(r, d))),
        1 => Game::Choice(Box::new(small_game(r, d)), Box::new(small_game(r, d))),
        _ => Game::Dual(Box::new(small_game(r, d))),
    }
}

/// Every state over `vars` with values in {-2, ..., 2}.
pub fn grid_states(vars: &[&str]) -> Vec<State> {
    let mut states = vec![State::new()];
    for v in vars {
        states = states
            .into_iter()
            .flat_map(|s| {
                (-2..=2).map(move |n| {
                    let mut s2 = s.clone();
                    s2.insert(ident(v), q(n));
                    s2
                })
            })
            .collect();
    }
    states
}

/// A random acyclic polynomial ODE system over at most four variables with
/// right-hand sides of degree at most three.
pub fn random_acyclic_system(r: &mut StdRng) -> Vec<OdeEquation> {
    let names = ["p", "q", "w", "u"];
    let n = r.random_range(1..=4);
    let mut order: Vec<&str> = names[..n].to_vec();
    for i in (1..order.len()).rev() {
        order.swap(i, r.random_range(0..=i));
    }
    let mut eqs = Vec::new();
    for (i, v) in order.iter().enumerate() {
        // The rhs of `v` may use only variables earlier in `order` and parameters.
        let mut allowed: Vec<Term> = order[..i].iter().map(|w| Term::Var(ident(w))).collect();
        allowed.push(Term::Var(ident("k")));
        let mut rhs = Term::int(r.random_range(0..4));
        for _ in 0..r.random_range(0..3) {
            let mut monomial = Term::int(r.random_range(1..4));
            for _ in 0..r.random_range(0..=3) {
                monomial = Term::mul(monomial, allowed[r.random_range(0..allowed.len())].clone());
            }
            rhs = if r.random_bool(0.3) { Term::sub(rhs, monomial) } else { Term::add(rhs, monomial) };
        }
        eqs.push(OdeEquation { var: ident(v), rhs });
    }
    // Present the equations in shuffled order.
    for i in (1..eqs.len()).rev() {
        eqs.swap(i, r.random_range(0..=i));
    }
    eqs
}

/// d/d`x` of a term whose divisors do not mention `x`, unsimplified.
pub fn derive(t: &Term, x: &Ident) -> Term {
    match t {
        Term::Var(y) if y == x => Term::int(1),
        Term::Var(_) | Term::Num(_) => Term::int(0),
        Term::Neg(a) => Term::neg(derive(a, x)),
        Term::Add(a, b) => Term::add(derive(a, x), derive(b, x)),
        Term::Sub(a, b) => Term::sub(derive(a, x), derive(b, x)),
        Term::Mul(a, b) => Term::add(
            Term::mul(derive(a, x), (**b).clone()),
            Term::mul((**a).clone(), derive(b, x)),
        ),
        Term::Pow(_, 0) => Term::int(0),
        Term::Pow(a, n) => Term::mul(
            Term::mul(Term::int(u64::from(*n)), Term::pow((**a).clone(), n - 1)),
            derive(a, x),
        ),
        Term::Div(a, b) if !dglform::ir::FreeVars::free_vars(&**b).contains(x) => Term::div(derive(a, x), (**b).clone()),
        Term::Div(..) => panic!("division by a time-dependent term"),
    }
}
