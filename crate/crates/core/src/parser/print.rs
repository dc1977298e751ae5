//! Deterministic ASCII rendering that the parser reads back to the same tree.

use std::fmt::Write;

use crate::ir::{Formula, Game, Term};

pub fn print_formula(f: &Formula) -> String {
    let mut out = String::new();
    formula(f, 0, &mut out);
    out
}

pub fn print_term(t: &Term) -> String {
    let mut out = String::new();
    term(t, 0, &mut out);
    out
}

/// Renders a game the way it appears between `<` and `>`.
pub fn print_game(g: &Game) -> String {
    let mut out = String::new();
    game(g, &mut out);
    out
}

const T_SUM: u8 = 1;
const T_PRODUCT: u8 = 2;
const T_NEG: u8 = 3;
const T_ATOM: u8 = 5;

fn term_level(t: &Term) -> u8 {
    match t {
        Term::Add(..) | Term::Sub(..) => T_SUM,
        Term::Mul(..) | Term::Div(..) => T_PRODUCT,
        Term::Neg(_) => T_NEG,
        Term::Pow(..) => 4,
        Term::Var(_) | Term::Num(_) => T_ATOM,
    }
}

fn term(t: &Term, min: u8, out: &mut String) {
    if term_level(t) < min {
        out.push('(');
        term(t, 0, out);
        out.push(')');
        return;
    }
    match t {
        Term::Var(x) => out.push_str(x.as_str()),
        Term::Num(n) => out.push_str(n.literal()),
        Term::Neg(a) => {
            out.push('-');
            term(a, T_NEG, out);
        }
        Term::Add(a, b) | Term::Sub(a, b) => {
            term(a, T_SUM, out);
            out.push_str(if matches!(t, Term::Add(..)) { " + " } else { " - " });
            term(b, T_PRODUCT, out);
        }
        Term::Mul(a, b) | Term::Div(a, b) => {
            term(a, T_PRODUCT, out);
            out.push(if matches!(t, Term::Mul(..)) { '*' } else { '/' });
            term(b, T_NEG, out);
        }
        Term::Pow(a, n) => {
            term(a, T_ATOM, out);
            let _ = write!(out, "^{n}");
        }
    }
}

const F_EQUIV: u8 = 1;
const F_IMPLY: u8 = 2;
const F_OR: u8 = 3;
const F_AND: u8 = 4;
const F_UNARY: u8 = 5;

fn formula_level(f: &Formula) -> u8 {
    match f {
        Formula::Equiv(..) => F_EQUIV,
        Formula::Imply(..) => F_IMPLY,
        Formula::Or(..) => F_OR,
        Formula::And(..) => F_AND,
        Formula::Not(_) | Formula::Forall(..) | Formula::Exists(..) | Formula::Diamond(..) | Formula::Box(..) => F_UNARY,
        Formula::True | Formula::False | Formula::Cmp(..) => 6,
    }
}

fn formula(f: &Formula, min: u8, out: &mut String) {
    if formula_level(f) < min {
        out.push('(');
        formula(f, 0, out);
        out.push(')');
        return;
    }
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Cmp(a, rel, b) => {
            term(a, 0, out);
            let _ = write!(out, " {} ", rel.symbol());
            term(b, 0, out);
        }
        Formula::Not(a) => {
            out.push('!');
            if matches!(**a, Formula::Cmp(..)) {
                out.push('(');
                formula(a, 0, out);
                out.push(')');
            } else {
                formula(a, F_UNARY, out);
            }
        }
        Formula::And(a, b) => binary(a, " & ", b, F_AND + 1, F_AND, out),
        Formula::Or(a, b) => binary(a, " | ", b, F_OR + 1, F_OR, out),
        Formula::Imply(a, b) => binary(a, " -> ", b, F_IMPLY + 1, F_IMPLY, out),
        Formula::Equiv(a, b) => binary(a, " <-> ", b, F_EQUIV, F_EQUIV + 1, out),
        Formula::Forall(x, body) | Formula::Exists(x, body) => {
            let q = if matches!(f, Formula::Forall(..)) { "\\forall" } else { "\\exists" };
            let _ = write!(out, "{q} {x} ");
            formula(body, F_UNARY, out);
        }
        Formula::Diamond(g, post) => {
            out.push('<');
            game(g, out);
            out.push_str("> ");
            formula(post, F_UNARY, out);
        }
        Formula::Box(g, post) => {
            out.push('[');
            game(g, out);
            out.push_str("] ");
            formula(post, F_UNARY, out);
        }
    }
}

fn binary(a: &Formula, op: &str, b: &Formula, left_min: u8, right_min: u8, out: &mut String) {
    formula(a, left_min, out);
    out.push_str(op);
    formula(b, right_min, out);
}

fn game(g: &Game, out: &mut String) {
    match g {
        Game::Assign(x, e) => {
            let _ = write!(out, "{x} := ");
            term(e, 0, out);
            out.push(';');
        }
        Game::AssignAny(x) => {
            let _ = write!(out, "{x} := *;");
        }
        Game::Test(q) => {
            out.push('?');
            formula(q, 0, out);
            out.push(';');
        }
        Game::Ode(eqs, domain) => {
            out.push('{');
            for (i, eq) in eqs.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "{}' = ", eq.var);
                term(&eq.rhs, 0, out);
            }
            if *domain != Formula::True {
                out.push_str(" & ");
                formula(domain, 0, out);
            }
            out.push_str("};");
        }
        Game::Seq(a, b) => {
            if matches!(**a, Game::Choice(..)) {
                block(a, out);
            } else {
                game(a, out);
            }
            out.push(' ');
            if matches!(**b, Game::Choice(..) | Game::Seq(..)) {
                block(b, out);
            } else {
                game(b, out);
            }
        }
        Game::Choice(a, b) => {
            game(a, out);
            out.push_str(" ++ ");
            if matches!(**b, Game::Choice(..)) {
                block(b, out);
            } else {
                game(b, out);
            }
        }
        Game::Loop(a) => {
            block(a, out);
            out.push('*');
        }
        Game::Dual(a) => {
            block(a, out);
            out.push_str("^@");
        }
    }
}

fn block(g: &Game, out: &mut String) {
    out.push('{');
    game(g, out);
    out.push('}');
}
