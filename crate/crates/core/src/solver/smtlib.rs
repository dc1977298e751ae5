//! SMT-LIB 2 rendering of modality-free formulas over the reals.

use std::collections::BTreeSet;
use std::fmt::Write;

use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::ir::{decimal_expansion, Formula, FreeVars, Ident, Rel, Term};

/// Names that collide with SMT-LIB keywords or theory symbols; these are
/// emitted as quoted symbols `|name|`.
const RESERVED: &[&str] = &[
    "abs", "and", "as", "assert", "Bool", "distinct", "div", "exists", "false", "forall", "Int", "is_int", "ite",
    "let", "match", "mod", "not", "or", "par", "Real", "root", "select", "store", "to_int", "to_real", "true", "xor",
    "NUMERAL", "DECIMAL", "STRING",
];

pub fn symbol(x: &Ident) -> String {
    if RESERVED.contains(&x.as_str()) {
        format!("|{x}|")
    } else {
        x.to_string()
    }
}

/// Script asking whether `f` is valid: declares every free variable as a
/// real constant, asserts the negation, and checks satisfiability. `unsat`
/// means valid.
pub fn to_smtlib(f: &Formula) -> String {
    validity_script(f, &BTreeSet::new())
}

/// Same as [`to_smtlib`], additionally declaring `extra` variables.
pub fn validity_script(f: &Formula, extra: &BTreeSet<Ident>) -> String {
    debug_assert!(f.is_modality_free(), "modal formulas have no SMT-LIB rendering");
    let mut vars = f.free_vars();
    vars.extend(extra.iter().cloned());
    let mut out = String::from("(set-logic ALL)\n");
    for v in &vars {
        let _ = writeln!(out, "(declare-const {} Real)", symbol(v));
    }
    let _ = writeln!(out, "(assert (not {}))", formula(f));
    out.push_str("(check-sat)\n");
    out
}

pub fn real_literal(value: &BigRational) -> String {
    let magnitude = value.abs();
    let positive = if magnitude.is_integer() {
        format!("{}.0", magnitude.numer())
    } else if let Some(dec) = decimal_expansion(&magnitude) {
        dec
    } else {
        format!("(/ {}.0 {}.0)", magnitude.numer(), magnitude.denom())
    };
    if value.is_negative() {
        format!("(- {positive})")
    } else {
        positive
    }
}

pub fn term(t: &Term) -> String {
    match t {
        Term::Var(x) => symbol(x),
        Term::Num(n) => real_literal(n.value()),
        Term::Neg(a) => format!("(- {})", term(a)),
        Term::Add(a, b) => format!("(+ {} {})", term(a), term(b)),
        Term::Sub(a, b) => format!("(- {} {})", term(a), term(b)),
        Term::Mul(a, b) => format!("(* {} {})", term(a), term(b)),
        Term::Div(a, b) => format!("(/ {} {})", term(a), term(b)),
        Term::Pow(a, n) => match n {
            0 => real_literal(&BigRational::one()),
            1 => term(a),
            _ => {
                let base = term(a);
                let factors = vec![base; *n as usize].join(" ");
                format!("(* {factors})")
            }
        },
    }
}

pub fn formula(f: &Formula) -> String {
    match f {
        Formula::True => "true".into(),
        Formula::False => "false".into(),
        Formula::Cmp(a, rel, b) => {
            let (a, b) = (term(a), term(b));
            match rel {
                Rel::Eq => format!("(= {a} {b})"),
                Rel::Ne => format!("(not (= {a} {b}))"),
                Rel::Lt => format!("(< {a} {b})"),
                Rel::Le => format!("(<= {a} {b})"),
                Rel::Gt => format!("(> {a} {b})"),
                Rel::Ge => format!("(>= {a} {b})"),
            }
        }
        Formula::Not(a) => format!("(not {})", formula(a)),
        Formula::And(a, b) => format!("(and {} {})", formula(a), formula(b)),
        Formula::Or(a, b) => format!("(or {} {})", formula(a), formula(b)),
        Formula::Imply(a, b) => format!("(=> {} {})", formula(a), formula(b)),
        Formula::Equiv(a, b) => format!("(= {} {})", formula(a), formula(b)),
        Formula::Forall(x, body) => format!("(forall (({} Real)) {})", symbol(x), formula(body)),
        Formula::Exists(x, body) => format!("(exists (({} Real)) {})", symbol(x), formula(body)),
        Formula::Diamond(..) | Formula::Box(..) => panic!("modal formula passed to the SMT-LIB printer"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_formula, parse_term};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn validity_script_shape() {
        let script = to_smtlib(&parse_formula("x >= 0").unwrap());
        assert_eq!(script, "(set-logic ALL)\n(declare-const x Real)\n(assert (not (>= x 0.0)))\n(check-sat)\n");
    }

    #[test]
    fn quantifiers() {
        let script = to_smtlib(&parse_formula("\\exists tau_ (tau_ >= 0 & x + v*tau_ = d)").unwrap());
        assert!(script.contains("(exists ((tau_ Real)) (and (>= tau_ 0.0) (= (+ x (* v tau_)) d)))"));
        assert!(!script.contains("declare-const tau_"));
    }

    #[test]
    fn powers_expand() {
        assert_eq!(term(&parse_term("x^3").unwrap()), "(* x x x)");
        assert_eq!(term(&parse_term("x^1").unwrap()), "x");
        assert_eq!(term(&parse_term("x^0").unwrap()), "1.0");
    }

    #[test]
    fn exact_literals() {
        assert_eq!(real_literal(&q(3, 1)), "3.0");
        assert_eq!(real_literal(&q(1, 4)), "0.25");
        assert_eq!(real_literal(&q(1, 3)), "(/ 1.0 3.0)");
        assert_eq!(real_literal(&q(-5, 2)), "(- 2.5)");
    }

    #[test]
    fn reserved_names_are_quoted() {
        let script = to_smtlib(&parse_formula("div = mod").unwrap());
        assert!(script.contains("(declare-const |div| Real)"));
        assert!(script.contains("(= |div| |mod|)"));
    }
}
