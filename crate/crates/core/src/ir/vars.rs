//! Variable occurrence analysis.
//!
//! Two notions are kept apart. [`FreeVars::free_vars`] answers "which
//! variables does this read from the surrounding state": quantifiers bind,
//! but game writes (assignments, ODEs) do not hide a variable, so every
//! variable a game mentions counts as free. [`written_vars`] answers "which
//! variables can this game change".

use std::collections::BTreeSet;

use super::{Formula, Game, Ident, Term};

pub type VarSet = BTreeSet<Ident>;

pub trait FreeVars {
    fn collect_free(&self, bound: &mut Vec<Ident>, out: &mut VarSet);
    fn collect_all(&self, out: &mut VarSet);

    fn free_vars(&self) -> VarSet {
        let mut out = VarSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    /// Every identifier occurring anywhere, bound or free.
    fn all_vars(&self) -> VarSet {
        let mut out = VarSet::new();
        self.collect_all(&mut out);
        out
    }
}

impl FreeVars for Term {
    fn collect_free(&self, bound: &mut Vec<Ident>, out: &mut VarSet) {
        match self {
            Term::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Term::Num(_) => {}
            Term::Neg(a) | Term::Pow(a, _) => a.collect_free(bound, out),
            Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) | Term::Div(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
        }
    }

    fn collect_all(&self, out: &mut VarSet) {
        self.collect_free(&mut Vec::new(), out)
    }
}

impl FreeVars for Formula {
    fn collect_free(&self, bound: &mut Vec<Ident>, out: &mut VarSet) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Cmp(a, _, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imply(a, b) | Formula::Equiv(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Forall(x, f) | Formula::Exists(x, f) => {
                bound.push(x.clone());
                f.collect_free(bound, out);
                bound.pop();
            }
            Formula::Diamond(g, p) | Formula::Box(g, p) => {
                g.collect_free(bound, out);
                p.collect_free(bound, out);
            }
        }
    }

    fn collect_all(&self, out: &mut VarSet) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Cmp(a, _, b) => {
                a.collect_all(out);
                b.collect_all(out);
            }
            Formula::Not(f) => f.collect_all(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imply(a, b) | Formula::Equiv(a, b) => {
                a.collect_all(out);
                b.collect_all(out);
            }
            Formula::Forall(x, f) | Formula::Exists(x, f) => {
                out.insert(x.clone());
                f.collect_all(out);
            }
            Formula::Diamond(g, p) | Formula::Box(g, p) => {
                g.collect_all(out);
                p.collect_all(out);
            }
        }
    }
}

impl FreeVars for Game {
    fn collect_free(&self, bound: &mut Vec<Ident>, out: &mut VarSet) {
        fn note(x: &Ident, bound: &[Ident], out: &mut VarSet) {
            if !bound.contains(x) {
                out.insert(x.clone());
            }
        }
        match self {
            Game::Assign(x, e) => {
                note(x, bound, out);
                e.collect_free(bound, out);
            }
            Game::AssignAny(x) => note(x, bound, out),
            Game::Test(f) => f.collect_free(bound, out),
            Game::Ode(eqs, domain) => {
                for eq in eqs {
                    note(&eq.var, bound, out);
                    eq.rhs.collect_free(bound, out);
                }
                domain.collect_free(bound, out);
            }
            Game::Seq(a, b) | Game::Choice(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Game::Loop(a) | Game::Dual(a) => a.collect_free(bound, out),
        }
    }

    fn collect_all(&self, out: &mut VarSet) {
        self.collect_free(&mut Vec::new(), out);
        // quantified variables inside tests and domains
        match self {
            Game::Test(f) => f.collect_all(out),
            Game::Ode(_, domain) => domain.collect_all(out),
            Game::Seq(a, b) | Game::Choice(a, b) => {
                a.collect_all(out);
                b.collect_all(out);
            }
            Game::Loop(a) | Game::Dual(a) => a.collect_all(out),
            Game::Assign(..) | Game::AssignAny(_) => {}
        }
    }
}

/// Variables a game may modify: assignment targets and ODE-bound variables.
pub fn written_vars(g: &Game) -> VarSet {
    let mut out = VarSet::new();
    collect_written(g, &mut out);
    out
}

fn collect_written(g: &Game, out: &mut VarSet) {
    match g {
        Game::Assign(x, _) | Game::AssignAny(x) => {
            out.insert(x.clone());
        }
        Game::Test(_) => {}
        Game::Ode(eqs, _) => out.extend(eqs.iter().map(|eq| eq.var.clone())),
        Game::Seq(a, b) | Game::Choice(a, b) => {
            collect_written(a, out);
            collect_written(b, out);
        }
        Game::Loop(a) | Game::Dual(a) => collect_written(a, out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{ident, Rel};

    fn v(name: &str) -> Term {
        Term::Var(ident(name))
    }

    fn set(names: &[&str]) -> VarSet {
        names.iter().map(|n| ident(n)).collect()
    }

    #[test]
    fn free_vars_of_term() {
        let t = Term::add(v("x"), Term::mul(v("v0"), v("t")));
        assert_eq!(t.free_vars(), set(&["x", "v0", "t"]));
    }

    #[test]
    fn quantifier_binds() {
        let f = Formula::exists(ident("tau"), Formula::cmp(v("tau"), Rel::Ge, Term::int(0)));
        assert!(f.free_vars().is_empty());
        assert_eq!(f.all_vars(), set(&["tau"]));
    }

    #[test]
    fn tests_write_nothing() {
        let g = Game::test(Formula::eq(v("x"), Term::int(0)));
        assert!(written_vars(&g).is_empty());
    }

    #[test]
    fn ode_bound_variables_are_writes() {
        let g = Game::ode(vec![(ident("x"), v("v")), (ident("t"), Term::int(1))], Formula::True);
        assert_eq!(written_vars(&g), set(&["x", "t"]));
        assert_eq!(g.free_vars(), set(&["x", "v", "t"]));
    }

    #[test]
    fn dual_and_seq_writes() {
        let a = Game::assign(ident("x"), Term::int(1));
        let b = Game::AssignAny(ident("y"));
        assert_eq!(written_vars(&Game::dual(a.clone())), written_vars(&a));
        assert_eq!(written_vars(&Game::seq(a, b)), set(&["x", "y"]));
    }
}
