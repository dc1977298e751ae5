//! Capture-avoiding substitution and fresh-name generation.

use std::collections::BTreeMap;

use super::vars::{FreeVars, VarSet};
use super::{Formula, Game, Ident, OdeEquation, Term};

/// Simultaneous substitution `x ↦ e` for every entry.
pub type Substitution = BTreeMap<Ident, Term>;

/// First name among `base`, `base1`, `base2`, ... not in `avoid`.
pub fn fresh(base: &str, avoid: &VarSet) -> Ident {
    let candidate = Ident::new(base).unwrap_or_else(|_| Ident::new("v").expect("valid"));
    if !avoid.contains(&candidate) {
        return candidate;
    }
    (1u64..)
        .map(|i| Ident::new(format!("{candidate}{i}")).expect("suffixing keeps identifiers valid"))
        .find(|id| !avoid.contains(id))
        .expect("unbounded supply")
}

pub fn substitute_term(t: &Term, x: &Ident, e: &Term) -> Term {
    subst_term(t, &single(x, e))
}

/// Replaces free occurrences of `x` by `e`, renaming binders that would capture.
pub fn substitute(f: &Formula, x: &Ident, e: &Term) -> Formula {
    if *e == Term::Var(x.clone()) {
        return f.clone();
    }
    substitute_all(f, &single(x, e))
}

pub fn substitute_all(f: &Formula, sigma: &Substitution) -> Formula {
    let sigma: Substitution = sigma.iter().filter(|(x, e)| **e != Term::Var((*x).clone())).map(|(x, e)| (x.clone(), e.clone())).collect();
    if sigma.is_empty() {
        return f.clone();
    }
    subst_formula(f, &sigma)
}

fn single(x: &Ident, e: &Term) -> Substitution {
    let mut sigma = Substitution::new();
    sigma.insert(x.clone(), e.clone());
    sigma
}

pub fn subst_term(t: &Term, sigma: &Substitution) -> Term {
    match t {
        Term::Var(y) => sigma.get(y).cloned().unwrap_or_else(|| t.clone()),
        Term::Num(_) => t.clone(),
        Term::Neg(a) => Term::neg(subst_term(a, sigma)),
        Term::Add(a, b) => Term::add(subst_term(a, sigma), subst_term(b, sigma)),
        Term::Sub(a, b) => Term::sub(subst_term(a, sigma), subst_term(b, sigma)),
        Term::Mul(a, b) => Term::mul(subst_term(a, sigma), subst_term(b, sigma)),
        Term::Div(a, b) => Term::div(subst_term(a, sigma), subst_term(b, sigma)),
        Term::Pow(a, n) => Term::pow(subst_term(a, sigma), *n),
    }
}

fn replacement_vars(sigma: &Substitution) -> VarSet {
    sigma.values().flat_map(|e| e.free_vars()).collect()
}

fn subst_formula(f: &Formula, sigma: &Substitution) -> Formula {
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Cmp(a, rel, b) => Formula::Cmp(subst_term(a, sigma), *rel, subst_term(b, sigma)),
        Formula::Not(a) => Formula::Not(Box::new(subst_formula(a, sigma))),
        Formula::And(a, b) => Formula::And(Box::new(subst_formula(a, sigma)), Box::new(subst_formula(b, sigma))),
        Formula::Or(a, b) => Formula::Or(Box::new(subst_formula(a, sigma)), Box::new(subst_formula(b, sigma))),
        Formula::Imply(a, b) => Formula::Imply(Box::new(subst_formula(a, sigma)), Box::new(subst_formula(b, sigma))),
        Formula::Equiv(a, b) => Formula::Equiv(Box::new(subst_formula(a, sigma)), Box::new(subst_formula(b, sigma))),
        Formula::Forall(y, body) | Formula::Exists(y, body) => {
            let (y, body) = subst_binder(y, body, sigma);
            if matches!(f, Formula::Forall(..)) {
                Formula::Forall(y, Box::new(body))
            } else {
                Formula::Exists(y, Box::new(body))
            }
        }
        Formula::Diamond(g, p) | Formula::Box(g, p) => subst_modal(f, g, p, sigma),
    }
}

fn subst_binder(y: &Ident, body: &Formula, sigma: &Substitution) -> (Ident, Formula) {
    let mut inner = sigma.clone();
    inner.remove(y);
    let body_free = body.free_vars();
    inner.retain(|x, _| body_free.contains(x));
    if inner.is_empty() {
        return (y.clone(), body.clone());
    }
    if !replacement_vars(&inner).contains(y) {
        return (y.clone(), subst_formula(body, &inner));
    }
    let mut avoid = body.all_vars();
    avoid.extend(replacement_vars(&inner));
    avoid.extend(inner.keys().cloned());
    let renamed = fresh(y.as_str(), &avoid);
    inner.insert(y.clone(), Term::Var(renamed.clone()));
    (renamed, subst_formula(body, &inner))
}

/// Modal formulas: substitute straight through the game when it neither
/// writes a substituted variable nor a variable of a replacement; otherwise
/// fall back to `∃z (z = e ∧ ∃x (x = z ∧ φ))`, which needs no renaming of
/// program variables.
fn subst_modal(f: &Formula, g: &Game, p: &Formula, sigma: &Substitution) -> Formula {
    let written = super::written_vars(g);
    let free = f.free_vars();
    let sigma: Substitution = sigma.iter().filter(|(x, _)| free.contains(*x)).map(|(x, e)| (x.clone(), e.clone())).collect();
    if sigma.is_empty() {
        return f.clone();
    }
    let clash = sigma.keys().any(|x| written.contains(x)) || replacement_vars(&sigma).iter().any(|y| written.contains(y));
    let bound_in_game = game_quantified_vars(g);
    let capture = replacement_vars(&sigma).iter().any(|y| bound_in_game.contains(y) || p.all_vars().contains(y) && !p.free_vars().contains(y));
    if !clash && !capture {
        let body = subst_formula(p, &sigma);
        let game = subst_game(g, &sigma);
        return match f {
            Formula::Diamond(..) => Formula::Diamond(Box::new(game), Box::new(body)),
            _ => Formula::Box(Box::new(game), Box::new(body)),
        };
    }
    let mut avoid = f.all_vars();
    avoid.extend(replacement_vars(&sigma));
    let mut ghosts = Vec::new();
    for (x, e) in &sigma {
        let z = fresh(&format!("{x}_"), &avoid);
        avoid.insert(z.clone());
        ghosts.push((x.clone(), z, e.clone()));
    }
    let mut result = f.clone();
    for (x, z, _) in ghosts.iter().rev() {
        result = Formula::exists(x.clone(), Formula::and(Formula::eq(Term::Var(x.clone()), Term::Var(z.clone())), result));
    }
    for (_, z, e) in ghosts.iter().rev() {
        result = Formula::exists(z.clone(), Formula::and(Formula::eq(Term::Var(z.clone()), e.clone()), result));
    }
    result
}

fn game_quantified_vars(g: &Game) -> VarSet {
    let mut all = g.all_vars();
    let mut free = g.free_vars();
    free.extend(super::written_vars(g));
    all.retain(|v| !free.contains(v));
    all
}

fn subst_game(g: &Game, sigma: &Substitution) -> Game {
    match g {
        Game::Assign(x, e) => Game::Assign(x.clone(), subst_term(e, sigma)),
        Game::AssignAny(_) => g.clone(),
        Game::Test(q) => Game::Test(subst_formula(q, sigma)),
        Game::Ode(eqs, domain) => Game::Ode(
            eqs.iter().map(|eq| OdeEquation { var: eq.var.clone(), rhs: subst_term(&eq.rhs, sigma) }).collect(),
            subst_formula(domain, sigma),
        ),
        Game::Seq(a, b) => Game::seq(subst_game(a, sigma), subst_game(b, sigma)),
        Game::Choice(a, b) => Game::choice(subst_game(a, sigma), subst_game(b, sigma)),
        Game::Loop(a) => Game::repeat(subst_game(a, sigma)),
        Game::Dual(a) => Game::dual(subst_game(a, sigma)),
    }
}
