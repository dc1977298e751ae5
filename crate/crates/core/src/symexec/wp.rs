//! Weakest preconditions by backward symbolic execution.
//!
//! For a loop-free game `a` and modality-free `post`, `wp_diamond(a, post)`
//! is a first-order formula true in exactly the states from which Angel can
//! play `a` to a state satisfying `post`; `wp_box` is the same for Demon.
//!
//! ```text
//! <x := e> P        P[x := e]
//! <x := *> P        \exists x P
//! <?Q> P            Q & P
//! <a; b> P          <a> <b> P
//! <a ++ b> P        <a> P | <b> P
//! <{a}^@> P         [a] P
//! <{x' = f & Q}> P  \exists t (t >= 0 & \forall s (0 <= s & s <= t -> Q(s)) & P(t))
//! ```
//!
//! The box rules are the duals. Loops are rejected.

use super::failure::{ToolFailureKind, ToolFailureReason};
use super::ode::solve_ode_in;
use crate::ir::{fresh, substitute, substitute_all, Formula, FreeVars, Game, OdeEquation, Rel, Term, VarSet};

pub type WpResult = Result<Formula, ToolFailureReason>;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Player {
    Angel,
    Demon,
}

pub fn wp_diamond(g: &Game, post: &Formula) -> WpResult {
    let post = eliminate_modalities(post)?;
    wp(g, post, Player::Angel)
}

pub fn wp_box(g: &Game, post: &Formula) -> WpResult {
    let post = eliminate_modalities(post)?;
    wp(g, post, Player::Demon)
}

/// Replaces every modal subformula by its weakest precondition, innermost
/// first. The result is modality-free.
pub fn eliminate_modalities(f: &Formula) -> WpResult {
    if f.is_modality_free() {
        return Ok(f.clone());
    }
    let rec = |a: &Formula| eliminate_modalities(a).map(Box::new);
    Ok(match f {
        Formula::True | Formula::False | Formula::Cmp(..) => f.clone(),
        Formula::Not(a) => Formula::Not(rec(a)?),
        Formula::And(a, b) => Formula::And(rec(a)?, rec(b)?),
        Formula::Or(a, b) => Formula::Or(rec(a)?, rec(b)?),
        Formula::Imply(a, b) => Formula::Imply(rec(a)?, rec(b)?),
        Formula::Equiv(a, b) => Formula::Equiv(rec(a)?, rec(b)?),
        Formula::Forall(x, a) => Formula::Forall(x.clone(), rec(a)?),
        Formula::Exists(x, a) => Formula::Exists(x.clone(), rec(a)?),
        Formula::Diamond(g, p) => wp_diamond(g, p)?,
        Formula::Box(g, p) => wp_box(g, p)?,
    })
}

fn wp(g: &Game, post: Formula, player: Player) -> WpResult {
    match g {
        Game::Assign(x, e) => Ok(substitute(&post, x, e)),
        Game::AssignAny(x) => Ok(match player {
            Player::Angel => Formula::exists(x.clone(), post),
            Player::Demon => Formula::forall(x.clone(), post),
        }),
        Game::Test(q) => {
            let q = eliminate_modalities(q)?;
            Ok(match player {
                Player::Angel => Formula::and(q, post),
                Player::Demon => Formula::imply(q, post),
            })
        }
        Game::Seq(a, b) => {
            let mid = wp(b, post, player)?;
            wp(a, mid, player)
        }
        Game::Choice(a, b) => {
            let left = wp(a, post.clone(), player)?;
            let right = wp(b, post, player)?;
            Ok(match player {
                Player::Angel => Formula::or(left, right),
                Player::Demon => Formula::and(left, right),
            })
        }
        Game::Dual(a) => wp(
            a,
            post,
            match player {
                Player::Angel => Player::Demon,
                Player::Demon => Player::Angel,
            },
        ),
        Game::Loop(_) => Err(ToolFailureReason::new(
            ToolFailureKind::LoopUnsupported,
            format!("repetition {{{}}}* needs a loop invariant", crate::parser::print_game(strip_loop(g))),
        )),
        Game::Ode(eqs, domain) => wp_ode(g, eqs, domain, post, player),
    }
}

fn strip_loop(g: &Game) -> &Game {
    match g {
        Game::Loop(a) => a,
        other => other,
    }
}

fn wp_ode(g: &Game, eqs: &[OdeEquation], domain: &Formula, post: Formula, player: Player) -> WpResult {
    let mut avoid: VarSet = g.all_vars();
    avoid.extend(post.all_vars());
    let tau = fresh("tau_", &avoid);
    avoid.insert(tau.clone());
    let s = fresh("s_", &avoid);

    let solution = solve_ode_in(eqs, &tau)?;
    let domain = eliminate_modalities(domain)?;
    let at_end = substitute_all(&post, &solution.at(&Term::Var(tau.clone())));
    let nonneg = Formula::cmp(Term::Var(tau.clone()), Rel::Ge, Term::int(0));
    let stays_in_domain = if domain == Formula::True {
        Formula::True
    } else {
        let along = substitute_all(&domain, &solution.at(&Term::Var(s.clone())));
        let window = Formula::and(
            Formula::cmp(Term::int(0), Rel::Le, Term::Var(s.clone())),
            Formula::cmp(Term::Var(s.clone()), Rel::Le, Term::Var(tau.clone())),
        );
        Formula::forall(s, Formula::imply(window, along))
    };
    Ok(match player {
        Player::Angel => Formula::exists(tau, Formula::and(nonneg, Formula::and(stays_in_domain, at_end))),
        Player::Demon => Formula::forall(tau, Formula::imply(Formula::and(nonneg, stays_in_domain), at_end)),
    })
}
