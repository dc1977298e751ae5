//! Closed-form solutions of acyclic polynomial ODE systems.
//!
//! When no bound variable depends on itself, even indirectly, the system is
//! nilpotent: solving in dependency order only ever integrates polynomials
//! in the duration, so every solution is a polynomial in it.

use std::collections::BTreeMap;

use super::failure::{ToolFailureKind, ToolFailureReason};
use crate::ir::{fresh, subst_term, FreeVars, Ident, OdeEquation, Substitution, Term, VarSet};
use crate::parser::print_term;
use crate::poly::{Poly, PolyError};

#[derive(Debug, Clone, PartialEq)]
pub struct OdeSolution {
    /// Duration variable the solutions are expressed in.
    pub duration: Ident,
    /// One closed form per bound variable, in equation order. The bound
    /// variable itself in a solution denotes its value before the evolution.
    pub solutions: Vec<(Ident, Term)>,
}

impl OdeSolution {
    /// Substitution sending every bound variable to its value after `time`.
    pub fn at(&self, time: &Term) -> Substitution {
        let mut shift = Substitution::new();
        shift.insert(self.duration.clone(), time.clone());
        self.solutions.iter().map(|(x, sol)| (x.clone(), subst_term(sol, &shift))).collect()
    }

    pub fn get(&self, x: &Ident) -> Option<&Term> {
        self.solutions.iter().find(|(y, _)| y == x).map(|(_, t)| t)
    }
}

/// Solves with a duration variable named `tau_` (or the first free variant).
pub fn solve_ode(system: &[OdeEquation]) -> Result<OdeSolution, ToolFailureReason> {
    let mut avoid = VarSet::new();
    for eq in system {
        avoid.insert(eq.var.clone());
        avoid.extend(eq.rhs.free_vars());
    }
    solve_ode_in(system, &fresh("tau_", &avoid))
}

pub fn solve_ode_in(system: &[OdeEquation], duration: &Ident) -> Result<OdeSolution, ToolFailureReason> {
    let bound: VarSet = system.iter().map(|eq| eq.var.clone()).collect();
    for eq in system {
        check_polynomial(&eq.var, &eq.rhs, &bound)?;
    }
    let order = dependency_order(system, &bound)?;

    let mut solved: BTreeMap<Ident, Poly> = BTreeMap::new();
    for &i in &order {
        let eq = &system[i];
        let rhs = Poly::from_term(&eq.rhs).map_err(|e| match e {
            PolyError::DivisionByZero => ToolFailureReason::new(
                ToolFailureKind::DivisionInOde,
                format!("{}' = {} divides by zero", eq.var, print_term(&eq.rhs)),
            ),
        })?;
        let rhs_now = rhs.compose(&solved);
        let solution = &Poly::var(&eq.var) + &rhs_now.integral(duration);
        debug_assert_eq!(solution.derivative(duration), rhs_now, "derivative check for {}", eq.var);
        debug_assert_eq!(solution.eval_at(duration, &Poly::zero()), Poly::var(&eq.var), "initial value check");
        solved.insert(eq.var.clone(), solution);
    }

    let solutions = system
        .iter()
        .map(|eq| (eq.var.clone(), solved[&eq.var].to_term_in(duration)))
        .collect();
    Ok(OdeSolution { duration: duration.clone(), solutions })
}

/// Rejects right-hand sides that divide by an expression over bound
/// variables; such systems have no polynomial solution in general.
fn check_polynomial(var: &Ident, t: &Term, bound: &VarSet) -> Result<(), ToolFailureReason> {
    match t {
        Term::Var(_) | Term::Num(_) => Ok(()),
        Term::Neg(a) | Term::Pow(a, _) => check_polynomial(var, a, bound),
        Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) => {
            check_polynomial(var, a, bound)?;
            check_polynomial(var, b, bound)
        }
        Term::Div(a, b) => {
            if b.free_vars().iter().any(|y| bound.contains(y)) {
                return Err(ToolFailureReason::new(
                    ToolFailureKind::NonPolynomialRhs,
                    format!(
                        "right-hand side of {var}' divides by {}, which changes along the ODE",
                        print_term(b)
                    ),
                ));
            }
            check_polynomial(var, a, bound)?;
            check_polynomial(var, b, bound)
        }
    }
}

/// Topological order of the equations (ties broken by position), or the
/// variables on a dependency cycle.
fn dependency_order(system: &[OdeEquation], bound: &VarSet) -> Result<Vec<usize>, ToolFailureReason> {
    let index: BTreeMap<&Ident, usize> = system.iter().enumerate().map(|(i, eq)| (&eq.var, i)).collect();
    let deps: Vec<Vec<usize>> = system
        .iter()
        .map(|eq| eq.rhs.free_vars().iter().filter(|y| bound.contains(*y)).map(|y| index[y]).collect())
        .collect();
    let mut done = vec![false; system.len()];
    let mut order = Vec::with_capacity(system.len());
    while order.len() < system.len() {
        let next = (0..system.len()).find(|&i| !done[i] && deps[i].iter().all(|&d| done[d]));
        match next {
            Some(i) => {
                done[i] = true;
                order.push(i);
            }
            None => {
                let stuck: Vec<String> =
                    (0..system.len()).filter(|&i| !done[i]).map(|i| format!("{}'", system[i].var)).collect();
                return Err(ToolFailureReason::new(
                    ToolFailureKind::NonSolvableOde,
                    format!("cyclic dependency among {}; no polynomial solution", stuck.join(", ")),
                ));
            }
        }
    }
    Ok(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::ident;
    use crate::parser::{parse_term, print_term};

    fn system(eqs: &[(&str, &str)]) -> Vec<OdeEquation> {
        eqs.iter().map(|(x, rhs)| OdeEquation { var: ident(x), rhs: parse_term(rhs).unwrap() }).collect()
    }

    #[test]
    fn constant_rhs() {
        let sol = solve_ode(&system(&[("x", "v")])).unwrap();
        assert_eq!(sol.duration, ident("tau_"));
        assert_eq!(print_term(sol.get(&ident("x")).unwrap()), "x + v*tau_");
    }

    #[test]
    fn chained_rhs_satisfies_the_equations() {
        // oracle: differentiate each candidate and compare with the
        // substituted right-hand side; check the initial value.
        let sys = system(&[("x", "t"), ("t", "1")]);
        let sol = solve_ode(&sys).unwrap();
        let tau = sol.duration.clone();
        let x = Poly::from_term(sol.get(&ident("x")).unwrap()).unwrap();
        let t = Poly::from_term(sol.get(&ident("t")).unwrap()).unwrap();
        assert_eq!(t, Poly::from_term(&parse_term("t + tau_").unwrap()).unwrap());
        assert_eq!(x, Poly::from_term(&parse_term("x + t*tau_ + tau_^2/2").unwrap()).unwrap());
        assert_eq!(x.derivative(&tau), t);
        assert_eq!(x.eval_at(&tau, &Poly::zero()), Poly::var(&ident("x")));
    }

    #[test]
    fn avoids_clashing_duration_names() {
        let sol = solve_ode(&system(&[("tau_", "1"), ("x", "tau_")])).unwrap();
        assert_eq!(sol.duration, ident("tau_1"));
    }

    #[test]
    fn cyclic_system_is_not_solvable() {
        let err = solve_ode(&system(&[("x", "y"), ("y", "-x")])).unwrap_err();
        assert_eq!(err.kind, ToolFailureKind::NonSolvableOde);
        let err = solve_ode(&system(&[("x", "x")])).unwrap_err();
        assert_eq!(err.kind, ToolFailureKind::NonSolvableOde);
    }

    #[test]
    fn division_by_bound_variable() {
        let err = solve_ode(&system(&[("x", "1"), ("y", "1/(2*y)")])).unwrap_err();
        assert_eq!(err.kind, ToolFailureKind::NonPolynomialRhs);
        let err = solve_ode(&system(&[("x", "v/x^2")])).unwrap_err();
        assert_eq!(err.kind, ToolFailureKind::NonPolynomialRhs);
        assert!(err.detail.contains("x^2"));
    }

    #[test]
    fn division_by_parameters_is_fine() {
        let sol = solve_ode(&system(&[("x", "v/(a+b)")])).unwrap();
        let x = Poly::from_term(sol.get(&ident("x")).unwrap()).unwrap();
        assert_eq!(x, Poly::from_term(&parse_term("x + v*tau_/(a+b)").unwrap()).unwrap());
    }

    #[test]
    fn division_by_zero_constant() {
        let err = solve_ode(&system(&[("x", "1/(2-2)")])).unwrap_err();
        assert_eq!(err.kind, ToolFailureKind::DivisionInOde);
    }
}
