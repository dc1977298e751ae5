//! Exact multivariate polynomials with rational coefficients.
//!
//! Reciprocals of non-constant polynomials are kept as opaque atoms, so any
//! term normalizes; two terms with equal normal forms are equal as rational
//! functions.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::ir::{Ident, Term};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Var(Ident),
    /// `1 / p` for a non-constant `p` with leading coefficient 1.
    Recip(Poly),
}

/// Product of atoms with positive exponents.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(BTreeMap<Atom, u32>);

#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Poly(BTreeMap<Monomial, BigRational>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("division by the constant zero")]
    DivisionByZero,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial(BTreeMap::new())
    }

    pub fn atom(a: Atom) -> Self {
        Monomial([(a, 1)].into_iter().collect())
    }

    pub fn degree_of(&self, x: &Ident) -> u32 {
        self.0.get(&Atom::Var(x.clone())).copied().unwrap_or(0)
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&Atom, u32)> {
        self.0.iter().map(|(a, e)| (a, *e))
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    fn times(&self, other: &Monomial) -> Monomial {
        let mut out = self.0.clone();
        for (a, e) in &other.0 {
            *out.entry(a.clone()).or_insert(0) += e;
        }
        Monomial(out)
    }

    fn without(&self, x: &Ident) -> Monomial {
        let mut out = self.0.clone();
        out.remove(&Atom::Var(x.clone()));
        Monomial(out)
    }

    fn with_power(&self, x: &Ident, e: u32) -> Monomial {
        let mut out = self.0.clone();
        if e == 0 {
            out.remove(&Atom::Var(x.clone()));
        } else {
            out.insert(Atom::Var(x.clone()), e);
        }
        Monomial(out)
    }
}

impl Poly {
    pub fn zero() -> Self {
        Poly(BTreeMap::new())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = Poly::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    pub fn var(x: &Ident) -> Self {
        Poly::atom(Atom::Var(x.clone()))
    }

    pub fn atom(a: Atom) -> Self {
        Poly([(Monomial::atom(a), BigRational::one())].into_iter().collect())
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.0.entry(m.clone()).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.0.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// The value when the polynomial has no atoms.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.0.len() {
            0 => Some(BigRational::zero()),
            1 => self.0.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        let mut out = Poly::zero();
        for (m, k) in &self.0 {
            out.add_term(m.clone(), k * c);
        }
        out
    }

    pub fn pow(&self, n: u32) -> Poly {
        (0..n).fold(Poly::one(), |acc, _| &acc * self)
    }

    pub fn degree_in(&self, x: &Ident) -> u32 {
        self.0.keys().map(|m| m.degree_of(x)).max().unwrap_or(0)
    }

    pub fn mentions(&self, x: &Ident) -> bool {
        self.0.keys().any(|m| {
            m.atoms().any(|(a, _)| match a {
                Atom::Var(y) => y == x,
                Atom::Recip(p) => p.mentions(x),
            })
        })
    }

    /// Coefficients of `x^0, x^1, ...` as polynomials free of `x`.
    pub fn coefficients_in(&self, x: &Ident) -> Vec<Poly> {
        let mut out = vec![Poly::zero(); self.degree_in(x) as usize + 1];
        for (m, c) in &self.0 {
            out[m.degree_of(x) as usize].add_term(m.without(x), c.clone());
        }
        out
    }

    pub fn derivative(&self, x: &Ident) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.0 {
            let e = m.degree_of(x);
            if e > 0 {
                out.add_term(m.with_power(x, e - 1), c * BigRational::from_integer(e.into()));
            }
        }
        out
    }

    /// Antiderivative in `x` vanishing at `x = 0`.
    pub fn integral(&self, x: &Ident) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.0 {
            let e = m.degree_of(x) + 1;
            out.add_term(m.with_power(x, e), c / BigRational::from_integer(e.into()));
        }
        out
    }

    /// Simultaneously replaces variable atoms by polynomials. Reciprocal atoms
    /// are left alone; callers ensure they do not mention the replaced
    /// variables.
    pub fn compose(&self, sigma: &BTreeMap<Ident, Poly>) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.0 {
            let mut term = Poly::constant(c.clone());
            for (a, e) in m.atoms() {
                let factor = match a {
                    Atom::Var(y) => match sigma.get(y) {
                        Some(p) => p.pow(e),
                        None => Poly::atom(a.clone()).pow(e),
                    },
                    Atom::Recip(_) => Poly::atom(a.clone()).pow(e),
                };
                term = &term * &factor;
            }
            out = &out + &term;
        }
        out
    }

    pub fn eval_at(&self, x: &Ident, value: &Poly) -> Poly {
        self.compose(&[(x.clone(), value.clone())].into_iter().collect())
    }

    /// `1 / self` as a scaled reciprocal atom.
    fn reciprocal(&self) -> Result<Poly, PolyError> {
        if let Some(c) = self.as_constant() {
            if c.is_zero() {
                return Err(PolyError::DivisionByZero);
            }
            return Ok(Poly::constant(c.recip()));
        }
        let lead = self.0.iter().next_back().map(|(_, c)| c.clone()).expect("non-constant");
        let monic = self.scale(&lead.recip());
        Ok(Poly::atom(Atom::Recip(monic)).scale(&lead.recip()))
    }

    pub fn from_term(t: &Term) -> Result<Poly, PolyError> {
        Ok(match t {
            Term::Var(x) => Poly::var(x),
            Term::Num(n) => Poly::constant(n.value().clone()),
            Term::Neg(a) => -&Poly::from_term(a)?,
            Term::Add(a, b) => &Poly::from_term(a)? + &Poly::from_term(b)?,
            Term::Sub(a, b) => &Poly::from_term(a)? - &Poly::from_term(b)?,
            Term::Mul(a, b) => &Poly::from_term(a)? * &Poly::from_term(b)?,
            Term::Div(a, b) => &Poly::from_term(a)? * &Poly::from_term(b)?.reciprocal()?,
            Term::Pow(a, n) => Poly::from_term(a)?.pow(*n),
        })
    }

    /// A readable term with the same normal form.
    pub fn to_term(&self) -> Term {
        signed_sum(self.0.iter().map(|(m, c)| monomial_term(m, c)).collect())
    }

    /// Renders as `c0 + c1*x + c2*x^2 + ...` with each `ci` free of `x`.
    pub fn to_term_in(&self, x: &Ident) -> Term {
        let mut parts = Vec::new();
        for (k, coeff) in self.coefficients_in(x).into_iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            if k == 0 {
                parts.extend(coeff.0.iter().map(|(m, c)| monomial_term(m, c)));
                continue;
            }
            let power = if k == 1 { Term::Var(x.clone()) } else { Term::pow(Term::Var(x.clone()), k as u32) };
            if coeff.0.len() == 1 {
                let (m, c) = coeff.0.iter().next().expect("one term");
                let (negative, t) = monomial_term(m, c);
                let t = if is_one(&t) { power } else { Term::mul(t, power) };
                parts.push((negative, t));
            } else {
                parts.push((false, Term::mul(coeff.to_term(), power)));
            }
        }
        signed_sum(parts)
    }
}

fn is_one(t: &Term) -> bool {
    t.as_num().is_some_and(|n| n.is_one())
}

/// (negative?, magnitude term) for `c * m`.
fn monomial_term(m: &Monomial, c: &BigRational) -> (bool, Term) {
    let mut numer: Option<Term> = None;
    let mut denom: Option<Term> = None;
    let push = |slot: &mut Option<Term>, t: Term| {
        *slot = Some(match slot.take() {
            None => t,
            Some(acc) => Term::mul(acc, t),
        });
    };
    for (a, e) in m.atoms() {
        match a {
            Atom::Var(x) => {
                let t = if e == 1 { Term::Var(x.clone()) } else { Term::pow(Term::Var(x.clone()), e) };
                push(&mut numer, t);
            }
            Atom::Recip(p) => {
                let t = if e == 1 { p.to_term() } else { Term::pow(p.to_term(), e) };
                push(&mut denom, t);
            }
        }
    }
    let magnitude = c.abs();
    let numer = match numer {
        None => Term::rational(&magnitude),
        Some(t) if magnitude.is_one() => t,
        Some(t) => Term::mul(Term::rational(&magnitude), t),
    };
    let t = match denom {
        None => numer,
        Some(d) => Term::div(numer, d),
    };
    (c.is_negative(), t)
}

fn signed_sum(parts: Vec<(bool, Term)>) -> Term {
    let mut acc: Option<Term> = None;
    for (negative, t) in parts {
        acc = Some(match (acc, negative) {
            (None, false) => t,
            (None, true) => Term::neg(t),
            (Some(a), false) => Term::add(a, t),
            (Some(a), true) => Term::sub(a, t),
        });
    }
    acc.unwrap_or_else(|| Term::int(0))
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.0 {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-BigRational::one())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.0 {
            for (m2, c2) in &rhs.0 {
                out.add_term(m1.times(m2), c1 * c2);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::ident;
    use crate::parser::{parse_term, print_term};

    fn p(src: &str) -> Poly {
        Poly::from_term(&parse_term(src).unwrap()).unwrap()
    }

    #[test]
    fn normal_forms_agree() {
        assert_eq!(p("(x+1)^2"), p("x*x + 2*x + 1"));
        assert_eq!(p("0.5*2*y"), p("y"));
        assert_eq!(p("x/(2*a) + x/(a*2)"), p("x/a"));
        assert_eq!(p("x - x"), Poly::zero());
    }

    #[test]
    fn calculus_in_one_variable() {
        let t = ident("t");
        assert_eq!(p("t^3 + 2*t*v").derivative(&t), p("3*t^2 + 2*v"));
        assert_eq!(p("3*t^2 + 2*v").integral(&t), p("t^3 + 2*v*t"));
        assert_eq!(p("a + b*t").eval_at(&t, &Poly::zero()), p("a"));
    }

    #[test]
    fn division_by_zero_constant() {
        assert_eq!(Poly::from_term(&parse_term("x/(1-1)").unwrap()), Err(PolyError::DivisionByZero));
    }

    #[test]
    fn rendering_groups_powers() {
        let tau = ident("tau_");
        assert_eq!(print_term(&p("x + v*tau_").to_term_in(&tau)), "x + v*tau_");
        let q = p("x + t*tau_ + tau_^2/2");
        assert_eq!(print_term(&q.to_term_in(&tau)), "x + t*tau_ + 0.5*tau_^2");
        let r = p("x - (a+b)*tau_");
        assert_eq!(Poly::from_term(&r.to_term_in(&tau)).unwrap(), r);
        assert_eq!(print_term(&p("x/3").to_term()), "1/3*x");
    }
}
