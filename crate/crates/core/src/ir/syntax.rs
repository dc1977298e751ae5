//! Abstract syntax of differential game logic over real arithmetic.

use num_rational::BigRational;
use num_traits::Signed;

use super::{Ident, Numeral};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Ident),
    Num(Numeral),
    Neg(Box<Term>),
    Add(Box<Term>, Box<Term>),
    Sub(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
    Div(Box<Term>, Box<Term>),
    /// Exponents are always literal nonnegative integers.
    Pow(Box<Term>, u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rel {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl Rel {
    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Eq => "=",
            Rel::Ne => "!=",
            Rel::Lt => "<",
            Rel::Le => "<=",
            Rel::Gt => ">",
            Rel::Ge => ">=",
        }
    }

    pub const ALL: [Rel; 6] = [Rel::Eq, Rel::Ne, Rel::Lt, Rel::Le, Rel::Gt, Rel::Ge];
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Cmp(Term, Rel, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imply(Box<Formula>, Box<Formula>),
    Equiv(Box<Formula>, Box<Formula>),
    Forall(Ident, Box<Formula>),
    Exists(Ident, Box<Formula>),
    /// `<game> post`: Angel has a strategy to reach `post`.
    Diamond(Box<Game>, Box<Formula>),
    /// `[game] post`: Demon has a strategy to reach `post`.
    Box(Box<Game>, Box<Formula>),
}

/// One equation `x' = rhs` of an ODE system.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OdeEquation {
    pub var: Ident,
    pub rhs: Term,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Game {
    Assign(Ident, Term),
    AssignAny(Ident),
    Test(Formula),
    /// Nonempty list of equations with pairwise distinct variables, plus the
    /// evolution domain.
    Ode(Vec<OdeEquation>, Formula),
    Seq(Box<Game>, Box<Game>),
    Choice(Box<Game>, Box<Game>),
    Loop(Box<Game>),
    Dual(Box<Game>),
}

#[allow(clippy::should_implement_trait)]
impl Term {
    pub fn var(name: &Ident) -> Term {
        Term::Var(name.clone())
    }

    pub fn int(n: u64) -> Term {
        Term::Num(Numeral::from_u64(n))
    }

    /// Exact rational constant; uses `Neg` and `Div` where a decimal literal
    /// cannot express the value.
    pub fn rational(value: &BigRational) -> Term {
        let magnitude = value.abs();
        let positive = match Numeral::from_rational(magnitude.clone()) {
            Some(n) => Term::Num(n),
            None => {
                let numer = Numeral::from_rational(BigRational::from_integer(magnitude.numer().clone()))
                    .expect("integer numerator");
                let denom = Numeral::from_rational(BigRational::from_integer(magnitude.denom().clone()))
                    .expect("integer denominator");
                Term::Div(Box::new(Term::Num(numer)), Box::new(Term::Num(denom)))
            }
        };
        if value.is_negative() {
            Term::Neg(Box::new(positive))
        } else {
            positive
        }
    }

    pub fn neg(t: Term) -> Term {
        Term::Neg(Box::new(t))
    }

    pub fn add(a: Term, b: Term) -> Term {
        Term::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Term, b: Term) -> Term {
        Term::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Term, b: Term) -> Term {
        Term::Mul(Box::new(a), Box::new(b))
    }

    pub fn div(a: Term, b: Term) -> Term {
        Term::Div(Box::new(a), Box::new(b))
    }

    pub fn pow(a: Term, n: u32) -> Term {
        Term::Pow(Box::new(a), n)
    }

    pub fn as_num(&self) -> Option<&Numeral> {
        match self {
            Term::Num(n) => Some(n),
            _ => None,
        }
    }
}

#[allow(clippy::should_implement_trait)]
impl Formula {
    pub fn cmp(lhs: Term, rel: Rel, rhs: Term) -> Formula {
        Formula::Cmp(lhs, rel, rhs)
    }

    pub fn eq(lhs: Term, rhs: Term) -> Formula {
        Formula::Cmp(lhs, Rel::Eq, rhs)
    }

    /// Negation that folds the constants `true`/`false`.
    pub fn not(f: Formula) -> Formula {
        match f {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            f => Formula::Not(Box::new(f)),
        }
    }

    /// Conjunction with `true`/`false` units folded.
    pub fn and(a: Formula, b: Formula) -> Formula {
        match (a, b) {
            (Formula::True, f) | (f, Formula::True) => f,
            (Formula::False, _) | (_, Formula::False) => Formula::False,
            (a, b) => Formula::And(Box::new(a), Box::new(b)),
        }
    }

    /// Disjunction with `true`/`false` units folded.
    pub fn or(a: Formula, b: Formula) -> Formula {
        match (a, b) {
            (Formula::False, f) | (f, Formula::False) => f,
            (Formula::True, _) | (_, Formula::True) => Formula::True,
            (a, b) => Formula::Or(Box::new(a), Box::new(b)),
        }
    }

    /// Implication with `true`/`false` units folded.
    pub fn imply(a: Formula, b: Formula) -> Formula {
        match (a, b) {
            (Formula::True, f) => f,
            (Formula::False, _) | (_, Formula::True) => Formula::True,
            (a, b) => Formula::Imply(Box::new(a), Box::new(b)),
        }
    }

    pub fn equiv(a: Formula, b: Formula) -> Formula {
        Formula::Equiv(Box::new(a), Box::new(b))
    }

    pub fn forall(x: Ident, body: Formula) -> Formula {
        Formula::Forall(x, Box::new(body))
    }

    pub fn exists(x: Ident, body: Formula) -> Formula {
        Formula::Exists(x, Box::new(body))
    }

    pub fn diamond(g: Game, post: Formula) -> Formula {
        Formula::Diamond(Box::new(g), Box::new(post))
    }

    pub fn boxed(g: Game, post: Formula) -> Formula {
        Formula::Box(Box::new(g), Box::new(post))
    }

    /// Conjunction of all formulas, `true` when empty.
    pub fn conjunction(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let parts: Vec<Formula> = parts.into_iter().collect();
        parts.into_iter().rev().fold(Formula::True, |acc, f| Formula::and(f, acc))
    }

    /// True when no `<.>` or `[.]` occurs anywhere.
    pub fn is_modality_free(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Cmp(..) => true,
            Formula::Not(f) | Formula::Forall(_, f) | Formula::Exists(_, f) => f.is_modality_free(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imply(a, b) | Formula::Equiv(a, b) => {
                a.is_modality_free() && b.is_modality_free()
            }
            Formula::Diamond(..) | Formula::Box(..) => false,
        }
    }

    /// Number of modal nodes, counting nested ones.
    pub fn modality_count(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Cmp(..) => 0,
            Formula::Not(f) | Formula::Forall(_, f) | Formula::Exists(_, f) => f.modality_count(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imply(a, b) | Formula::Equiv(a, b) => {
                a.modality_count() + b.modality_count()
            }
            Formula::Diamond(g, p) | Formula::Box(g, p) => 1 + g.modality_count() + p.modality_count(),
        }
    }
}

impl Game {
    pub fn assign(x: Ident, e: Term) -> Game {
        Game::Assign(x, e)
    }

    pub fn test(f: Formula) -> Game {
        Game::Test(f)
    }

    pub fn ode(eqs: Vec<(Ident, Term)>, domain: Formula) -> Game {
        Game::Ode(eqs.into_iter().map(|(var, rhs)| OdeEquation { var, rhs }).collect(), domain)
    }

    pub fn seq(a: Game, b: Game) -> Game {
        Game::Seq(Box::new(a), Box::new(b))
    }

    /// Left-nested sequential composition of a nonempty list.
    pub fn seq_all(games: impl IntoIterator<Item = Game>) -> Option<Game> {
        games.into_iter().reduce(Game::seq)
    }

    pub fn choice(a: Game, b: Game) -> Game {
        Game::Choice(Box::new(a), Box::new(b))
    }

    pub fn repeat(a: Game) -> Game {
        Game::Loop(Box::new(a))
    }

    pub fn dual(a: Game) -> Game {
        Game::Dual(Box::new(a))
    }

    fn modality_count(&self) -> usize {
        match self {
            Game::Assign(..) | Game::AssignAny(_) => 0,
            Game::Test(f) => f.modality_count(),
            Game::Ode(_, q) => q.modality_count(),
            Game::Seq(a, b) | Game::Choice(a, b) => a.modality_count() + b.modality_count(),
            Game::Loop(a) | Game::Dual(a) => a.modality_count(),
        }
    }
}
