//! In-memory representation of differential game logic.
//!
//! All values are immutable once built and can be shared freely between
//! threads.

mod ident;
mod number;
mod subst;
mod syntax;
mod vars;

pub use ident::{ident, Ident, IdentError, KEYWORDS};
pub use number::{decimal_expansion, Numeral};
pub use subst::{fresh, subst_term, substitute, substitute_all, substitute_term, Substitution};
pub use syntax::{Formula, Game, OdeEquation, Rel, Term};
pub use vars::{written_vars, FreeVars, VarSet};
