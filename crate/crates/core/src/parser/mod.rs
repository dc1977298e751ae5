//! Concrete syntax for dGL formulas.
//!
//! ```text
//! terms      e ::= x | 12 | 0.5 | -e | e+e | e-e | e*e | e/e | e^n | (e)
//! formulas   P ::= true | false | e ~ e | !P | P&P | P|P | P->P | P<->P
//!                | \forall x P | \exists x P | <a> P | [a] P | (P)
//!            ~ ::= = | != | < | <= | > | >=
//! games      a ::= x := e; | x := *; | ?P; | {x'=e, y'=e & P}
//!                | a a | a ++ a | {a}* | {a}^@ | {a}
//! ```
//!
//! Precedence from tightest: `!` and quantifiers and modalities, `&`, `|`,
//! `->` (right associative), `<->`. In games `;`-sequencing binds tighter
//! than `++`. A `;` directly before `>`, `]`, `}` or `++` may be omitted.
//! `#` starts a comment that runs to the end of the line.

mod diagnostic;
mod lexer;
mod parse;
mod print;

pub use diagnostic::{diagnose, feedback, line_col, Diagnostic, DiagnosticCode, ParseFailure, SourceSpan};
pub use parse::{parse_formula, parse_formula_bytes, parse_formula_raw, parse_game, parse_term};
pub use print::{print_formula, print_game, print_term};
