//! Static checks on a parsed candidate model.

use serde::Serialize;
use thiserror::Error;

use crate::ir::{written_vars, Formula, Game, VarSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    Diamond,
    Box,
}

/// A model of shape `A1 -> (A2 -> ... -> <game> post)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitModel {
    /// The modality-free antecedents `A1, A2, ...` in order.
    pub assumption_list: Vec<Formula>,
    pub polarity: Polarity,
    pub game: Game,
    pub post: Formula,
}

impl SplitModel {
    /// `A1 & A2 & ...`, or `true` when there are none.
    pub fn assumptions(&self) -> Formula {
        Formula::conjunction(self.assumption_list.iter().cloned())
    }

    pub fn modality(&self) -> Formula {
        match self.polarity {
            Polarity::Diamond => Formula::diamond(self.game.clone(), self.post.clone()),
            Polarity::Box => Formula::boxed(self.game.clone(), self.post.clone()),
        }
    }

    /// Rebuilds the original formula.
    pub fn reassemble(&self) -> Formula {
        self.assumption_list
            .iter()
            .rev()
            .fold(self.modality(), |acc, a| Formula::Imply(Box::new(a.clone()), Box::new(acc)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("model is not of shape assumptions -> <game> goal: {detail}")]
pub struct ShapeError {
    pub detail: String,
}

pub fn split_assumptions(f: &Formula) -> Result<SplitModel, ShapeError> {
    let mut assumption_list = Vec::new();
    let mut cur = f;
    loop {
        match cur {
            Formula::Imply(a, rest) if a.is_modality_free() => {
                assumption_list.push((**a).clone());
                cur = rest;
            }
            Formula::Diamond(g, post) | Formula::Box(g, post) => {
                let polarity = if matches!(cur, Formula::Diamond(..)) { Polarity::Diamond } else { Polarity::Box };
                return Ok(SplitModel { assumption_list, polarity, game: (**g).clone(), post: (**post).clone() });
            }
            Formula::Imply(..) => {
                return Err(ShapeError { detail: "an assumption contains a modality".into() });
            }
            other if other.is_modality_free() => {
                return Err(ShapeError { detail: "no modality found".into() });
            }
            _ => {
                return Err(ShapeError {
                    detail: "the modality must be the final consequent of a chain of implications".into(),
                })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("only {} variable(s) written ({}), at least {required} required", written.len(), list(written))]
pub struct StasisError {
    pub written: VarSet,
    pub required: usize,
}

fn list(vars: &VarSet) -> String {
    if vars.is_empty() {
        return "none".into();
    }
    vars.iter().map(|v| v.as_str()).collect::<Vec<_>>().join(", ")
}

/// Passes when the game writes at least `min_writes` distinct variables.
pub fn stasis_check(g: &Game, min_writes: usize) -> Result<VarSet, StasisError> {
    let written = written_vars(g);
    if written.len() >= min_writes {
        Ok(written)
    } else {
        Err(StasisError { written, required: min_writes })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_formula, parse_game};

    const MODEL_2: &str = "(dh>0 & v0>0 & v1+v2>0) -> <x:=0; dvavg:=0; {x'=v0, dvavg'=vavg}; ?dh=x; \
        t:=0; {x'=v1, dvavg'=vavg, t'=1}; th:=t; {x'=v2, dvavg'=vavg, t'=1}; ?t=2*th; ?x=2*dh;> dvavg=x";

    #[test]
    fn running_example_splits() {
        let f = parse_formula(MODEL_2).unwrap();
        let split = split_assumptions(&f).unwrap();
        assert_eq!(split.assumptions(), parse_formula("dh>0 & v0>0 & v1+v2>0").unwrap());
        assert_eq!(split.polarity, Polarity::Diamond);
        assert_eq!(split.post, parse_formula("dvavg = x").unwrap());
        assert_eq!(split.reassemble(), f);
    }

    #[test]
    fn bare_modality_has_trivial_assumptions() {
        let split = split_assumptions(&parse_formula("<x:=0;> x=0").unwrap()).unwrap();
        assert_eq!(split.assumptions(), Formula::True);
    }

    #[test]
    fn nested_implications_reassemble() {
        let f = parse_formula("a > 0 -> b > 0 -> [x := a;] x > 0").unwrap();
        let split = split_assumptions(&f).unwrap();
        assert_eq!(split.assumption_list.len(), 2);
        assert_eq!(split.polarity, Polarity::Box);
        assert_eq!(split.reassemble(), f);
    }

    #[test]
    fn rejected_shapes() {
        for src in ["x > 0 & <x:=0;> x = 0", "x > 0", "<x:=0;> x=0 -> y > 0", "(<x:=0;> x=0) -> <x:=1;> x=1"] {
            assert!(split_assumptions(&parse_formula(src).unwrap()).is_err(), "{src}");
        }
    }

    #[test]
    fn stasis() {
        let f = parse_formula(MODEL_2).unwrap();
        let split = split_assumptions(&f).unwrap();
        assert_eq!(stasis_check(&split.game, 2).unwrap().len(), 4);
        let empty = parse_game("?vavg = 7;").unwrap();
        let err = stasis_check(&empty, 2).unwrap_err();
        assert!(err.written.is_empty());
        assert!(stasis_check(&parse_game("{x' = 1}").unwrap(), 1).is_ok());
    }
}
