//! Prompt assembly for the propose and revise queries.

use super::transport::Message;
use crate::bench::Benchmark;
use crate::parser::{feedback, parse_formula};

const TASK: &str = "\
You translate kinematics word problems into differential game logic (dGL) formulas.
Reply with a single formula of the form `assumptions -> <game> goal` and nothing else.
The goal must hold exactly when the quantity asked for has its correct value, and the
game must actually simulate the motion: assign and evolve the state, do not write the
answer into the goal directly.";

const GRAMMAR: &str = "\
Syntax (ASCII only):
  terms     x  2  0.5  -e  e+e  e-e  e*e  e/e  e^2   (exponents are integer literals)
  formulas  e=e e!=e e<e e<=e e>e e>=e  true false  !F  F&G  F|G  F->G  F<->G
            \\forall x F   \\exists x F   <game> F   [game] F
  games     x := e;        assignment
            x := *;        nondeterministic assignment
            ?F;            test
            {x'=e, y'=e & F}   continuous evolution with optional domain F
            a b            sequence
            {a ++ b}       choice
            {a}*           repetition
            {a}^@          hand control to the opponent";

const MISTAKES: &str = "\
Common mistakes:
  - Unicode symbols such as \u{2227}, \u{2264}, \u{27e8} or \u{2032}: write &, <=, < and ' instead.
  - A missing `;` after an assignment or test.
  - `==` for equality: use `=`.
  - `2x` for multiplication: write `2*x`.
  - Assigning a quantity that the problem fixes (x := d) where a test (?x = d;) is meant.
  - Forgetting assumptions such as positive durations or nonzero distances.";

pub fn system_prompt() -> String {
    format!("{TASK}\n\n{GRAMMAR}\n\n{MISTAKES}")
}

/// A worked example of fixing a rejected formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairExample {
    pub question: String,
    pub broken: String,
    pub fixed: String,
}

impl RepairExample {
    /// Parser feedback for the broken formula.
    pub fn feedback(&self) -> String {
        match parse_formula(&self.broken) {
            Ok(_) => String::new(),
            Err(d) => feedback(&d),
        }
    }
}

pub fn default_repair_examples() -> Vec<RepairExample> {
    vec![
        RepairExample {
            question: "A cart rolls at constant speed u for time T. Find the distance s it covers.".into(),
            broken: "u>0 & T>0 -> \u{27e8}x:=0; t:=0; {x'=u, t'=1}; ?t=T;\u{27e9} x=s".into(),
            fixed: "u>0 & T>0 -> <x:=0; t:=0; {x'=u, t'=1}; ?t=T;> x=s".into(),
        },
        RepairExample {
            question: "A sled starts at rest and accelerates uniformly at a until its speed is w. \
                       Find the elapsed time T."
                .into(),
            broken: "a>0 & w>0 -> <v:=0 t:=0; {v'=a, t'=1}; ?v=w;> t=T".into(),
            fixed: "a>0 & w>0 -> <v:=0; t:=0; {v'=a, t'=1}; ?v=w;> t=T".into(),
        },
    ]
}

fn question_text(question: &str) -> String {
    format!("Problem:\n{}\n\nAnswer with the dGL formula only.", question.trim())
}

/// System message, one user/assistant pair per solved example, then the question.
pub fn build_propose_prompt(question: &str, examples: &[Benchmark]) -> Vec<Message> {
    let mut messages = vec![Message::system(system_prompt())];
    for ex in examples.iter().take(4) {
        messages.push(Message::user(question_text(&ex.question)));
        messages.push(Message::assistant(ex.reference_model.clone().unwrap_or_default()));
    }
    messages.push(Message::user(question_text(question)));
    messages
}

/// A rejected proposal and the reason it was rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FailedProposal {
    pub text: String,
    pub feedback: String,
}

fn rejection(feedback: &str) -> String {
    format!("The formula was rejected:\n{feedback}\nPlease send a corrected formula.")
}

/// System message, the repair examples, then the question followed by every
/// failed proposal with its feedback, newest last.
pub fn build_revise_prompt(question: &str, history: &[FailedProposal], repair_examples: &[RepairExample]) -> Vec<Message> {
    assert!(!history.is_empty(), "revise prompt needs at least one failed proposal");
    let mut messages = vec![Message::system(system_prompt())];
    for ex in repair_examples.iter().take(2) {
        messages.push(Message::user(question_text(&ex.question)));
        messages.push(Message::assistant(ex.broken.clone()));
        messages.push(Message::user(rejection(&ex.feedback())));
        messages.push(Message::assistant(ex.fixed.clone()));
    }
    messages.push(Message::user(question_text(question)));
    for h in history {
        messages.push(Message::assistant(h.text.clone()));
        messages.push(Message::user(rejection(&h.feedback)));
    }
    messages
}

/// Strips code fences and leading prose from a completion.
pub fn extract_formula(completion: &str) -> String {
    let text = completion.trim();
    if let Some(start) = text.find("```") {
        let after = &text[start + 3..];
        let body = after.split_once('\n').map_or("", |(_lang, rest)| rest);
        let body = body.split("```").next().unwrap_or(body);
        return body.trim().to_string();
    }
    let lines: Vec<&str> = text.lines().collect();
    let first = lines.iter().position(|l| looks_like_formula(l)).unwrap_or(0);
    lines[first..].join("\n").trim().to_string()
}

fn looks_like_formula(line: &str) -> bool {
    let l = line.trim();
    if l.is_empty() || l.ends_with(':') {
        return false;
    }
    let words = l.split_whitespace().filter(|w| w.chars().all(|c| c.is_ascii_alphabetic()) && w.len() > 3).count();
    let symbols = l.chars().filter(|c| "<>[]{}=:;&|?'()".contains(*c)).count();
    symbols > 0 && symbols * 2 >= words
}
