use std::collections::HashMap;

use super::diagnostic::{diagnose, unicode_failures, Diagnostic, ParseFailure, SourceSpan};
use super::lexer::{tokenize, Tok, Token};
use crate::ir::{Formula, Game, Ident, Numeral, OdeEquation, Rel, Term};

const MAX_DEPTH: usize = 96;
const MAX_EXPONENT: u32 = 64;

type PResult<T> = Result<T, ParseFailure>;

/// Parses one formula, reporting every problem as feedback diagnostics.
///
/// Non-ASCII characters are reported first (one diagnostic per distinct
/// character) and suppress grammar errors.
pub fn parse_formula(src: &str) -> Result<Formula, Vec<Diagnostic>> {
    parse_formula_raw(src).map_err(|failures| failures.iter().flat_map(|f| diagnose(src, f)).collect())
}

/// Like [`parse_formula`] for raw bytes; invalid UTF-8 is reported as a
/// Unicode problem.
pub fn parse_formula_bytes(bytes: &[u8]) -> Result<Formula, Vec<Diagnostic>> {
    let text = String::from_utf8_lossy(bytes);
    parse_formula(&text)
}

/// Parses a standalone game, e.g. `x := 0; {x' = v};`.
pub fn parse_game(src: &str) -> Result<Game, Vec<Diagnostic>> {
    let run = || -> Result<Game, Vec<ParseFailure>> {
        let mut parser = Parser::new(src)?;
        let game = parser.game().map_err(|e| vec![e])?;
        parser.expect_eof().map_err(|e| vec![e])?;
        Ok(game)
    };
    run().map_err(|failures| failures.iter().flat_map(|f| diagnose(src, f)).collect())
}

/// Parses a term such as `2*v0*(v1+v2)`.
pub fn parse_term(src: &str) -> Result<Term, Vec<Diagnostic>> {
    let run = || -> Result<Term, Vec<ParseFailure>> {
        let mut parser = Parser::new(src)?;
        let term = parser.term().map_err(|e| vec![e])?;
        parser.expect_eof().map_err(|e| vec![e])?;
        Ok(term)
    };
    run().map_err(|failures| failures.iter().flat_map(|f| diagnose(src, f)).collect())
}

/// Parses a formula and returns the undiagnosed failures.
pub fn parse_formula_raw(src: &str) -> Result<Formula, Vec<ParseFailure>> {
    let mut parser = Parser::new(src)?;
    let f = parser.formula().map_err(|e| vec![e])?;
    parser.expect_eof().map_err(|e| vec![e])?;
    Ok(f)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    depth: usize,
    modalities: Vec<(char, char, SourceSpan)>,
    paren_memo: HashMap<usize, Result<(Formula, usize), ParseFailure>>,
}

fn check_balance(toks: &[Token]) -> PResult<()> {
    let mut stack: Vec<(&Tok, SourceSpan)> = Vec::new();
    for t in toks {
        match &t.tok {
            Tok::LParen | Tok::LBrace | Tok::LBracket => stack.push((&t.tok, t.span)),
            Tok::RParen | Tok::RBrace | Tok::RBracket => {
                let want = match t.tok {
                    Tok::RParen => Tok::LParen,
                    Tok::RBrace => Tok::LBrace,
                    _ => Tok::LBracket,
                };
                match stack.pop() {
                    None => return Err(ParseFailure::UnexpectedClose { close: t.tok.describe(), span: t.span }),
                    Some((open, span)) if *open != want => {
                        return Err(ParseFailure::Unclosed { open: open.describe(), span })
                    }
                    Some(_) => {}
                }
            }
            _ => {}
        }
    }
    match stack.pop() {
        Some((open, span)) => Err(ParseFailure::Unclosed { open: open.describe(), span }),
        None => Ok(()),
    }
}

fn rel_of(tok: &Tok) -> Option<Rel> {
    Some(match tok {
        Tok::Eq => Rel::Eq,
        Tok::Ne => Rel::Ne,
        Tok::Lt => Rel::Lt,
        Tok::Le => Rel::Le,
        Tok::Gt => Rel::Gt,
        Tok::Ge => Rel::Ge,
        _ => return None,
    })
}

impl Parser {
    fn new(src: &str) -> Result<Self, Vec<ParseFailure>> {
        let unicode = unicode_failures(src);
        if !unicode.is_empty() {
            return Err(unicode);
        }
        let toks = tokenize(src).map_err(|e| {
            vec![ParseFailure::UnknownLexeme { text: e.text, hint: e.hint, span: e.span }]
        })?;
        check_balance(&toks).map_err(|e| vec![e])?;
        Ok(Parser { toks, pos: 0, depth: 0, modalities: Vec::new(), paren_memo: HashMap::new() })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn unexpected(&self, expected: &str) -> ParseFailure {
        ParseFailure::Unexpected { found: self.peek().describe(), expected: expected.to_string(), span: self.span() }
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> PResult<()> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn expect_eof(&mut self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(ParseFailure::Trailing { span: self.span() })
        }
    }

    fn enter(&mut self) -> PResult<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            Err(ParseFailure::TooDeep { span: self.span() })
        } else {
            Ok(())
        }
    }

    fn leave(&mut self) {
        self.depth -= 1;
    }

    fn ident(&mut self, expected: &str) -> PResult<Ident> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                let span = self.span();
                self.bump();
                Ident::new(name).map_err(|e| ParseFailure::Unexpected { found: e.0, expected: expected.to_string(), span })
            }
            _ => Err(self.unexpected(expected)),
        }
    }

    // ---- formulas -------------------------------------------------------

    fn formula(&mut self) -> PResult<Formula> {
        self.enter()?;
        let r = self.equiv();
        self.leave();
        r
    }

    fn equiv(&mut self) -> PResult<Formula> {
        let mut lhs = self.imply()?;
        while self.eat(&Tok::Equiv) {
            let rhs = self.imply()?;
            lhs = Formula::Equiv(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn imply(&mut self) -> PResult<Formula> {
        let lhs = self.or()?;
        if self.eat(&Tok::Imply) {
            let rhs = self.imply()?;
            return Ok(Formula::Imply(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> PResult<Formula> {
        let lhs = self.and()?;
        if self.eat(&Tok::Or) {
            let rhs = self.or()?;
            return Ok(Formula::Or(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> PResult<Formula> {
        let lhs = self.unary()?;
        if self.eat(&Tok::And) {
            let rhs = self.and()?;
            return Ok(Formula::And(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Formula> {
        self.enter()?;
        let r = self.unary_inner();
        self.leave();
        r
    }

    fn unary_inner(&mut self) -> PResult<Formula> {
        match self.peek() {
            Tok::Not => {
                self.bump();
                Ok(Formula::Not(Box::new(self.unary()?)))
            }
            Tok::Forall | Tok::Exists => {
                let universal = *self.peek() == Tok::Forall;
                self.bump();
                let x = self.ident("a variable name after the quantifier")?;
                let body = self.unary()?;
                Ok(if universal { Formula::Forall(x, Box::new(body)) } else { Formula::Exists(x, Box::new(body)) })
            }
            Tok::Lt => self.modality('<', '>'),
            Tok::LBracket => self.modality('[', ']'),
            _ => self.atom(),
        }
    }

    fn modality(&mut self, open: char, close: char) -> PResult<Formula> {
        let open_span = self.bump().span;
        if !self.at_game_unit() {
            return Err(ParseFailure::NotAGame { open, span: self.span() });
        }
        self.modalities.push((open, close, open_span));
        let game = self.game();
        self.modalities.pop();
        let game = game?;
        let closer = if close == '>' { Tok::Gt } else { Tok::RBracket };
        if !self.eat(&closer) {
            return Err(ParseFailure::UnclosedModality { open, close, open_span, span: self.span() });
        }
        let post = self.unary()?;
        Ok(if open == '<' { Formula::diamond(game, post) } else { Formula::boxed(game, post) })
    }

    fn atom(&mut self) -> PResult<Formula> {
        match self.peek() {
            Tok::True => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::False => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::LParen => self.paren_atom(),
            _ if self.at_game_unit() => self.stray_game(),
            _ => self.comparison(),
        }
    }

    /// `( formula )` or a comparison whose left term starts with `(`.
    fn paren_atom(&mut self) -> PResult<Formula> {
        let start = self.pos;
        let attempt = match self.paren_memo.get(&start) {
            Some(r) => r.clone(),
            None => {
                self.bump();
                let r = self.formula().and_then(|f| {
                    self.expect(Tok::RParen, "')'")?;
                    Ok((f, self.pos))
                });
                self.paren_memo.insert(start, r.clone());
                r
            }
        };
        match attempt {
            Ok((f, end)) => {
                self.pos = end;
                Ok(f)
            }
            Err(formula_err) => {
                self.pos = start;
                match self.comparison() {
                    Ok(f) => Ok(f),
                    Err(cmp_err) => {
                        if cmp_err.span().start >= formula_err.span().start {
                            Err(cmp_err)
                        } else {
                            Err(formula_err)
                        }
                    }
                }
            }
        }
    }

    /// A game where a formula was expected: parse it to surface its own
    /// errors, then complain about the missing modality.
    fn stray_game(&mut self) -> PResult<Formula> {
        let span = self.span();
        self.game()?;
        match self.peek() {
            Tok::Eof | Tok::Imply | Tok::And | Tok::Or | Tok::Equiv | Tok::RParen => {
                Err(ParseFailure::GameOutsideModality { span })
            }
            _ => Err(self.unexpected("a game statement or the end of the game")),
        }
    }

    fn comparison(&mut self) -> PResult<Formula> {
        let lhs = self.term()?;
        let Some(rel) = rel_of(self.peek()) else {
            return Err(self.unexpected("a comparison operator (=, !=, <, <=, >, >=)"));
        };
        self.bump();
        let rhs = self.term()?;
        Ok(Formula::Cmp(lhs, rel, rhs))
    }

    // ---- terms ----------------------------------------------------------

    fn term(&mut self) -> PResult<Term> {
        let mut lhs = self.product()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Term::add(lhs, self.product()?);
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Term::sub(lhs, self.product()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn product(&mut self) -> PResult<Term> {
        let mut lhs = self.negation()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Term::mul(lhs, self.negation()?);
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Term::div(lhs, self.negation()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn negation(&mut self) -> PResult<Term> {
        self.enter()?;
        let r = if self.eat(&Tok::Minus) { self.negation().map(Term::neg) } else { self.power() };
        self.leave();
        r
    }

    fn power(&mut self) -> PResult<Term> {
        let mut base = self.primary()?;
        while *self.peek() == Tok::Caret {
            self.bump();
            let exp = self.exponent()?;
            base = Term::pow(base, exp);
        }
        Ok(base)
    }

    fn exponent(&mut self) -> PResult<u32> {
        let span = self.span();
        let parenthesized = self.eat(&Tok::LParen);
        let n = match self.peek().clone() {
            Tok::Number(lit) if !lit.contains('.') => {
                self.bump();
                lit.parse::<u32>().ok().filter(|n| *n <= MAX_EXPONENT)
            }
            _ => None,
        };
        let n = n.ok_or(ParseFailure::BadExponent { span })?;
        if parenthesized && !self.eat(&Tok::RParen) {
            return Err(ParseFailure::BadExponent { span });
        }
        Ok(n)
    }

    fn primary(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::Number(lit) => {
                let span = self.span();
                self.bump();
                Numeral::from_decimal(&lit)
                    .map(Term::Num)
                    .ok_or(ParseFailure::UnknownLexeme { text: lit, hint: None, span })
            }
            Tok::Ident(_) => {
                let x = self.ident("a variable")?;
                if *self.peek() == Tok::Prime {
                    return Err(ParseFailure::BadOde {
                        detail: format!("{x}' may only appear on the left of an equation inside {{...}}"),
                        span: self.span(),
                    });
                }
                Ok(Term::Var(x))
            }
            Tok::LParen => {
                self.enter()?;
                self.bump();
                let t = self.term();
                self.leave();
                let t = t?;
                self.expect(Tok::RParen, "')'")?;
                Ok(t)
            }
            _ => Err(self.unexpected("a number, a variable or '('")),
        }
    }

    // ---- games ----------------------------------------------------------

    /// Whether the next tokens begin an atomic game or a braced block.
    fn at_game_unit(&self) -> bool {
        match self.peek() {
            Tok::Ident(_) => matches!(self.peek_at(1), Tok::Assign | Tok::Prime),
            Tok::Question | Tok::LBrace => true,
            _ => false,
        }
    }

    fn game(&mut self) -> PResult<Game> {
        self.enter()?;
        let r = self.choice();
        self.leave();
        r
    }

    fn choice(&mut self) -> PResult<Game> {
        let mut lhs = self.sequence()?;
        while self.eat(&Tok::ChoiceOp) {
            let rhs = self.sequence()?;
            lhs = Game::choice(lhs, rhs);
        }
        Ok(lhs)
    }

    fn sequence(&mut self) -> PResult<Game> {
        if !self.at_game_unit() {
            return Err(self.unexpected("a game statement"));
        }
        let mut game = self.unit()?;
        while self.at_game_unit() {
            let next = self.unit()?;
            game = Game::seq(game, next);
        }
        Ok(game)
    }

    fn unit(&mut self) -> PResult<Game> {
        match self.peek().clone() {
            Tok::Question => {
                self.bump();
                let f = self.formula()?;
                self.end_statement()?;
                Ok(Game::Test(f))
            }
            Tok::LBrace => {
                if matches!(self.peek_at(1), Tok::Ident(_)) && *self.peek_at(2) == Tok::Prime {
                    let ode = self.ode()?;
                    self.eat(&Tok::Semi);
                    return Ok(ode);
                }
                self.bump();
                if *self.peek() == Tok::RBrace {
                    return Err(ParseFailure::Unexpected {
                        found: "}".into(),
                        expected: "a game inside '{...}'".into(),
                        span: self.span(),
                    });
                }
                let inner = self.game()?;
                if !self.eat(&Tok::RBrace) {
                    return Err(self.unexpected("'}' or another game statement"));
                }
                let game = if self.eat(&Tok::Star) {
                    Game::repeat(inner)
                } else if self.eat(&Tok::DualOp) {
                    Game::dual(inner)
                } else {
                    inner
                };
                self.eat(&Tok::Semi);
                Ok(game)
            }
            Tok::Ident(_) => {
                if *self.peek_at(1) == Tok::Prime {
                    return Err(ParseFailure::BadOde {
                        detail: "differential equations must be wrapped in braces, e.g. {x' = v}".into(),
                        span: self.span(),
                    });
                }
                let x = self.ident("a variable")?;
                self.expect(Tok::Assign, "':='")?;
                let game = if *self.peek() == Tok::Star {
                    self.bump();
                    Game::AssignAny(x)
                } else {
                    Game::Assign(x, self.term()?)
                };
                self.end_statement()?;
                Ok(game)
            }
            _ => Err(self.unexpected("a game statement")),
        }
    }

    /// Statement terminator; a missing `;` is tolerated right before a
    /// closing delimiter or `++`.
    fn end_statement(&mut self) -> PResult<()> {
        match self.peek() {
            Tok::Semi => {
                self.bump();
                Ok(())
            }
            Tok::Gt | Tok::RBracket | Tok::RBrace | Tok::ChoiceOp | Tok::Eof => Ok(()),
            _ if self.at_game_unit() => Err(ParseFailure::MissingSemicolon { span: self.span() }),
            _ => match self.modalities.last() {
                Some(&(open, close, open_span)) => {
                    Err(ParseFailure::UnclosedModality { open, close, open_span, span: self.span() })
                }
                None => Err(self.unexpected("';'")),
            },
        }
    }

    fn ode(&mut self) -> PResult<Game> {
        self.bump();
        let mut eqs: Vec<OdeEquation> = Vec::new();
        loop {
            let span = self.span();
            let var = match self.peek().clone() {
                Tok::Ident(_) if *self.peek_at(1) == Tok::Prime => self.ident("a variable")?,
                _ => {
                    return Err(ParseFailure::BadOde {
                        detail: format!("expected an equation x' = term but found '{}'", self.peek().describe()),
                        span,
                    })
                }
            };
            self.bump();
            if !self.eat(&Tok::Eq) {
                return Err(ParseFailure::BadOde {
                    detail: format!("expected '=' after {var}'"),
                    span: self.span(),
                });
            }
            let rhs = self.term()?;
            if eqs.iter().any(|eq| eq.var == var) {
                return Err(ParseFailure::BadOde { detail: format!("{var}' is defined twice"), span });
            }
            eqs.push(OdeEquation { var, rhs });
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                }
                Tok::And => {
                    self.bump();
                    if *self.peek() == Tok::RBrace {
                        return Err(ParseFailure::BadOde {
                            detail: "the evolution domain after '&' is empty".into(),
                            span: self.span(),
                        });
                    }
                    let domain = self.formula()?;
                    if !self.eat(&Tok::RBrace) {
                        return Err(ParseFailure::BadOde {
                            detail: format!("expected '}}' after the evolution domain, found '{}'", self.peek().describe()),
                            span: self.span(),
                        });
                    }
                    return Ok(Game::Ode(eqs, domain));
                }
                Tok::RBrace => {
                    self.bump();
                    return Ok(Game::Ode(eqs, Formula::True));
                }
                other => {
                    return Err(ParseFailure::BadOde {
                        detail: format!("expected ',', '&' or '}}' but found '{}'", other.describe()),
                        span: self.span(),
                    });
                }
            }
        }
    }
}
