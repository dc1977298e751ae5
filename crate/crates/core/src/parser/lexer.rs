use super::SourceSpan;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Number(String),
    True,
    False,
    Forall,
    Exists,
    Prime,
    Assign,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    DualOp,
    ChoiceOp,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    Not,
    And,
    Or,
    Imply,
    Equiv,
    Question,
    Semi,
    Comma,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) | Tok::Number(s) => s.clone(),
            Tok::Eof => "end of input".to_string(),
            other => other.symbol().to_string(),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::True => "true",
            Tok::False => "false",
            Tok::Forall => "\\forall",
            Tok::Exists => "\\exists",
            Tok::Prime => "'",
            Tok::Assign => ":=",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Caret => "^",
            Tok::DualOp => "^@",
            Tok::ChoiceOp => "++",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::Eq => "=",
            Tok::Ne => "!=",
            Tok::Not => "!",
            Tok::And => "&",
            Tok::Or => "|",
            Tok::Imply => "->",
            Tok::Equiv => "<->",
            Tok::Question => "?",
            Tok::Semi => ";",
            Tok::Comma => ",",
            Tok::Ident(_) | Tok::Number(_) | Tok::Eof => "",
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

/// A lexeme the grammar has no use for. `hint` names the intended operator
/// for common look-alikes such as `==` or `&&`.
#[derive(Debug, Clone)]
pub(crate) struct LexError {
    pub text: String,
    pub span: SourceSpan,
    pub hint: Option<&'static str>,
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, LexError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'#' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let at = |k: usize| bytes.get(i + k).copied();
        let (tok, len) = if c.is_ascii_alphabetic() {
            let mut j = i + 1;
            while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                j += 1;
            }
            let word = &src[i..j];
            let tok = match word {
                "true" => Tok::True,
                "false" => Tok::False,
                _ => Tok::Ident(word.to_string()),
            };
            (tok, j - i)
        } else if c.is_ascii_digit() || (c == b'.' && at(1).is_some_and(|d| d.is_ascii_digit())) {
            let mut j = i;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            if j < bytes.len() && bytes[j] == b'.' {
                j += 1;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
            }
            if j < bytes.len() && (bytes[j].is_ascii_alphabetic() || bytes[j] == b'_') {
                let mut k = j;
                while k < bytes.len() && (bytes[k].is_ascii_alphanumeric() || bytes[k] == b'_') {
                    k += 1;
                }
                return Err(LexError {
                    text: src[i..k].to_string(),
                    span: SourceSpan::new(i, k),
                    hint: Some("write multiplication explicitly, e.g. 2*x"),
                });
            }
            (Tok::Number(src[i..j].to_string()), j - i)
        } else if c == b'\\' {
            let mut j = i + 1;
            while j < bytes.len() && bytes[j].is_ascii_alphabetic() {
                j += 1;
            }
            match &src[i + 1..j] {
                "forall" => (Tok::Forall, j - i),
                "exists" => (Tok::Exists, j - i),
                _ => {
                    return Err(LexError {
                        text: src[i..j.max(i + 1)].to_string(),
                        span: SourceSpan::new(i, j.max(i + 1)),
                        hint: Some("only \\forall and \\exists are supported"),
                    })
                }
            }
        } else {
            match (c, at(1), at(2)) {
                (b'<', Some(b'-'), Some(b'>')) => (Tok::Equiv, 3),
                (b'<', Some(b'='), _) => (Tok::Le, 2),
                (b'<', _, _) => (Tok::Lt, 1),
                (b'>', Some(b'='), _) => (Tok::Ge, 2),
                (b'>', _, _) => (Tok::Gt, 1),
                (b'-', Some(b'>'), _) => (Tok::Imply, 2),
                (b'-', _, _) => (Tok::Minus, 1),
                (b'=', Some(b'='), _) => return Err(look_alike(i, 2, "==", "use '=' for equality")),
                (b'=', Some(b'>'), _) => return Err(look_alike(i, 2, "=>", "use '->' for implication")),
                (b'=', _, _) => (Tok::Eq, 1),
                (b'!', Some(b'='), _) => (Tok::Ne, 2),
                (b'!', _, _) => (Tok::Not, 1),
                (b'&', Some(b'&'), _) => return Err(look_alike(i, 2, "&&", "use a single '&' for conjunction")),
                (b'&', _, _) => (Tok::And, 1),
                (b'|', Some(b'|'), _) => return Err(look_alike(i, 2, "||", "use a single '|' for disjunction")),
                (b'|', _, _) => (Tok::Or, 1),
                (b':', Some(b'='), _) => (Tok::Assign, 2),
                (b'+', Some(b'+'), _) => (Tok::ChoiceOp, 2),
                (b'+', _, _) => (Tok::Plus, 1),
                (b'^', Some(b'@'), _) => (Tok::DualOp, 2),
                (b'^', _, _) => (Tok::Caret, 1),
                (b'*', _, _) => (Tok::Star, 1),
                (b'/', _, _) => (Tok::Slash, 1),
                (b'(', _, _) => (Tok::LParen, 1),
                (b')', _, _) => (Tok::RParen, 1),
                (b'{', _, _) => (Tok::LBrace, 1),
                (b'}', _, _) => (Tok::RBrace, 1),
                (b'[', _, _) => (Tok::LBracket, 1),
                (b']', _, _) => (Tok::RBracket, 1),
                (b'?', _, _) => (Tok::Question, 1),
                (b';', _, _) => (Tok::Semi, 1),
                (b',', _, _) => (Tok::Comma, 1),
                (b'\'', _, _) => (Tok::Prime, 1),
                _ => {
                    let width = src[i..].chars().next().map_or(1, char::len_utf8);
                    return Err(LexError {
                        text: src[i..i + width].to_string(),
                        span: SourceSpan::new(i, i + width),
                        hint: None,
                    });
                }
            }
        };
        i += len;
        out.push(Token { tok, span: SourceSpan::new(start, i) });
    }
    out.push(Token { tok: Tok::Eof, span: SourceSpan::new(src.len(), src.len()) });
    Ok(out)
}

fn look_alike(at: usize, len: usize, text: &str, hint: &'static str) -> LexError {
    LexError { text: text.to_string(), span: SourceSpan::new(at, at + len), hint: Some(hint) }
}
