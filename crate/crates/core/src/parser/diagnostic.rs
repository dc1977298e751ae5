//! Parse failures and the short feedback strings built from them.
//!
//! Apart from the Unicode template, the message catalog is our own wording.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        SourceSpan { start, end }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticCode {
    UnicodeChar,
    UnbalancedDelimiter,
    UnknownToken,
    MissingSemicolon,
    BadModality,
    BadOde,
    TrailingInput,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub code: DiagnosticCode,
    pub message: String,
    pub span: SourceSpan,
    /// 1-based line of `span.start`.
    pub line: usize,
    /// 1-based column of `span.start`, counted in characters.
    pub column: usize,
    pub excerpt: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} (line {}, column {})", self.message, self.line, self.column)
    }
}

/// Feedback text for a failed parse, one diagnostic per line.
pub fn feedback(diagnostics: &[Diagnostic]) -> String {
    diagnostics.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n")
}

/// What went wrong, before it is rendered into a message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseFailure {
    Unicode { ch: char, span: SourceSpan },
    UnknownLexeme { text: String, hint: Option<&'static str>, span: SourceSpan },
    Unclosed { open: String, span: SourceSpan },
    UnexpectedClose { close: String, span: SourceSpan },
    Unexpected { found: String, expected: String, span: SourceSpan },
    MissingSemicolon { span: SourceSpan },
    UnclosedModality { open: char, close: char, open_span: SourceSpan, span: SourceSpan },
    GameOutsideModality { span: SourceSpan },
    NotAGame { open: char, span: SourceSpan },
    BadOde { detail: String, span: SourceSpan },
    Trailing { span: SourceSpan },
    BadExponent { span: SourceSpan },
    TooDeep { span: SourceSpan },
}

impl ParseFailure {
    pub fn span(&self) -> SourceSpan {
        match self {
            ParseFailure::Unicode { span, .. }
            | ParseFailure::UnknownLexeme { span, .. }
            | ParseFailure::Unclosed { span, .. }
            | ParseFailure::UnexpectedClose { span, .. }
            | ParseFailure::Unexpected { span, .. }
            | ParseFailure::MissingSemicolon { span }
            | ParseFailure::UnclosedModality { span, .. }
            | ParseFailure::GameOutsideModality { span }
            | ParseFailure::NotAGame { span, .. }
            | ParseFailure::BadOde { span, .. }
            | ParseFailure::Trailing { span }
            | ParseFailure::BadExponent { span }
            | ParseFailure::TooDeep { span } => *span,
        }
    }

    pub fn code(&self) -> DiagnosticCode {
        match self {
            ParseFailure::Unicode { .. } => DiagnosticCode::UnicodeChar,
            ParseFailure::Unclosed { .. } | ParseFailure::UnexpectedClose { .. } | ParseFailure::UnclosedModality { .. } => {
                DiagnosticCode::UnbalancedDelimiter
            }
            ParseFailure::UnknownLexeme { .. } | ParseFailure::Unexpected { .. } => DiagnosticCode::UnknownToken,
            ParseFailure::MissingSemicolon { .. } => DiagnosticCode::MissingSemicolon,
            ParseFailure::GameOutsideModality { .. } | ParseFailure::NotAGame { .. } => DiagnosticCode::BadModality,
            ParseFailure::BadOde { .. } => DiagnosticCode::BadOde,
            ParseFailure::Trailing { .. } => DiagnosticCode::TrailingInput,
            ParseFailure::BadExponent { .. } | ParseFailure::TooDeep { .. } => DiagnosticCode::Other,
        }
    }
}

const MAX_MESSAGE: usize = 200;
const MAX_EXCERPT: usize = 40;

/// 1-based (line, column) of a byte offset; columns count characters.
pub fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let offset = floor_char_boundary(src, offset.min(src.len()));
    let before = &src[..offset];
    let line = before.matches('\n').count() + 1;
    let line_start = before.rfind('\n').map_or(0, |i| i + 1);
    (line, src[line_start..offset].chars().count() + 1)
}

fn floor_char_boundary(src: &str, mut i: usize) -> usize {
    while i > 0 && !src.is_char_boundary(i) {
        i -= 1;
    }
    i
}

fn clip(text: &str, max: usize) -> String {
    if text.chars().count() <= max {
        return text.to_string();
    }
    let mut out: String = text.chars().take(max.saturating_sub(3)).collect();
    out.push_str("...");
    out
}

fn render(src: &str, failure: &ParseFailure) -> String {
    let at = |span: SourceSpan| {
        let (l, c) = line_col(src, span.start);
        format!("line {l}, column {c}")
    };
    match failure {
        ParseFailure::Unicode { ch, .. } => {
            format!("The input formula contains an unsupported Unicode character (possibly {ch}). Use only ASCII characters.")
        }
        ParseFailure::UnknownLexeme { text, hint, span } => match hint {
            Some(h) => format!("Unknown token '{}' at {}; {h}.", clip(text, 20), at(*span)),
            None => format!("Unknown token '{}' at {}.", clip(text, 20), at(*span)),
        },
        ParseFailure::Unclosed { open, span } => {
            format!("The '{open}' at {} is never closed; check that every delimiter has a partner.", at(*span))
        }
        ParseFailure::UnexpectedClose { close, span } => {
            format!("The '{close}' at {} has no matching opening delimiter.", at(*span))
        }
        ParseFailure::Unexpected { found, expected, span } => {
            format!("Unexpected token '{}' at {}; expected {expected}.", clip(found, 20), at(*span))
        }
        ParseFailure::MissingSemicolon { span } => format!(
            "Missing ';' before {}; end every assignment, test and ODE with ';'.",
            at(*span)
        ),
        ParseFailure::UnclosedModality { open, close, open_span, .. } => format!(
            "The modality '{open}' opened at {} is not closed; write the game between '{open}' and '{close}' followed by the postcondition.",
            at(*open_span)
        ),
        ParseFailure::GameOutsideModality { span } => format!(
            "Game statement at {} appears outside a modality; wrap games in <...> or [...] followed by the postcondition.",
            at(*span)
        ),
        ParseFailure::NotAGame { open, span } => format!(
            "Expected a game after '{open}' at {}; a modality must contain assignments, tests, ODEs or their combinations.",
            at(*span)
        ),
        ParseFailure::BadOde { detail, span } => format!("Malformed ODE at {}: {}.", at(*span), clip(detail, 80)),
        ParseFailure::Trailing { span } => {
            format!("Unexpected input after the end of the formula at {}; the file must contain exactly one formula.", at(*span))
        }
        ParseFailure::BadExponent { span } => format!(
            "Exponent at {} must be a nonnegative integer literal; rewrite roots and symbolic powers with auxiliary variables.",
            at(*span)
        ),
        ParseFailure::TooDeep { span } => format!("The formula is nested too deeply at {}.", at(*span)),
    }
}

/// Turns a parse failure into feedback. Never returns an empty list.
pub fn diagnose(src: &str, failure: &ParseFailure) -> Vec<Diagnostic> {
    let span = failure.span();
    let span = SourceSpan::new(span.start.min(src.len()), span.end.min(src.len()).max(span.start.min(src.len())));
    let (line, column) = line_col(src, span.start);
    let mut message = render(src, failure);
    if message.is_empty() {
        message = "The formula could not be parsed.".to_string();
    }
    let message = clip(&message, MAX_MESSAGE);
    let start = floor_char_boundary(src, span.start);
    let end = floor_char_boundary(src, span.end.max(start));
    let excerpt = if end > start {
        clip(&src[start..end], MAX_EXCERPT)
    } else {
        let line_end = src[start..].find('\n').map_or(src.len(), |i| start + i);
        clip(&src[start..line_end], MAX_EXCERPT)
    };
    vec![Diagnostic { code: failure.code(), message, span, line, column, excerpt }]
}

/// Every distinct non-ASCII character, in order of first appearance.
pub fn unicode_failures(src: &str) -> Vec<ParseFailure> {
    let mut seen = Vec::new();
    let mut out = Vec::new();
    for (i, ch) in src.char_indices() {
        if !ch.is_ascii() && !seen.contains(&ch) {
            seen.push(ch);
            out.push(ParseFailure::Unicode { ch, span: SourceSpan::new(i, i + ch.len_utf8()) });
        }
    }
    out
}
