use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Words the concrete syntax reserves; they can never name a variable.
pub const KEYWORDS: &[&str] = &["true", "false"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid identifier `{0}`: expected an ASCII letter followed by letters, digits or '_'")]
pub struct IdentError(pub String);

/// A variable name: `[A-Za-z][A-Za-z0-9_]*`, never a keyword.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Ident(String);

impl Ident {
    pub fn new(name: impl Into<String>) -> Result<Self, IdentError> {
        let name = name.into();
        if Self::is_valid(&name) {
            Ok(Ident(name))
        } else {
            Err(IdentError(name))
        }
    }

    pub fn is_valid(name: &str) -> bool {
        let mut chars = name.chars();
        match chars.next() {
            Some(c) if c.is_ascii_alphabetic() => {}
            _ => return false,
        }
        chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && !KEYWORDS.contains(&name)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<String> for Ident {
    type Error = IdentError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        Ident::new(s)
    }
}

impl From<Ident> for String {
    fn from(id: Ident) -> String {
        id.0
    }
}

impl AsRef<str> for Ident {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// Shorthand for building identifiers from literals in code and tests.
///
/// Panics on an invalid name.
pub fn ident(name: &str) -> Ident {
    Ident::new(name).unwrap_or_else(|e| panic!("{e}"))
}
