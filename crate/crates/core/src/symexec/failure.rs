use std::fmt;

use serde::{Deserialize, Serialize};

/// Why a construct could not be symbolically executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ToolFailureKind {
    LoopUnsupported,
    NonSolvableOde,
    NonPolynomialRhs,
    DivisionInOde,
    Other,
}

impl ToolFailureKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ToolFailureKind::LoopUnsupported => "loop_unsupported",
            ToolFailureKind::NonSolvableOde => "non_solvable_ode",
            ToolFailureKind::NonPolynomialRhs => "non_polynomial_rhs",
            ToolFailureKind::DivisionInOde => "division_in_ode",
            ToolFailureKind::Other => "other",
        }
    }
}

impl fmt::Display for ToolFailureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ToolFailureReason {
    pub kind: ToolFailureKind,
    /// Names the offending construct.
    pub detail: String,
}

impl ToolFailureReason {
    pub fn new(kind: ToolFailureKind, detail: impl Into<String>) -> Self {
        ToolFailureReason { kind, detail: detail.into() }
    }
}

impl fmt::Display for ToolFailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.detail)
    }
}

impl std::error::Error for ToolFailureReason {}
