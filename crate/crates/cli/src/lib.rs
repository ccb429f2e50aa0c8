//! Command implementations behind the `probarith` binary.

pub mod commands;
pub mod doc;
pub mod number;

use std::fmt;

pub use doc::{ErrorDocument, Op, Problem, RequestDocument, ResultDocument};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_NON_CONVERGENCE: i32 = 2;
pub const EXIT_EXAMPLES_FAILED: i32 = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    /// Short machine-readable category.
    pub kind: &'static str,
    pub detail: String,
}

impl CliError {
    pub fn parse(detail: impl Into<String>) -> Self {
        Self { kind: "parse_error", detail: detail.into() }
    }

    pub fn invalid(detail: impl Into<String>) -> Self {
        Self { kind: "invalid_input", detail: detail.into() }
    }

    pub fn io(detail: impl Into<String>) -> Self {
        Self { kind: "io_error", detail: detail.into() }
    }

    pub fn to_document(&self) -> ErrorDocument {
        ErrorDocument { error: self.kind.to_string(), detail: self.detail.clone() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.detail)
    }
}

impl std::error::Error for CliError {}

impl From<probarith::Error> for CliError {
    fn from(e: probarith::Error) -> Self {
        let kind = match e {
            probarith::Error::NotPositiveDefinite => "not_positive_definite",
            probarith::Error::NonConvergence { .. } => "non_convergence",
            probarith::Error::Internal(_) => "internal_error",
            _ => "invalid_input",
        };
        Self { kind, detail: e.to_string() }
    }
}
