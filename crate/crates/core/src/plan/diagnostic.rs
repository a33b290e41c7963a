use alloc::string::String;
use core::fmt;

use serde::{Deserialize, Serialize};

use super::ast::Span;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: String,
    pub message: String,
    pub span: Span,
}

impl Diagnostic {
    pub fn error(code: &str, message: impl Into<String>, span: Span) -> Self {
        Self {
            severity: Severity::Error,
            code: code.into(),
            message: message.into(),
            span,
        }
    }

    pub fn warning(code: &str, message: impl Into<String>, span: Span) -> Self {
        Self {
            severity: Severity::Warning,
            code: code.into(),
            message: message.into(),
            span,
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(
            f,
            "{}:{}: {sev}[{}]: {}",
            self.span.line, self.span.column, self.code, self.message
        )
    }
}

/// Diagnostic codes.
pub mod codes {
    pub const UNEXPECTED_CHAR: &str = "unexpected-char";
    pub const UNTERMINATED_STRING: &str = "unterminated-string";
    pub const BAD_ESCAPE: &str = "bad-escape";
    pub const BAD_NUMBER: &str = "bad-number";
    pub const UNEXPECTED_TOKEN: &str = "unexpected-token";
    pub const UNKNOWN_TOOL: &str = "unknown-tool";
    pub const MISSING_ARGUMENT: &str = "missing-argument";
    pub const UNKNOWN_ARGUMENT: &str = "unknown-argument";
    pub const DUPLICATE_ARGUMENT: &str = "duplicate-argument";
    pub const KIND_MISMATCH: &str = "kind-mismatch";
    pub const UNKNOWN_TABLE: &str = "unknown-table";
    pub const UNKNOWN_COLUMN: &str = "unknown-column";
    pub const UNKNOWN_FIELD: &str = "unknown-field";
    pub const DUPLICATE_FIELD: &str = "duplicate-field";
    pub const UNBOUND_NAME: &str = "unbound-name";
    pub const REBOUND_NAME: &str = "rebound-name";
    pub const INVALID_EMIT: &str = "invalid-emit";
}
