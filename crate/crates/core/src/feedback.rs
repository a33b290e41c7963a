//! Analyzer and executor findings handed back to the planner.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::{self, Write};

use serde::{Deserialize, Serialize};

use crate::plan::{Diagnostic, Span};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeedbackCategory {
    /// Parse and signature errors.
    Syntax,
    /// Runtime errors and wrong results in a simulated or real run.
    Logic,
    /// Duplicate keys, dangling references and other constraint breaks.
    Integrity,
}

impl FeedbackCategory {
    pub fn as_str(self) -> &'static str {
        match self {
            FeedbackCategory::Syntax => "syntax",
            FeedbackCategory::Logic => "logic",
            FeedbackCategory::Integrity => "integrity",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    pub expected: String,
    pub actual: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Feedback {
    pub category: FeedbackCategory,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub span: Option<Span>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evidence: Option<Evidence>,
}

impl Feedback {
    pub fn syntax(message: impl Into<String>, span: Option<Span>) -> Self {
        Self {
            category: FeedbackCategory::Syntax,
            message: message.into(),
            span,
            evidence: None,
        }
    }

    pub fn logic(
        message: impl Into<String>,
        span: Option<Span>,
        expected: impl Into<String>,
        actual: impl Into<String>,
    ) -> Self {
        Self {
            category: FeedbackCategory::Logic,
            message: message.into(),
            span,
            evidence: Some(Evidence {
                expected: expected.into(),
                actual: actual.into(),
            }),
        }
    }

    pub fn integrity(message: impl Into<String>, span: Option<Span>) -> Self {
        Self {
            category: FeedbackCategory::Integrity,
            message: message.into(),
            span,
            evidence: None,
        }
    }

    pub fn from_diagnostic(d: &Diagnostic) -> Self {
        Self::syntax(
            d.message.clone(),
            Some(d.span).filter(|s| !s.is_synthetic()),
        )
    }
}

impl fmt::Display for Feedback {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.category.as_str())?;
        if let Some(s) = self.span {
            write!(f, " line {}, column {}:", s.line, s.column)?;
        }
        write!(f, " {}", self.message)?;
        if let Some(e) = &self.evidence {
            write!(
                f,
                "\n    expected: {}\n    actual:   {}",
                e.expected, e.actual
            )?;
        }
        Ok(())
    }
}

/// The text block shown to the planner on revision.
pub fn render_feedback(items: &[Feedback]) -> String {
    let mut out = String::new();
    for (i, fb) in items.iter().enumerate() {
        let _ = writeln!(out, "{}. {fb}", i + 1);
    }
    out
}

pub fn has_category(items: &[Feedback], category: FeedbackCategory) -> bool {
    items.iter().any(|f| f.category == category)
}

pub fn categories(items: &[Feedback]) -> Vec<FeedbackCategory> {
    let mut c: Vec<FeedbackCategory> = items.iter().map(|f| f.category).collect();
    c.sort();
    c.dedup();
    c
}
