//! The plan language: a small sandboxed DSL of bindings, loops over
//! lists, tool calls and `emit` statements that commit update proposals.

pub mod ast;
pub mod diagnostic;
mod format;
mod parser;
mod typecheck;

pub use ast::{Expr, ExprNode, Ident, PlanProgram, Span, Spanned, Statement, StmtNode, ToolCall};
pub use diagnostic::{codes, Diagnostic, Severity};
pub use format::{format, format_expr};
pub use parser::{is_identifier, parse, KEYWORDS};
pub use typecheck::{typecheck, Ty, PREDEFINED};
