use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

/// Source location: 1-based line and column, length in characters.
/// Nodes built in code rather than parsed carry line 0.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct Span {
    pub line: u32,
    pub column: u32,
    pub length: u32,
}

impl Span {
    pub fn new(line: u32, column: u32, length: u32) -> Self {
        Self {
            line,
            column,
            length,
        }
    }

    pub fn is_synthetic(&self) -> bool {
        self.line == 0
    }

    /// Smallest single-line span covering both, or `self` across lines.
    pub fn to(self, end: Span) -> Span {
        if self.line == end.line && end.column >= self.column {
            Span::new(
                self.line,
                self.column,
                end.column + end.length - self.column,
            )
        } else {
            self
        }
    }
}

/// A node with its source span. Spans do not take part in equality, so a
/// reparsed program compares equal to the one it was formatted from.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Spanned<T> {
    pub node: T,
    pub span: Span,
}

impl<T> Spanned<T> {
    pub fn new(node: T, span: Span) -> Self {
        Self { node, span }
    }

    pub fn synthetic(node: T) -> Self {
        Self {
            node,
            span: Span::default(),
        }
    }
}

impl<T: PartialEq> PartialEq for Spanned<T> {
    fn eq(&self, other: &Self) -> bool {
        self.node == other.node
    }
}

pub type Ident = Spanned<String>;
pub type ExprNode = Spanned<Expr>;
pub type StmtNode = Spanned<Statement>;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PlanProgram {
    pub statements: Vec<StmtNode>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Statement {
    Let {
        name: Ident,
        value: ExprNode,
    },
    ForEach {
        var: Ident,
        iter: ExprNode,
        body: Vec<StmtNode>,
    },
    /// A line comment; the planner's reasoning channel.
    Comment(String),
    /// Commits an update proposal. The optional binding names the proposal
    /// so later rows can refer to its keys.
    Emit {
        binding: Option<Ident>,
        call: ExprNode,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Expr {
    Text(String),
    Integer(i64),
    Real(f64),
    List(Vec<ExprNode>),
    Record(Vec<(Ident, ExprNode)>),
    Var(String),
    Field(Box<ExprNode>, Ident),
    Call(ToolCall),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToolCall {
    pub tool: Ident,
    pub args: Vec<(Ident, ExprNode)>,
}

impl ToolCall {
    pub fn arg(&self, name: &str) -> Option<&ExprNode> {
        self.args
            .iter()
            .find(|(n, _)| n.node == name)
            .map(|(_, e)| e)
    }
}

/// Shorthands for building programs in code.
pub mod build {
    use super::*;
    use alloc::string::ToString;

    pub fn ident(s: &str) -> Ident {
        Spanned::synthetic(s.to_string())
    }

    pub fn text(s: &str) -> ExprNode {
        Spanned::synthetic(Expr::Text(s.to_string()))
    }

    pub fn int(v: i64) -> ExprNode {
        Spanned::synthetic(Expr::Integer(v))
    }

    pub fn var(s: &str) -> ExprNode {
        Spanned::synthetic(Expr::Var(s.to_string()))
    }

    pub fn field(e: ExprNode, key: &str) -> ExprNode {
        Spanned::synthetic(Expr::Field(Box::new(e), ident(key)))
    }

    pub fn list(items: Vec<ExprNode>) -> ExprNode {
        Spanned::synthetic(Expr::List(items))
    }

    pub fn texts<'a>(items: impl IntoIterator<Item = &'a str>) -> ExprNode {
        list(items.into_iter().map(text).collect())
    }

    pub fn record(fields: Vec<(&str, ExprNode)>) -> ExprNode {
        Spanned::synthetic(Expr::Record(
            fields.into_iter().map(|(k, v)| (ident(k), v)).collect(),
        ))
    }

    pub fn call(tool: &str, args: Vec<(&str, ExprNode)>) -> ExprNode {
        Spanned::synthetic(Expr::Call(ToolCall {
            tool: ident(tool),
            args: args.into_iter().map(|(k, v)| (ident(k), v)).collect(),
        }))
    }

    pub fn let_(name: &str, value: ExprNode) -> StmtNode {
        Spanned::synthetic(Statement::Let {
            name: ident(name),
            value,
        })
    }

    pub fn for_each(v: &str, iter: ExprNode, body: Vec<StmtNode>) -> StmtNode {
        Spanned::synthetic(Statement::ForEach {
            var: ident(v),
            iter,
            body,
        })
    }

    pub fn comment(s: &str) -> StmtNode {
        Spanned::synthetic(Statement::Comment(s.to_string()))
    }

    pub fn emit(call: ExprNode) -> StmtNode {
        Spanned::synthetic(Statement::Emit {
            binding: None,
            call,
        })
    }

    pub fn emit_as(name: &str, call: ExprNode) -> StmtNode {
        Spanned::synthetic(Statement::Emit {
            binding: Some(ident(name)),
            call,
        })
    }
}
