//! Plan interpreter. Runs a plan against a tool hub, collects the update
//! proposals it emits and commits them all at the end.

mod commit;
mod trace;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::db::{diff, Database, DbError, DiffTuple};
use crate::feedback::Feedback;
use crate::plan::{Expr, ExprNode, PlanProgram, Span, Statement, StmtNode};
use crate::tools::{
    Args, Invocation, Proposal, Tool, ToolContext, ToolError, ToolHub, TraceSink, Value,
};

pub use commit::{commit, commit_order, preview, CommitError, Committed};
pub use trace::{ExecutionTrace, TraceEvent};

/// Why a run stopped before committing.
#[derive(Clone, Debug, PartialEq)]
pub enum RunError {
    /// A tool call failed.
    Tool {
        tool: Tool,
        error: ToolError,
        span: Span,
    },
    /// The plan did something the interpreter cannot evaluate, such as
    /// reading a missing field.
    Eval {
        message: String,
        span: Span,
    },
    Timeout {
        budget_ms: u64,
        span: Span,
    },
    Commit(CommitError),
}

impl RunError {
    pub fn span(&self) -> Option<Span> {
        match self {
            RunError::Tool { span, .. }
            | RunError::Eval { span, .. }
            | RunError::Timeout { span, .. } => Some(*span).filter(|s| !s.is_synthetic()),
            RunError::Commit(_) => None,
        }
    }

    /// Constraint breaks (wrong types for a column, duplicate keys,
    /// dangling references) as opposed to runtime faults.
    pub fn is_integrity(&self) -> bool {
        match self {
            RunError::Commit(_) => true,
            RunError::Tool {
                error: ToolError::Database { source, .. },
                ..
            } => matches!(
                source,
                DbError::TypeMismatch { .. }
                    | DbError::DuplicatePrimaryKey { .. }
                    | DbError::ForeignKeyViolation { .. }
                    | DbError::ColumnCollision { .. }
                    | DbError::MissingValue { .. }
                    | DbError::OverwriteAttempt { .. }
                    | DbError::Integrity(_)
            ),
            _ => false,
        }
    }

    pub fn message(&self) -> String {
        match self {
            RunError::Tool { tool, error, .. } => match error {
                ToolError::Database { .. }
                | ToolError::InvalidArgument { .. }
                | ToolError::MalformedOutput { .. } => error.to_string(),
                other => format!("{tool}: {other}"),
            },
            RunError::Eval { message, .. } => message.clone(),
            RunError::Timeout { budget_ms, .. } => {
                format!("execution exceeded its time budget of {budget_ms} ms")
            }
            RunError::Commit(e) => format!("commit rejected: {e}"),
        }
    }

    /// The error as planner feedback.
    pub fn to_feedback(&self) -> Feedback {
        if self.is_integrity() {
            return Feedback::integrity(self.message(), self.span());
        }
        let expected = match self {
            RunError::Tool { tool, .. } => format!("`{tool}` completes"),
            RunError::Eval { .. } => "the plan evaluates".to_string(),
            RunError::Timeout { budget_ms, .. } => format!("finishes within {budget_ms} ms"),
            RunError::Commit(_) => unreachable!("commit errors are integrity findings"),
        };
        Feedback::logic(self.message(), self.span(), expected, self.message())
    }
}

/// A plan run up to, but not including, the commit.
#[derive(Clone, Debug, PartialEq)]
pub struct Proposed {
    pub proposals: Vec<Proposal>,
    /// Emit statement span of each proposal.
    pub spans: Vec<Span>,
    pub trace: ExecutionTrace,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Execution {
    pub database: Database,
    pub diff: BTreeSet<DiffTuple>,
    pub proposals: Vec<Proposal>,
    pub trace: ExecutionTrace,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExecutionFailure {
    pub error: RunError,
    pub trace: ExecutionTrace,
}

/// Evaluates `plan` and returns its proposals without committing them.
/// `budget_ms` bounds wall-clock time as measured by the hub's clock.
pub fn run(
    plan: &PlanProgram,
    db: &Database,
    hub: &ToolHub<'_>,
    ctx: &ToolContext,
    budget_ms: Option<u64>,
) -> Result<Proposed, ExecutionFailure> {
    let mut it = Interp {
        hub,
        db,
        ctx,
        scopes: alloc::vec![BTreeMap::new()],
        proposals: Vec::new(),
        spans: Vec::new(),
        trace: ExecutionTrace::default(),
        start: hub.now_ms(),
        budget_ms,
    };
    it.scopes[0].insert("db".into(), Value::Database);
    it.scopes[0].insert("docs".into(), Value::texts(ctx.documents.iter()));
    match it.block(&plan.statements) {
        Ok(()) => Ok(Proposed {
            proposals: it.proposals,
            spans: it.spans,
            trace: it.trace,
        }),
        Err(error) => Err(ExecutionFailure {
            error,
            trace: it.trace,
        }),
    }
}

/// Runs `plan` and commits its proposals atomically. On any failure the
/// input database is untouched and the error comes back with the trace.
pub fn execute(
    plan: &PlanProgram,
    db: &Database,
    hub: &ToolHub<'_>,
    ctx: &ToolContext,
    budget_ms: Option<u64>,
) -> Result<Execution, ExecutionFailure> {
    let Proposed {
        proposals,
        mut trace,
        ..
    } = run(plan, db, hub, ctx, budget_ms)?;
    match commit(db, &proposals) {
        Ok(c) => {
            let d = diff(db, &c.database).expect("commit only extends the schema");
            trace.push(TraceEvent::Commit {
                ok: true,
                cells: d.len(),
                message: None,
            });
            Ok(Execution {
                database: c.database,
                diff: d,
                proposals,
                trace,
            })
        }
        Err(e) => {
            trace.push(TraceEvent::Commit {
                ok: false,
                cells: 0,
                message: Some(e.to_string()),
            });
            Err(ExecutionFailure {
                error: RunError::Commit(e),
                trace,
            })
        }
    }
}

struct Interp<'a, 'h> {
    hub: &'a ToolHub<'h>,
    db: &'a Database,
    ctx: &'a ToolContext,
    scopes: Vec<BTreeMap<String, Value>>,
    proposals: Vec<Proposal>,
    spans: Vec<Span>,
    trace: ExecutionTrace,
    start: u64,
    budget_ms: Option<u64>,
}

/// Forwards hub invocations into the trace.
struct Sink<'t>(&'t mut ExecutionTrace);

impl TraceSink for Sink<'_> {
    fn record(&mut self, invocation: Invocation) {
        self.0.push(TraceEvent::Invocation(invocation));
    }
}

impl Interp<'_, '_> {
    fn check_time(&self, span: Span) -> Result<(), RunError> {
        if let Some(budget_ms) = self.budget_ms {
            if self.hub.now_ms().saturating_sub(self.start) > budget_ms {
                return Err(RunError::Timeout { budget_ms, span });
            }
        }
        Ok(())
    }

    fn lookup(&self, name: &str, span: Span) -> Result<&Value, RunError> {
        self.scopes
            .iter()
            .rev()
            .find_map(|s| s.get(name))
            .ok_or_else(|| RunError::Eval {
                message: format!("`{name}` is not bound"),
                span,
            })
    }

    fn bind(&mut self, name: &str, value: Value) {
        if name != "_" {
            self.trace.push(TraceEvent::Bind {
                name: name.into(),
                value: value.clone(),
            });
        }
        self.scopes
            .last_mut()
            .expect("scope")
            .insert(name.into(), value);
    }

    fn block(&mut self, stmts: &[StmtNode]) -> Result<(), RunError> {
        for s in stmts {
            self.check_time(s.span)?;
            match &s.node {
                Statement::Comment(_) => {}
                Statement::Let { name, value } => {
                    let v = self.eval(value)?;
                    self.bind(&name.node, v);
                }
                Statement::ForEach { var, iter, body } => {
                    let items = match self.eval(iter)? {
                        Value::List(items) => items,
                        other => {
                            return Err(RunError::Eval {
                                message: format!(
                                    "`for` iterates over a list, found {}",
                                    other.kind()
                                ),
                                span: iter.span,
                            })
                        }
                    };
                    for item in items {
                        self.scopes.push(BTreeMap::new());
                        self.bind(&var.node, item);
                        let r = self.block(body);
                        self.scopes.pop();
                        r?;
                    }
                }
                Statement::Emit { binding, call } => {
                    let Expr::Call(tc) = &call.node else {
                        return Err(RunError::Eval {
                            message: "`emit` needs a DI, PR or AC call".into(),
                            span: call.span,
                        });
                    };
                    let tool = tc
                        .tool
                        .node
                        .parse::<Tool>()
                        .ok()
                        .filter(|t| t.is_update())
                        .ok_or_else(|| RunError::Eval {
                            message: format!("`emit` cannot commit `{}`", tc.tool.node),
                            span: call.span,
                        })?;
                    let args = self.args(&tc.args)?;
                    let p = self
                        .hub
                        .propose(tool, &args, self.db, &mut Sink(&mut self.trace))
                        .map_err(|error| RunError::Tool {
                            tool,
                            error,
                            span: call.span,
                        })?;
                    let id = self.proposals.len() as u32;
                    let pk = self
                        .db
                        .table(p.table())
                        .map(|t| t.pk_column().name.clone())
                        .unwrap_or_default();
                    let value = p.to_value_with_id(Some(id), &pk);
                    self.trace.push(TraceEvent::Proposal {
                        id,
                        proposal: value.clone(),
                    });
                    self.proposals.push(p);
                    self.spans.push(s.span);
                    if let Some(b) = binding {
                        self.bind(&b.node, value);
                    }
                }
            }
        }
        Ok(())
    }

    fn args(&mut self, args: &[(crate::plan::Ident, ExprNode)]) -> Result<Args, RunError> {
        let mut out = Args::new();
        for (name, e) in args {
            let v = self.eval(e)?;
            out.insert(name.node.clone(), v);
        }
        Ok(out)
    }

    fn eval(&mut self, e: &ExprNode) -> Result<Value, RunError> {
        Ok(match &e.node {
            Expr::Text(s) => Value::Text(s.clone()),
            Expr::Integer(i) => Value::Integer(*i),
            Expr::Real(r) => Value::Real(*r),
            Expr::List(items) => Value::List(
                items
                    .iter()
                    .map(|i| self.eval(i))
                    .collect::<Result<_, _>>()?,
            ),
            Expr::Record(fields) => {
                let mut m = BTreeMap::new();
                for (k, v) in fields {
                    let v = self.eval(v)?;
                    m.insert(k.node.clone(), v);
                }
                Value::Record(m)
            }
            Expr::Var(name) => self.lookup(name, e.span)?.clone(),
            Expr::Field(base, key) => match self.eval(base)? {
                Value::Record(mut m) => match m.remove(&key.node) {
                    Some(v) => v,
                    None => {
                        let fields: Vec<&str> = m.keys().map(String::as_str).collect();
                        return Err(RunError::Eval {
                            message: format!(
                                "record has no field `{}` (fields: {})",
                                key.node,
                                fields.join(", ")
                            ),
                            span: key.span,
                        });
                    }
                },
                // missing extraction results propagate as NULL
                Value::Null => Value::Null,
                other => {
                    return Err(RunError::Eval {
                        message: format!(
                            "field `{}` read from {}, not a record",
                            key.node,
                            other.kind()
                        ),
                        span: key.span,
                    })
                }
            },
            Expr::Call(tc) => {
                self.check_time(e.span)?;
                let tool = tc.tool.node.parse::<Tool>().map_err(|()| RunError::Eval {
                    message: format!("unknown tool `{}`", tc.tool.node),
                    span: tc.tool.span,
                })?;
                if tool.is_update() {
                    return Err(RunError::Eval {
                        message: format!("`{tool}` may only appear as `emit {tool}(...)`"),
                        span: e.span,
                    });
                }
                let args = self.args(&tc.args)?;
                let out = self
                    .hub
                    .invoke(tool, &args, self.db, self.ctx, &mut Sink(&mut self.trace))
                    .map_err(|error| RunError::Tool {
                        tool,
                        error,
                        span: e.span,
                    })?;
                self.check_time(e.span)?;
                out
            }
        })
    }
}
