//! Tool registry and backends.
//!
//! Extraction tools (NER, RE, AE, Classify) are answered by an
//! [`ExtractionBackend`]: recorded fixtures ([`MockBackend`]), offline
//! heuristics ([`RuleBackend`]) or a remote model supplied by the caller.
//! Link and Norm run locally against the database. DI, PR and AC never touch
//! the database: they return update proposals for the executor to commit.

mod link;
mod mock;
mod normalize;
mod proposal;
mod rules;
mod signature;
mod value;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::db::{Database, DbError, Literal};

pub use link::{link_entities, link_score, LinkResult, Linker};
pub use mock::{fixture_key, FixtureSet, MockBackend};
pub use normalize::{
    normalize_entries, normalize_value, parse_date, parse_number, NormOutcome, Number,
};
pub use proposal::{build_proposal, CellUpdate, Proposal, ProposedValue};
pub use rules::RuleBackend;
pub use signature::{Kind, Param, Tool, ToolSignature};
pub use value::{KeyRef, Value};

pub type Args = BTreeMap<String, Value>;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ToolError {
    #[error("backend unavailable: {0}")]
    BackendUnavailable(String),
    #[error("{tool}: backend output could not be read as {expected}: {detail}")]
    MalformedOutput {
        tool: Tool,
        expected: Kind,
        detail: String,
    },
    #[error("no fixture recorded for {key}")]
    UnboundFixture { key: String },
    #[error("{tool}: {message}")]
    InvalidArgument { tool: Tool, message: String },
    #[error("{tool}: {source}")]
    Database { tool: Tool, source: DbError },
    #[error("execution time budget of {budget_ms} ms exceeded")]
    Timeout { budget_ms: u64 },
}

/// Values from the target database shown to extraction tools as examples
/// of the expected granularity and format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Demonstration {
    pub table: String,
    pub column: String,
    pub values: Vec<Literal>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ToolContext {
    pub demonstrations: Vec<Demonstration>,
    pub documents: Vec<String>,
}

impl ToolContext {
    pub fn demonstrations_for(&self, table: &str) -> impl Iterator<Item = &Demonstration> {
        let table = table.to_string();
        self.demonstrations.iter().filter(move |d| d.table == table)
    }
}

/// Answers extraction calls. Implementations must be deterministic for the
/// mock and rule backends; all must return the signature's result kind.
pub trait ExtractionBackend: Send + Sync {
    fn name(&self) -> &str;

    fn extract(&self, tool: Tool, args: &Args, ctx: &ToolContext) -> Result<Value, ToolError>;
}

/// One tool invocation as recorded in an execution trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Invocation {
    pub tool: Tool,
    pub args: Args,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub latency_ms: u64,
}

pub trait TraceSink {
    fn record(&mut self, invocation: Invocation);
}

impl TraceSink for Vec<Invocation> {
    fn record(&mut self, invocation: Invocation) {
        self.push(invocation);
    }
}

/// Discards every invocation.
pub struct NullSink;

impl TraceSink for NullSink {
    fn record(&mut self, _: Invocation) {}
}

/// Monotonic milliseconds, supplied by the host.
pub trait Clock: Send + Sync {
    fn now_ms(&self) -> u64;
}

/// A clock that never advances; used where timing is irrelevant.
pub struct FrozenClock;

impl Clock for FrozenClock {
    fn now_ms(&self) -> u64 {
        0
    }
}

/// The tool registry bound to one extraction backend.
pub struct ToolHub<'a> {
    backend: &'a dyn ExtractionBackend,
    linker: Linker,
    clock: &'a dyn Clock,
}

impl<'a> ToolHub<'a> {
    pub fn new(
        backend: &'a dyn ExtractionBackend,
        link_threshold: f64,
        clock: &'a dyn Clock,
    ) -> Self {
        Self {
            backend,
            linker: Linker::new(link_threshold),
            clock,
        }
    }

    pub fn backend_name(&self) -> &str {
        self.backend.name()
    }

    pub fn linker(&self) -> &Linker {
        &self.linker
    }

    pub fn now_ms(&self) -> u64 {
        self.clock.now_ms()
    }

    /// Builds the proposal of a DI, PR or AC call, recording it like
    /// [`invoke`](Self::invoke) does.
    pub fn propose(
        &self,
        tool: Tool,
        args: &Args,
        db: &Database,
        sink: &mut dyn TraceSink,
    ) -> Result<Proposal, ToolError> {
        let start = self.clock.now_ms();
        let out =
            check_args(tool, args).and_then(|()| build_proposal(tool, args, db, &self.linker));
        let latency_ms = self.clock.now_ms().saturating_sub(start);
        let (result, error) = match &out {
            Ok(p) => (Some(p.to_value()), None),
            Err(e) => (None, Some(e.to_string())),
        };
        sink.record(Invocation {
            tool,
            args: args.clone(),
            result,
            error,
            latency_ms,
        });
        out
    }

    /// Runs one tool. `db` is the database the `database` argument refers
    /// to; it is never modified. Every call is appended to `sink`.
    pub fn invoke(
        &self,
        tool: Tool,
        args: &Args,
        db: &Database,
        ctx: &ToolContext,
        sink: &mut dyn TraceSink,
    ) -> Result<Value, ToolError> {
        let start = self.clock.now_ms();
        let out = self.dispatch(tool, args, db, ctx);
        let latency_ms = self.clock.now_ms().saturating_sub(start);
        let (result, error) = match &out {
            Ok(v) => (Some(v.clone()), None),
            Err(e) => (None, Some(e.to_string())),
        };
        sink.record(Invocation {
            tool,
            args: args.clone(),
            result,
            error,
            latency_ms,
        });
        out
    }

    fn dispatch(
        &self,
        tool: Tool,
        args: &Args,
        db: &Database,
        ctx: &ToolContext,
    ) -> Result<Value, ToolError> {
        check_args(tool, args)?;
        if tool.is_extraction() {
            let v = self.backend.extract(tool, args, ctx)?;
            return check_result(tool, v);
        }
        let table_name = text_arg(tool, args, "table_name")?;
        let table = db.table(table_name).ok_or_else(|| ToolError::Database {
            tool,
            source: DbError::UnknownTable(table_name.into()),
        })?;
        match tool {
            Tool::Link => {
                let entries = list_arg(tool, args, "data_entries")?;
                let results = self.linker.link(entries, table);
                Ok(Value::List(
                    results.into_iter().map(LinkResult::into_value).collect(),
                ))
            }
            Tool::Norm => {
                let entries = list_arg(tool, args, "data_entries")?;
                Ok(Value::List(normalize_entries(entries, table).values))
            }
            _ => {
                let p = build_proposal(tool, args, db, &self.linker)?;
                Ok(p.to_value())
            }
        }
    }
}

fn check_args(tool: Tool, args: &Args) -> Result<(), ToolError> {
    let sig = tool.signature();
    for name in args.keys() {
        if sig.param(name).is_none() {
            return Err(ToolError::InvalidArgument {
                tool,
                message: format!("unknown argument `{name}`"),
            });
        }
    }
    for p in sig.params {
        let v = args.get(p.name).ok_or_else(|| ToolError::InvalidArgument {
            tool,
            message: format!("missing argument `{}`", p.name),
        })?;
        if v.kind() != p.kind {
            return Err(ToolError::InvalidArgument {
                tool,
                message: format!(
                    "argument `{}` expects {}, found {}",
                    p.name,
                    p.kind,
                    v.kind()
                ),
            });
        }
    }
    Ok(())
}

fn check_result(tool: Tool, v: Value) -> Result<Value, ToolError> {
    let expected = tool.signature().returns;
    let ok = match (&v, tool) {
        (Value::List(items), Tool::Ner | Tool::Re) => {
            items.iter().all(|i| matches!(i, Value::Text(_)))
        }
        (Value::Record(_), Tool::Ae) => true,
        (Value::Text(_), Tool::Classify) => true,
        _ => false,
    };
    if ok {
        Ok(v)
    } else {
        Err(ToolError::MalformedOutput {
            tool,
            expected,
            detail: format!("got {}", v.canonical_json()),
        })
    }
}

pub(crate) fn text_arg<'v>(tool: Tool, args: &'v Args, name: &str) -> Result<&'v str, ToolError> {
    args.get(name)
        .and_then(Value::as_str)
        .ok_or_else(|| ToolError::InvalidArgument {
            tool,
            message: format!("argument `{name}` must be text"),
        })
}

pub(crate) fn list_arg<'v>(
    tool: Tool,
    args: &'v Args,
    name: &str,
) -> Result<&'v [Value], ToolError> {
    args.get(name)
        .and_then(Value::as_list)
        .ok_or_else(|| ToolError::InvalidArgument {
            tool,
            message: format!("argument `{name}` must be a list"),
        })
}
