//! Static checks of a parsed plan against the tool signatures and the
//! database schema.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::ast::*;
use super::diagnostic::{codes, Diagnostic};
use crate::db::{Database, Table};
use crate::text::closest;
use crate::tools::{Kind, Tool};

/// Static type of an expression. Records from literals have known fields;
/// extraction outputs are opaque.
#[derive(Clone, Debug, PartialEq)]
pub enum Ty {
    Any,
    Text,
    Integer,
    Real,
    Database,
    List(Box<Ty>),
    Record(Option<BTreeMap<String, Ty>>),
}

impl Ty {
    pub fn name(&self) -> &'static str {
        match self {
            Ty::Any => "any",
            Ty::Text => "text",
            Ty::Integer => "integer",
            Ty::Real => "real",
            Ty::Database => "database",
            Ty::List(_) => "list",
            Ty::Record(_) => "record",
        }
    }

    fn satisfies(&self, kind: Kind) -> bool {
        matches!(
            (self, kind),
            (Ty::Any, _)
                | (Ty::Text, Kind::Text)
                | (Ty::Integer, Kind::Integer)
                | (Ty::Real, Kind::Real)
                | (Ty::Database, Kind::DatabaseHandle)
                | (Ty::List(_), Kind::List)
                | (Ty::Record(_), Kind::Record)
        )
    }

    fn elem(&self) -> Option<Ty> {
        match self {
            Ty::List(e) => Some((**e).clone()),
            Ty::Any => Some(Ty::Any),
            _ => None,
        }
    }

    fn unify(a: Ty, b: &Ty) -> Ty {
        if a == *b {
            a
        } else {
            match (a, b) {
                (Ty::Record(_), Ty::Record(_)) => Ty::Record(None),
                (Ty::List(x), Ty::List(y)) => Ty::List(Box::new(Ty::unify(*x, y))),
                _ => Ty::Any,
            }
        }
    }

    fn proposal() -> Ty {
        let fields = ["op", "table", "key", "keys", "count"];
        let mut m: BTreeMap<String, Ty> = fields.iter().map(|f| (f.to_string(), Ty::Any)).collect();
        m.insert("op".into(), Ty::Text);
        m.insert("table".into(), Ty::Text);
        m.insert("keys".into(), Ty::List(Box::new(Ty::Any)));
        m.insert("count".into(), Ty::Integer);
        Ty::Record(Some(m))
    }
}

/// Names bound before the first statement.
pub const PREDEFINED: [&str; 2] = ["db", "docs"];

struct Checker<'a> {
    schema: &'a Database,
    scopes: Vec<BTreeMap<String, Ty>>,
    diags: Vec<Diagnostic>,
}

/// Checks `program` against the registered tool signatures and `schema`.
/// An empty result means every call has the right arguments and kinds,
/// every literal table and column name exists, every name is bound, and
/// every `emit` commits a DI, PR or AC proposal.
pub fn typecheck(program: &PlanProgram, schema: &Database) -> Vec<Diagnostic> {
    let mut root = BTreeMap::new();
    root.insert("db".to_string(), Ty::Database);
    root.insert("docs".to_string(), Ty::List(Box::new(Ty::Text)));
    let mut c = Checker {
        schema,
        scopes: alloc::vec![root, BTreeMap::new()],
        diags: Vec::new(),
    };
    c.block(&program.statements);
    c.diags
}

impl Checker<'_> {
    fn error(&mut self, code: &str, message: String, span: Span) {
        self.diags.push(Diagnostic::error(code, message, span));
    }

    fn lookup(&self, name: &str) -> Option<&Ty> {
        self.scopes.iter().rev().find_map(|s| s.get(name))
    }

    fn bind(&mut self, name: &Ident, ty: Ty) {
        let scope = self.scopes.last_mut().expect("scope stack is never empty");
        if scope.contains_key(&name.node) {
            let msg = format!("`{}` is already bound in this scope", name.node);
            self.error(codes::REBOUND_NAME, msg, name.span);
        } else {
            scope.insert(name.node.clone(), ty);
        }
    }

    fn block(&mut self, stmts: &[StmtNode]) {
        for s in stmts {
            match &s.node {
                Statement::Let { name, value } => {
                    let ty = self.expr(value);
                    self.bind(name, ty);
                }
                Statement::ForEach { var, iter, body } => {
                    let ty = self.expr(iter);
                    let elem = match ty.elem() {
                        Some(e) => e,
                        None => {
                            let msg = format!("`for` iterates over a list, found {}", ty.name());
                            self.error(codes::KIND_MISMATCH, msg, iter.span);
                            Ty::Any
                        }
                    };
                    self.scopes.push(BTreeMap::new());
                    self.bind(var, elem);
                    self.block(body);
                    self.scopes.pop();
                }
                Statement::Comment(_) => {}
                Statement::Emit { binding, call } => {
                    let ty = match &call.node {
                        Expr::Call(tc)
                            if tc.tool.node.parse::<Tool>().is_ok_and(Tool::is_update) =>
                        {
                            self.call(tc, call.span)
                        }
                        Expr::Call(tc) => {
                            self.call(tc, call.span);
                            let msg = format!(
                                "`emit` commits a DI, PR or AC call, not `{}`",
                                tc.tool.node
                            );
                            self.error(codes::INVALID_EMIT, msg, call.span);
                            Ty::Any
                        }
                        _ => {
                            self.expr(call);
                            self.error(
                                codes::INVALID_EMIT,
                                "`emit` commits a DI, PR or AC call".into(),
                                call.span,
                            );
                            Ty::Any
                        }
                    };
                    if let Some(b) = binding {
                        self.bind(b, ty);
                    }
                }
            }
        }
    }

    fn expr(&mut self, e: &ExprNode) -> Ty {
        match &e.node {
            Expr::Text(_) => Ty::Text,
            Expr::Integer(_) => Ty::Integer,
            Expr::Real(_) => Ty::Real,
            Expr::List(items) => {
                let mut elem: Option<Ty> = None;
                for it in items {
                    let t = self.expr(it);
                    elem = Some(match elem {
                        None => t,
                        Some(prev) => Ty::unify(prev, &t),
                    });
                }
                Ty::List(Box::new(elem.unwrap_or(Ty::Any)))
            }
            Expr::Record(fields) => {
                let mut m = BTreeMap::new();
                for (k, v) in fields {
                    let t = self.expr(v);
                    if m.insert(k.node.clone(), t).is_some() {
                        let msg = format!("field `{}` appears more than once", k.node);
                        self.error(codes::DUPLICATE_FIELD, msg, k.span);
                    }
                }
                Ty::Record(Some(m))
            }
            Expr::Var(name) => match self.lookup(name) {
                Some(t) => t.clone(),
                None => {
                    let names: Vec<String> =
                        self.scopes.iter().flat_map(|s| s.keys().cloned()).collect();
                    let hint = closest(name, names.iter().map(String::as_str))
                        .map(|c| format!("; did you mean `{c}`?"))
                        .unwrap_or_default();
                    self.error(
                        codes::UNBOUND_NAME,
                        format!("`{name}` is not bound{hint}"),
                        e.span,
                    );
                    Ty::Any
                }
            },
            Expr::Field(base, key) => match self.expr(base) {
                Ty::Any | Ty::Record(None) => Ty::Any,
                Ty::Record(Some(fields)) => match fields.get(&key.node) {
                    Some(t) => t.clone(),
                    None => {
                        let hint = closest(&key.node, fields.keys().map(String::as_str))
                            .map(|c| format!("; did you mean `{c}`?"))
                            .unwrap_or_default();
                        let msg = format!("record has no field `{}`{hint}", key.node);
                        self.error(codes::UNKNOWN_FIELD, msg, key.span);
                        Ty::Any
                    }
                },
                other => {
                    let msg = format!("field access needs a record, found {}", other.name());
                    self.error(codes::KIND_MISMATCH, msg, key.span);
                    Ty::Any
                }
            },
            Expr::Call(tc) => {
                let ty = self.call(tc, e.span);
                if tc.tool.node.parse::<Tool>().is_ok_and(Tool::is_update) {
                    let msg = format!(
                        "`{}` proposes an update and may only appear as `emit {}(...)`",
                        tc.tool.node, tc.tool.node
                    );
                    self.error(codes::INVALID_EMIT, msg, e.span);
                }
                ty
            }
        }
    }

    fn call(&mut self, tc: &ToolCall, span: Span) -> Ty {
        let Ok(tool) = tc.tool.node.parse::<Tool>() else {
            let hint = closest(&tc.tool.node, Tool::ALL.iter().map(|t| t.name()))
                .map(|c| format!("; did you mean `{c}`?"))
                .unwrap_or_default();
            let msg = format!("unknown tool `{}`{hint}", tc.tool.node);
            self.error(codes::UNKNOWN_TOOL, msg, tc.tool.span);
            for (_, v) in &tc.args {
                self.expr(v);
            }
            return Ty::Any;
        };
        let sig = tool.signature();
        let mut args: BTreeMap<&str, (Ty, &ExprNode)> = BTreeMap::new();
        for (name, value) in &tc.args {
            let ty = self.expr(value);
            let Some(param) = sig.param(&name.node) else {
                let hint = closest(&name.node, sig.params.iter().map(|p| p.name))
                    .map(|c| format!("; did you mean `{c}`?"))
                    .unwrap_or_default();
                let msg = format!(
                    "`{tool}` has no argument `{}`{hint}; expected {sig}",
                    name.node
                );
                self.error(codes::UNKNOWN_ARGUMENT, msg, name.span);
                continue;
            };
            if args.contains_key(param.name) {
                let msg = format!("argument `{}` is given more than once", name.node);
                self.error(codes::DUPLICATE_ARGUMENT, msg, name.span);
                continue;
            }
            if !ty.satisfies(param.kind) {
                let msg = format!(
                    "expected {}, found {}: `{tool}` expects a {} for `{}` rather than {}",
                    param.kind,
                    ty.name(),
                    param.kind,
                    param.name,
                    article(ty.name())
                );
                self.error(codes::KIND_MISMATCH, msg, value.span);
            }
            args.insert(param.name, (ty, value));
        }
        for p in sig.params {
            if !args.contains_key(p.name) {
                let msg = format!("`{tool}` is missing argument `{}`; expected {sig}", p.name);
                self.error(codes::MISSING_ARGUMENT, msg, span);
            }
        }

        let table = match args.get("table_name") {
            Some((_, e)) => match &e.node {
                Expr::Text(name) => match self.schema.table(name) {
                    Some(t) => Some(t),
                    None => {
                        let hint = closest(name, self.schema.table_names())
                            .map(|c| format!("; did you mean `{c}`?"))
                            .unwrap_or_default();
                        let msg = format!("no table named `{name}`{hint}");
                        self.error(codes::UNKNOWN_TABLE, msg, e.span);
                        None
                    }
                },
                _ => None,
            },
            None => None,
        };

        match tool {
            Tool::Ner | Tool::Re => Ty::List(Box::new(Ty::Text)),
            Tool::Classify => {
                self.text_elements(&args, "label_list", tool);
                Ty::Text
            }
            Tool::Ae => {
                self.text_elements(&args, "attribute_list", tool);
                match args.get("attribute_list").map(|(_, e)| &e.node) {
                    Some(Expr::List(items)) => {
                        let mut fields = BTreeMap::new();
                        for it in items {
                            match &it.node {
                                Expr::Text(a) => {
                                    fields.insert(a.clone(), Ty::Any);
                                }
                                _ => return Ty::Record(None),
                            }
                        }
                        Ty::Record(Some(fields))
                    }
                    _ => Ty::Record(None),
                }
            }
            Tool::Link => {
                self.entries(&args, "data_entries", tool, table, &BTreeSet::new(), true);
                let mut m = BTreeMap::new();
                m.insert("entry".to_string(), Ty::Any);
                m.insert("pk".to_string(), Ty::Any);
                m.insert("score".to_string(), Ty::Real);
                Ty::List(Box::new(Ty::Record(Some(m))))
            }
            Tool::Norm => {
                self.entries(&args, "data_entries", tool, table, &BTreeSet::new(), false);
                args.get("data_entries")
                    .map(|(t, _)| t.clone())
                    .unwrap_or(Ty::Any)
            }
            Tool::Di => {
                self.entries(&args, "data_entry", tool, table, &BTreeSet::new(), false);
                Ty::proposal()
            }
            Tool::Pr => {
                self.entries(&args, "data_entries", tool, table, &BTreeSet::new(), false);
                Ty::proposal()
            }
            Tool::Ac => {
                let new_cols = self.new_columns(&args, table);
                self.entries(&args, "data_entry", tool, table, &new_cols, false);
                Ty::proposal()
            }
        }
    }

    fn text_elements(&mut self, args: &BTreeMap<&str, (Ty, &ExprNode)>, param: &str, tool: Tool) {
        if let Some((Ty::List(elem), e)) = args.get(param) {
            if !matches!(**elem, Ty::Text | Ty::Any) {
                let msg = format!(
                    "`{tool}` expects `{param}` to hold text, found {}",
                    elem.name()
                );
                self.error(codes::KIND_MISMATCH, msg, e.span);
            }
        }
    }

    /// Entries must be records (Link also takes bare text); literal record
    /// keys must name columns of the target table.
    fn entries(
        &mut self,
        args: &BTreeMap<&str, (Ty, &ExprNode)>,
        param: &str,
        tool: Tool,
        table: Option<&Table>,
        extra_columns: &BTreeSet<String>,
        allow_text: bool,
    ) {
        let Some((ty, e)) = args.get(param) else {
            return;
        };
        if let Ty::List(elem) = ty {
            let ok = match &**elem {
                Ty::Record(_) | Ty::Any => true,
                Ty::Text => allow_text,
                _ => false,
            };
            if !ok {
                let want = if allow_text {
                    "records or text"
                } else {
                    "records"
                };
                let msg = format!(
                    "`{tool}` expects `{param}` to hold {want}, found {}",
                    elem.name()
                );
                self.error(codes::KIND_MISMATCH, msg, e.span);
            }
        }
        let (Some(table), Expr::List(items)) = (table, &e.node) else {
            return;
        };
        for it in items {
            let Expr::Record(fields) = &it.node else {
                continue;
            };
            for (k, _) in fields {
                if table.column(&k.node).is_none() && !extra_columns.contains(&k.node) {
                    let names = table
                        .columns()
                        .iter()
                        .map(|c| c.name.as_str())
                        .chain(extra_columns.iter().map(String::as_str));
                    let hint = closest(&k.node, names)
                        .map(|c| format!("; did you mean `{c}`?"))
                        .unwrap_or_default();
                    let msg = format!("table `{}` has no column `{}`{hint}", table.name(), k.node);
                    self.error(codes::UNKNOWN_COLUMN, msg, k.span);
                }
            }
        }
    }

    fn new_columns(
        &mut self,
        args: &BTreeMap<&str, (Ty, &ExprNode)>,
        table: Option<&Table>,
    ) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let Some((ty, e)) = args.get("new_columns") else {
            return out;
        };
        if let Ty::List(elem) = ty {
            if !matches!(**elem, Ty::Text | Ty::Record(_) | Ty::Any) {
                let msg = format!(
                    "`AC` expects `new_columns` to hold names or column records, found {}",
                    elem.name()
                );
                self.error(codes::KIND_MISMATCH, msg, e.span);
            }
        }
        if let Expr::List(items) = &e.node {
            for it in items {
                let name =
                    match &it.node {
                        Expr::Text(n) => Some(n.clone()),
                        Expr::Record(fields) => fields
                            .iter()
                            .find(|(k, _)| k.node == "name")
                            .and_then(|(_, v)| match &v.node {
                                Expr::Text(n) => Some(n.clone()),
                                _ => None,
                            }),
                        _ => None,
                    };
                if let Some(n) = name {
                    if let Some(t) = table.filter(|t| t.column(&n).is_some()) {
                        let msg = format!("table `{}` already has a column `{n}`", t.name());
                        self.error(codes::DUPLICATE_FIELD, msg, it.span);
                    }
                    out.insert(n);
                }
            }
        }
        out
    }
}

fn article(kind: &str) -> String {
    match kind {
        "text" => "a string".into(),
        "integer" | "any" => format!("an {kind}"),
        k => format!("a {k}"),
    }
}
