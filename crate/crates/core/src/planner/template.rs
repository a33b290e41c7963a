//! The fixed baseline plan: find the entities, extract their attributes,
//! normalize them and hand them to the update tool of the task.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{infer_intent, Generation, Intent, PlanGenerator, PlannerContext, PlannerError};
use crate::db::{ColumnDef, DataType, Database, Table};
use crate::eval::TaskType;
use crate::observer::Observation;
use crate::plan::{format_expr, is_identifier, parse, Expr, PlanProgram};
use crate::tools::link_score;

/// Produces the template plan on every call; it ignores feedback.
#[derive(Clone, Debug)]
pub struct TemplatePlanner {
    source: Result<String, PlannerError>,
}

impl TemplatePlanner {
    pub fn new(instruction: &str, db: &Database, obs: &Observation) -> Self {
        let source = infer_intent(instruction, db).and_then(|intent| {
            if obs.table(intent.target()).is_none() {
                return Err(PlannerError::NoTargetTable);
            }
            template_source(&intent, db)
        });
        Self { source }
    }
}

impl PlanGenerator for TemplatePlanner {
    fn name(&self) -> &str {
        "template"
    }

    fn generate(&mut self, _ctx: &PlannerContext) -> Result<Generation, PlannerError> {
        let src = self.source.clone()?;
        Ok(Generation {
            prompt: None,
            reply: src.clone(),
            source: src,
        })
    }
}

/// The template plan for `instruction`.
pub fn plan_template(
    instruction: &str,
    db: &Database,
    obs: &Observation,
) -> Result<PlanProgram, PlannerError> {
    let intent = infer_intent(instruction, db)?;
    if obs.table(intent.target()).is_none() {
        return Err(PlannerError::NoTargetTable);
    }
    let src = template_source(&intent, db)?;
    Ok(parse(&src).expect("template plans are well-formed"))
}

fn string(s: &str) -> String {
    format_expr(&Expr::Text(s.into()))
}

fn key(s: &str) -> String {
    if is_identifier(s) {
        s.to_string()
    } else {
        string(s)
    }
}

fn string_list<'a>(items: impl IntoIterator<Item = &'a str>) -> String {
    let parts: Vec<String> = items.into_iter().map(string).collect();
    format!("[{}]", parts.join(", "))
}

fn record(fields: &[(String, String)]) -> String {
    let parts: Vec<String> = fields
        .iter()
        .map(|(k, v)| format!("{}: {v}", key(k)))
        .collect();
    format!("{{{}}}", parts.join(", "))
}

struct Writer {
    out: String,
    depth: usize,
    next: usize,
}

impl Writer {
    fn line(&mut self, s: &str) {
        for _ in 0..self.depth {
            self.out.push_str("    ");
        }
        self.out.push_str(s);
        self.out.push('\n');
    }

    fn open(&mut self, s: &str) {
        self.line(&format!("{s} {{"));
        self.depth += 1;
    }

    fn close_to(&mut self, depth: usize) {
        while self.depth > depth {
            self.depth -= 1;
            self.line("}");
        }
    }

    fn var(&mut self, base: &str) -> String {
        self.next += 1;
        format!("{base}{}", self.next)
    }
}

/// Columns read by attribute extraction: everything but minted keys,
/// references and the entity name.
fn attribute_columns(t: &Table) -> Vec<&ColumnDef> {
    let entity = t.entity_column().map(|c| c.name.as_str());
    t.columns()
        .iter()
        .filter(|c| !(c.is_primary_key && c.dtype == DataType::Integer))
        .filter(|c| c.foreign_key.is_none() && Some(c.name.as_str()) != entity)
        .collect()
}

/// Plan source for `intent`.
pub fn template_source(intent: &Intent, db: &Database) -> Result<String, PlannerError> {
    let target = db
        .require_table(intent.target())
        .map_err(|_| PlannerError::NoTargetTable)?;
    // rows are found by name, so every table the plan reads entities of needs one
    let named = if intent.task_type == TaskType::Rp {
        intent.tables.clone()
    } else {
        alloc::vec![target.name().into()]
    };
    for t in &named {
        let Some(table) = db.table(t) else { continue };
        if table.entity_column().is_none() {
            return Err(PlannerError::UnnamedRows(t.clone()));
        }
        if intent.task_type != TaskType::Rp {
            continue;
        }
        for (c, fk) in table.foreign_keys() {
            let linkable = db.table(&fk.table).is_some_and(nameable);
            if !linkable && !c.nullable && c.default.is_none() && !named.contains(&fk.table) {
                return Err(PlannerError::UnnamedRows(fk.table.clone()));
            }
        }
    }
    let mut w = Writer {
        out: String::new(),
        depth: 0,
        next: 0,
    };
    w.line(&format!(
        "# template plan: {} on {}",
        intent.task_type,
        target.name()
    ));
    w.open("for doc in docs");
    let e = w.var("e");
    w.open(&format!(
        "for {e} in NER(text=doc, type={})",
        string(target.name())
    ));
    match intent.task_type {
        TaskType::Rp => {
            population(&mut w, db, target, &e, &intent.tables);
        }
        TaskType::Di => infill(&mut w, db, target, &e, &intent.columns),
        TaskType::Ca => {
            let names: Vec<&str> = intent.new_columns.iter().map(|c| c.name.as_str()).collect();
            let mut fields = Vec::new();
            if let Some(ent) = target.entity_column() {
                fields.push((ent.name.clone(), e.clone()));
            }
            if !names.is_empty() {
                let info = w.var("info");
                w.line(&format!(
                    "let {info} = AE(text=doc, entity={e}, attribute_list={})",
                    string_list(names.iter().copied())
                ));
                for n in &names {
                    fields.push((n.to_string(), format!("{info}.{}", key(n))));
                }
            }
            let defs: Vec<String> = intent
                .new_columns
                .iter()
                .map(|c| {
                    record(&[
                        ("name".into(), string(&c.name)),
                        ("dtype".into(), string(c.dtype.as_str())),
                    ])
                })
                .collect();
            w.line(&format!(
                "emit AC(data_entry=[{}], database=db, table_name={}, new_columns=[{}])",
                record(&fields),
                string(target.name()),
                defs.join(", ")
            ));
        }
    }
    w.close_to(0);
    Ok(w.out)
}

/// Emits DI proposals for entity `e`: one for its attributes and one per
/// reference, each under its own loops so that an unstated reference does
/// not hold back the rest.
fn infill(w: &mut Writer, db: &Database, t: &Table, e: &str, wanted: &[String]) {
    let entity: Vec<(String, String)> = t
        .entity_column()
        .map(|c| (c.name.clone(), e.to_string()))
        .into_iter()
        .collect();
    let emit = |w: &mut Writer, fields: &[(String, String)]| {
        let rows = w.var("rows");
        w.line(&format!(
            "let {rows} = Norm(data_entries=[{}], database=db, table_name={})",
            record(fields),
            string(t.name())
        ));
        w.line(&format!(
            "emit DI(data_entry={rows}, database=db, table_name={})",
            string(t.name())
        ));
    };
    let attrs: Vec<&str> = attribute_columns(t)
        .into_iter()
        .filter(|c| !c.is_primary_key && (wanted.is_empty() || wanted.contains(&c.name)))
        .map(|c| c.name.as_str())
        .collect();
    if !attrs.is_empty() {
        let info = w.var("info");
        w.line(&format!(
            "let {info} = AE(text=doc, entity={e}, attribute_list={})",
            string_list(attrs.iter().copied())
        ));
        let mut fields = entity.clone();
        fields.extend(
            attrs
                .iter()
                .map(|a| (a.to_string(), format!("{info}.{}", key(a)))),
        );
        emit(w, &fields);
    }
    for (c, fk) in t.foreign_keys() {
        if fk.table == t.name() || !(wanted.is_empty() || wanted.contains(&c.name)) {
            continue;
        }
        let depth = w.depth;
        if let Some(v) = existing_parent(w, db, &fk.table, e) {
            let mut fields = entity.clone();
            fields.push((c.name.clone(), v));
            emit(w, &fields);
        }
        w.close_to(depth);
    }
}

/// Whether some row of `t` has a name a document could mention and the
/// linker could match.
fn nameable(t: &Table) -> bool {
    let Some(ci) = t.entity_column().and_then(|c| t.column_index(&c.name)) else {
        return false;
    };
    t.rows().iter().any(|r| {
        r[ci]
            .as_ref()
            .is_some_and(|n| link_score(&n.canonical(), &n.canonical()) >= 1.0)
    })
}

/// Opens loops that find the parent row of entity `e` in `parent` and
/// returns the expression holding its key.
fn existing_parent(w: &mut Writer, db: &Database, parent: &str, e: &str) -> Option<String> {
    if !db.table(parent).is_some_and(nameable) {
        return None;
    }
    let p = w.var("p");
    let l = w.var("l");
    w.open(&format!(
        "for {p} in RE(text=doc, head_e={e}, relation={})",
        string(parent)
    ));
    w.open(&format!(
        "for {l} in Link(data_entries=[{p}], database=db, table_name={})",
        string(parent)
    ));
    Some(format!("{l}.pk"))
}

/// Emits a row of `t` for entity `e`, first emitting rows for the parents
/// in `scope`. Returns the name the proposal is bound to. Loops opened
/// here stay open so that the binding remains visible to the caller.
fn population(w: &mut Writer, db: &Database, t: &Table, e: &str, scope: &[String]) -> String {
    let mut fields = Vec::new();
    if let Some(ent) = t.entity_column() {
        fields.push((ent.name.clone(), e.to_string()));
    }
    let attrs: Vec<&str> = attribute_columns(t)
        .into_iter()
        .map(|c| c.name.as_str())
        .collect();
    if !attrs.is_empty() {
        let info = w.var("info");
        w.line(&format!(
            "let {info} = AE(text=doc, entity={e}, attribute_list={})",
            string_list(attrs.iter().copied())
        ));
        for a in &attrs {
            fields.push((a.to_string(), format!("{info}.{}", key(a))));
        }
    }
    for (c, fk) in t.foreign_keys() {
        if fk.table == t.name() {
            continue;
        }
        if scope.contains(&fk.table) {
            let parent = db.table(&fk.table).expect("validated schema");
            let p = w.var("p");
            w.open(&format!(
                "for {p} in RE(text=doc, head_e={e}, relation={})",
                string(&fk.table)
            ));
            let bound = population(w, db, parent, &p, scope);
            fields.push((c.name.clone(), format!("{bound}.key")));
        } else if let Some(v) = existing_parent(w, db, &fk.table, e) {
            fields.push((c.name.clone(), v));
        }
    }
    let rows = w.var("rows");
    let bound = w.var("new");
    w.line(&format!(
        "let {rows} = Norm(data_entries=[{}], database=db, table_name={})",
        record(&fields),
        string(t.name())
    ));
    w.line(&format!(
        "emit {bound} = PR(data_entries={rows}, database=db, table_name={})",
        string(t.name())
    ));
    bound
}
