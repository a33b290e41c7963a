//! Reading the task type, target tables and columns off an instruction.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::Serialize;

use super::PlannerError;
use crate::db::{ColumnDef, DataType, Database};
use crate::eval::TaskType;
use crate::observer::MockScope;
use crate::text::{find_phrase, identifier_words};

const ADD_COLUMN_CUES: &[&str] = &[
    "new column",
    "new columns",
    "add a column",
    "add column",
    "add columns",
    "add the column",
    "add the columns",
    "add a new column",
    "new field",
    "new fields",
    "add a field",
    "new attribute",
    "new attributes",
    "add an attribute",
    "extend the table",
    "extend the schema",
];
const INFILL_CUES: &[&str] = &[
    "fill",
    "infill",
    "missing",
    "complete the",
    "empty",
    "blank",
    "null",
    "unknown",
    "update",
];

/// What an instruction asks for.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Intent {
    pub task_type: TaskType,
    /// Target tables, children before parents; the first is the main one.
    pub tables: Vec<String>,
    /// Columns named by a DI instruction; empty means all of them.
    pub columns: Vec<String>,
    /// Columns a CA instruction adds.
    pub new_columns: Vec<ColumnDef>,
}

impl Intent {
    pub fn target(&self) -> &str {
        &self.tables[0]
    }

    pub fn mock_scope(&self) -> MockScope {
        MockScope {
            tables: self.tables.clone(),
            columns: self.columns.clone(),
            new_columns: self.new_columns.clone(),
        }
    }
}

fn mentions(text: &str, name: &str) -> Option<usize> {
    let phrase = identifier_words(name).join(" ");
    let mut forms = alloc::vec![
        name.to_string(),
        phrase.clone(),
        alloc::format!("{phrase}s")
    ];
    if let Some(stem) = phrase.strip_suffix('y') {
        forms.push(alloc::format!("{stem}ies"));
    }
    forms
        .iter()
        .filter(|f| !f.is_empty())
        .filter_map(|f| find_phrase(text, f).first().copied())
        .min()
}

fn has_cue(lower: &str, cues: &[&str]) -> bool {
    cues.iter().any(|c| !find_phrase(lower, c).is_empty())
}

/// The task type an instruction describes: adding columns, filling in
/// missing values, or else adding rows.
pub fn infer_task_type(instruction: &str) -> TaskType {
    let lower = instruction.to_lowercase();
    if has_cue(&lower, ADD_COLUMN_CUES) {
        TaskType::Ca
    } else if has_cue(&lower, INFILL_CUES) {
        TaskType::Di
    } else {
        TaskType::Rp
    }
}

/// Quoted names in `text` with the type word that follows each, if any:
/// `"Director" (text)` or `'Premiere' as a date`.
fn quoted_names(text: &str) -> Vec<(String, Option<DataType>)> {
    let mut out = Vec::new();
    let mut rest = text;
    while let Some(open) = rest.find(['"', '\'', '`', '“']) {
        let q = rest[open..].chars().next().expect("found above");
        let close = if q == '“' { '”' } else { q };
        let after = &rest[open + q.len_utf8()..];
        let Some(end) = after.find(close) else { break };
        let name = after[..end].trim();
        let tail = &after[end + close.len_utf8()..];
        if !name.is_empty() && name.len() <= 64 && !name.contains('\n') {
            out.push((name.to_string(), type_hint(tail)));
        }
        rest = tail;
    }
    out
}

fn type_hint(tail: &str) -> Option<DataType> {
    let window: String = tail.chars().take(24).collect::<String>().to_lowercase();
    let window = window
        .split([',', ';', '.', '"', '\''])
        .next()
        .unwrap_or("");
    let words: Vec<&str> = window
        .split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .collect();
    words.iter().take(4).find_map(|w| match *w {
        "date" => Some(DataType::Date),
        "integer" | "int" | "number" | "count" | "year" => Some(DataType::Integer),
        "real" | "float" | "decimal" => Some(DataType::Real),
        "text" | "string" => Some(DataType::Text),
        _ => None,
    })
}

/// Reads `instruction` against the schema of `db`.
pub fn infer_intent(instruction: &str, db: &Database) -> Result<Intent, PlannerError> {
    let task_type = infer_task_type(instruction);
    let mut mentioned: Vec<(usize, String)> = db
        .tables()
        .filter_map(|t| mentions(instruction, t.name()).map(|p| (p, t.name().to_string())))
        .collect();
    mentioned.sort();
    let mut tables: Vec<String> = mentioned.into_iter().map(|(_, t)| t).collect();
    if tables.is_empty() {
        // a column name can still single out its table
        let owners: Vec<&str> = db
            .tables()
            .filter(|t| {
                t.columns()
                    .iter()
                    .any(|c| !c.is_primary_key && mentions(instruction, &c.name).is_some())
            })
            .map(|t| t.name())
            .collect();
        let all: Vec<&str> = db.tables().map(|t| t.name()).collect();
        match (all.as_slice(), owners.as_slice()) {
            ([only], _) | (_, [only]) => tables.push(only.to_string()),
            _ => return Err(PlannerError::NoTargetTable),
        }
    }
    match task_type {
        TaskType::Rp => {
            let order = db.topological_order();
            tables.sort_by_key(|t| core::cmp::Reverse(order.iter().position(|o| o == t)));
        }
        TaskType::Di => {
            // "the missing actor of each character": a mentioned parent
            // names a column of the child
            let child = tables.iter().position(|t| {
                db.table(t).is_some_and(|t| {
                    t.foreign_keys()
                        .any(|(_, fk)| fk.table != t.name() && tables.contains(&fk.table))
                })
            });
            let first = tables.remove(child.unwrap_or(0));
            tables = alloc::vec![first];
        }
        TaskType::Ca => tables.truncate(1),
    }
    let target = db
        .require_table(&tables[0])
        .map_err(|_| PlannerError::NoTargetTable)?;
    let mut columns = Vec::new();
    let mut new_columns = Vec::new();
    match task_type {
        TaskType::Di => {
            columns = target
                .columns()
                .iter()
                .filter(|c| {
                    !c.is_primary_key
                        && (mentions(instruction, &c.name).is_some()
                            || c.foreign_key
                                .as_ref()
                                .is_some_and(|fk| mentions(instruction, &fk.table).is_some()))
                })
                .map(|c| c.name.clone())
                .collect();
        }
        TaskType::Ca => {
            for (name, dtype) in quoted_names(instruction) {
                let taken = target.column(&name).is_some()
                    || db.table(&name).is_some()
                    || new_columns.iter().any(|c: &ColumnDef| c.name == name);
                if !taken {
                    new_columns.push(ColumnDef::new(name, dtype.unwrap_or(DataType::Text)));
                }
            }
            if new_columns.is_empty() {
                return Err(PlannerError::NoNewColumn);
            }
        }
        TaskType::Rp => {}
    }
    Ok(Intent {
        task_type,
        tables,
        columns,
        new_columns,
    })
}
