//! DI, PR and AC: builders of update proposals. Nothing here writes to a
//! database; the executor commits proposals.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{list_arg, normalize_value, text_arg, Args, KeyRef, Linker, Tool, ToolError, Value};
use crate::db::{ColumnDef, DataType, Database, DbError, Literal, Table};

/// A cell value in a proposal: a literal of the column's type, or the key
/// of a row another proposal will insert.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ProposedValue {
    Lit(Literal),
    Key(KeyRef),
}

impl ProposedValue {
    pub fn to_value(&self) -> Value {
        match self {
            ProposedValue::Lit(l) => Value::from(l),
            ProposedValue::Key(k) => Value::Key(*k),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellUpdate {
    pub pk: Literal,
    pub column: String,
    pub value: ProposedValue,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Proposal {
    /// Fill NULL cells of existing rows.
    Infill {
        table: String,
        cells: Vec<CellUpdate>,
    },
    /// Insert rows; an omitted primary key is minted at commit.
    Populate {
        table: String,
        rows: Vec<BTreeMap<String, ProposedValue>>,
    },
    /// Add columns and set them on existing rows.
    AddColumns {
        table: String,
        columns: Vec<ColumnDef>,
        cells: Vec<CellUpdate>,
    },
}

impl Proposal {
    pub fn tool(&self) -> Tool {
        match self {
            Proposal::Infill { .. } => Tool::Di,
            Proposal::Populate { .. } => Tool::Pr,
            Proposal::AddColumns { .. } => Tool::Ac,
        }
    }

    pub fn table(&self) -> &str {
        match self {
            Proposal::Infill { table, .. }
            | Proposal::Populate { table, .. }
            | Proposal::AddColumns { table, .. } => table,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Proposal::Infill { cells, .. } | Proposal::AddColumns { cells, .. } => cells.len(),
            Proposal::Populate { rows, .. } => rows.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Keys of the rows this proposal touches. Rows a PR proposal inserts
    /// without an explicit key get pending keys of proposal `id`; with no
    /// id they are NULL.
    pub fn keys(&self, id: Option<u32>, pk_column: &str) -> Vec<Value> {
        let mut out: Vec<Value> = Vec::new();
        match self {
            Proposal::Infill { cells, .. } | Proposal::AddColumns { cells, .. } => {
                for c in cells {
                    let v = Value::from(&c.pk);
                    if !out.contains(&v) {
                        out.push(v);
                    }
                }
            }
            Proposal::Populate { rows, .. } => {
                for (i, r) in rows.iter().enumerate() {
                    out.push(match r.get(pk_column) {
                        Some(pv) => pv.to_value(),
                        None => id.map_or(Value::Null, |p| {
                            Value::Key(KeyRef {
                                proposal: p,
                                row: i as u32,
                            })
                        }),
                    });
                }
            }
        }
        out
    }

    /// The record a plan sees for this proposal:
    /// `{op, table, key, keys, count}` plus the proposed content.
    pub fn to_value_with_id(&self, id: Option<u32>, pk_column: &str) -> Value {
        let keys = self.keys(id, pk_column);
        let mut m = BTreeMap::new();
        m.insert("op".to_string(), Value::text(self.tool().name()));
        m.insert("table".to_string(), Value::text(self.table()));
        m.insert(
            "key".to_string(),
            keys.first().cloned().unwrap_or(Value::Null),
        );
        m.insert("keys".to_string(), Value::List(keys));
        m.insert("count".to_string(), Value::Integer(self.len() as i64));
        let cells_value = |cells: &[CellUpdate]| {
            Value::List(
                cells
                    .iter()
                    .map(|c| {
                        Value::record([
                            ("pk", Value::from(&c.pk)),
                            ("column", Value::text(c.column.as_str())),
                            ("value", c.value.to_value()),
                        ])
                    })
                    .collect(),
            )
        };
        match self {
            Proposal::Infill { cells, .. } => {
                m.insert("cells".to_string(), cells_value(cells));
            }
            Proposal::Populate { rows, .. } => {
                let rows = rows
                    .iter()
                    .map(|r| {
                        Value::Record(r.iter().map(|(k, v)| (k.clone(), v.to_value())).collect())
                    })
                    .collect();
                m.insert("rows".to_string(), Value::List(rows));
            }
            Proposal::AddColumns { columns, cells, .. } => {
                let cols = columns
                    .iter()
                    .map(|c| {
                        Value::record([
                            ("name", Value::text(c.name.as_str())),
                            ("dtype", Value::text(c.dtype.as_str())),
                            (
                                "default",
                                c.default.as_ref().map_or(Value::Null, Value::from),
                            ),
                        ])
                    })
                    .collect();
                m.insert("columns".to_string(), Value::List(cols));
                m.insert("cells".to_string(), cells_value(cells));
            }
        }
        Value::Record(m)
    }

    pub fn to_value(&self) -> Value {
        self.to_value_with_id(None, "")
    }
}

fn invalid(tool: Tool, message: String) -> ToolError {
    ToolError::InvalidArgument { tool, message }
}

fn coerce(
    tool: Tool,
    table: &Table,
    col: &ColumnDef,
    v: &Value,
) -> Result<Option<ProposedValue>, ToolError> {
    match v {
        Value::Null => Ok(None),
        Value::Key(k) => {
            if col.foreign_key.is_some() || col.is_primary_key {
                Ok(Some(ProposedValue::Key(*k)))
            } else {
                Err(invalid(
                    tool,
                    format!(
                        "`{}.{}` is not a key column and cannot hold a pending key",
                        table.name(),
                        col.name
                    ),
                ))
            }
        }
        other => match other.to_literal(col.dtype) {
            Some(l) => Ok(Some(ProposedValue::Lit(l))),
            None => Err(ToolError::Database {
                tool,
                source: DbError::TypeMismatch {
                    table: table.name().into(),
                    column: col.name.clone(),
                    value: match other {
                        Value::Text(s) => s.clone(),
                        v => v.canonical_json(),
                    },
                    dtype: col.dtype,
                },
            }),
        },
    }
}

fn entry_record(tool: Tool, e: &Value) -> Result<&BTreeMap<String, Value>, ToolError> {
    e.as_record()
        .ok_or_else(|| invalid(tool, format!("entries must be records, found {}", e.kind())))
}

fn push_cell(tool: Tool, cells: &mut Vec<CellUpdate>, cell: CellUpdate) -> Result<(), ToolError> {
    if let Some(prev) = cells
        .iter()
        .find(|c| c.pk == cell.pk && c.column == cell.column)
    {
        if prev.value != cell.value {
            return Err(invalid(
                tool,
                format!(
                    "conflicting values {} and {} for column `{}` of row {}",
                    prev.value.to_value(),
                    cell.value.to_value(),
                    cell.column,
                    cell.pk
                ),
            ));
        }
        return Ok(());
    }
    cells.push(cell);
    Ok(())
}

fn parse_new_column(tool: Tool, v: &Value) -> Result<ColumnDef, ToolError> {
    match v {
        Value::Text(name) => Ok(ColumnDef::new(name.trim(), DataType::Text)),
        Value::Record(m) => {
            let name = m
                .get("name")
                .and_then(Value::as_str)
                .ok_or_else(|| invalid(tool, "a new column record needs a text `name`".into()))?;
            let dtype = match m.get("dtype").or_else(|| m.get("type")) {
                None | Some(Value::Null) => DataType::Text,
                Some(Value::Text(t)) => DataType::parse(t)
                    .ok_or_else(|| invalid(tool, format!("unknown column type `{t}`")))?,
                Some(other) => {
                    return Err(invalid(
                        tool,
                        format!("column type must be text, found {}", other.kind()),
                    ))
                }
            };
            let mut col = ColumnDef::new(name.trim(), dtype);
            match m.get("default") {
                None | Some(Value::Null) => {}
                Some(d) => {
                    let lit = d.to_literal(dtype).ok_or_else(|| {
                        invalid(
                            tool,
                            format!("default {} of `{name}` is not a valid {dtype}", d),
                        )
                    })?;
                    col = col.with_default(lit);
                }
            }
            Ok(col)
        }
        other => Err(invalid(
            tool,
            format!("new columns are names or records, found {}", other.kind()),
        )),
    }
}

/// Builds the proposal for a DI, PR or AC call against `db`.
///
/// DI and AC entries are linked to existing rows by primary key when the
/// entry carries one, else by their entity-name field; entries that link
/// to no row are dropped. DI ignores NULL values and cells that already
/// hold a value. PR drops exact duplicate rows within the call.
pub fn build_proposal(
    tool: Tool,
    args: &Args,
    db: &Database,
    linker: &Linker,
) -> Result<Proposal, ToolError> {
    let table_name = text_arg(tool, args, "table_name")?;
    let table = db.table(table_name).ok_or_else(|| ToolError::Database {
        tool,
        source: DbError::UnknownTable(table_name.into()),
    })?;
    match tool {
        Tool::Di => {
            let mut cells = Vec::new();
            for e in list_arg(tool, args, "data_entry")? {
                let rec = entry_record(tool, e)?;
                for k in rec.keys() {
                    if table.column(k).is_none() {
                        return Err(invalid(
                            tool,
                            format!("table `{table_name}` has no column `{k}`"),
                        ));
                    }
                }
                let (Some(ri), _) = linker.link_one(e, table) else {
                    continue;
                };
                let pk = table.rows()[ri][table.pk_index()]
                    .clone()
                    .expect("primary key is non-null");
                for (k, v) in rec {
                    let col = table.column(k).expect("checked above");
                    if col.is_primary_key || table.cell(ri, k).is_some() {
                        continue;
                    }
                    if let Some(value) = coerce(tool, table, col, v)? {
                        push_cell(
                            tool,
                            &mut cells,
                            CellUpdate {
                                pk: pk.clone(),
                                column: k.clone(),
                                value,
                            },
                        )?;
                    }
                }
            }
            Ok(Proposal::Infill {
                table: table_name.into(),
                cells,
            })
        }
        Tool::Pr => {
            let mut rows: Vec<BTreeMap<String, ProposedValue>> = Vec::new();
            for e in list_arg(tool, args, "data_entries")? {
                let rec = entry_record(tool, e)?;
                let mut row = BTreeMap::new();
                for (k, v) in rec {
                    let col = table.column(k).ok_or_else(|| {
                        invalid(tool, format!("table `{table_name}` has no column `{k}`"))
                    })?;
                    if let Some(pv) = coerce(tool, table, col, v)? {
                        row.insert(k.clone(), pv);
                    }
                }
                if row.is_empty() || rows.contains(&row) {
                    continue;
                }
                rows.push(row);
            }
            Ok(Proposal::Populate {
                table: table_name.into(),
                rows,
            })
        }
        Tool::Ac => {
            let columns = list_arg(tool, args, "new_columns")?
                .iter()
                .map(|v| parse_new_column(tool, v))
                .collect::<Result<Vec<_>, _>>()?;
            for (i, c) in columns.iter().enumerate() {
                if table.column(&c.name).is_some() || columns[..i].iter().any(|p| p.name == c.name)
                {
                    return Err(ToolError::Database {
                        tool,
                        source: DbError::ColumnCollision {
                            table: table_name.into(),
                            column: c.name.clone(),
                        },
                    });
                }
            }
            let mut cells = Vec::new();
            for e in list_arg(tool, args, "data_entry")? {
                let rec = entry_record(tool, e)?;
                for k in rec.keys() {
                    if table.column(k).is_none() && !columns.iter().any(|c| &c.name == k) {
                        return Err(invalid(
                            tool,
                            format!("`{k}` is neither a column of `{table_name}` nor a new column"),
                        ));
                    }
                }
                let (Some(ri), _) = linker.link_one(e, table) else {
                    continue;
                };
                let pk = table.rows()[ri][table.pk_index()]
                    .clone()
                    .expect("primary key is non-null");
                for col in &columns {
                    let Some(v) = rec.get(&col.name) else {
                        continue;
                    };
                    // new columns cannot go through Norm, so dates and numbers are read here
                    let v = match (v, col.dtype) {
                        (Value::Text(_), DataType::Date | DataType::Integer | DataType::Real) => {
                            normalize_value(v, col, table).unwrap_or_else(|orig| orig)
                        }
                        _ => v.clone(),
                    };
                    if let Some(value) = coerce(tool, table, col, &v)? {
                        push_cell(
                            tool,
                            &mut cells,
                            CellUpdate {
                                pk: pk.clone(),
                                column: col.name.clone(),
                                value,
                            },
                        )?;
                    }
                }
            }
            Ok(Proposal::AddColumns {
                table: table_name.into(),
                columns,
                cells,
            })
        }
        other => Err(invalid(other, "not an update tool".into())),
    }
}
