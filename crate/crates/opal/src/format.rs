//! JSON file formats: databases, diffs, fixtures and JSON-lines logs.

use std::collections::BTreeSet;

use opal_core::db::{
    ColumnDef, DataType, Database, Date, DbError, DiffTuple, ForeignKey, Literal, Row, Table,
};
use opal_core::executor::{ExecutionTrace, TraceEvent};
use opal_core::tools::FixtureSet;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value as Json;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("malformed JSON at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("table `{table}`, column `{column}`, {location}: {message}")]
    Cell {
        table: String,
        column: String,
        location: String,
        message: String,
    },
    #[error(transparent)]
    Database(#[from] DbError),
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
}

/// Byte offset of a serde_json error position.
fn byte_offset(input: &[u8], line: usize, column: usize) -> usize {
    let mut offset = 0;
    for _ in 1..line {
        match input[offset..].iter().position(|&b| b == b'\n') {
            Some(p) => offset += p + 1,
            None => return input.len(),
        }
    }
    (offset + column.saturating_sub(1)).min(input.len())
}

fn parse_json<T: DeserializeOwned>(input: &[u8]) -> Result<T, FormatError> {
    serde_json::from_slice(input).map_err(|e| FormatError::Parse {
        offset: byte_offset(input, e.line(), e.column()),
        message: e.to_string(),
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DbFile {
    tables: Vec<TableFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableFile {
    name: String,
    columns: Vec<ColumnFile>,
    #[serde(default)]
    rows: Vec<Vec<Json>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ColumnFile {
    name: String,
    dtype: String,
    #[serde(default)]
    pk: bool,
    #[serde(default)]
    fk: Option<ForeignKey>,
    #[serde(default)]
    default: Json,
    #[serde(default = "yes")]
    nullable: bool,
}

fn yes() -> bool {
    true
}

fn decode_cell(v: &Json, dtype: DataType) -> Result<Option<Literal>, String> {
    let lit = match (v, dtype) {
        (Json::Null, _) => return Ok(None),
        (Json::String(s), DataType::Text) => Literal::text(s),
        (Json::String(s), DataType::Date) => {
            Literal::Date(Date::parse_iso(s).ok_or_else(|| format!("`{s}` is not an ISO date"))?)
        }
        (Json::Number(n), DataType::Integer) => Literal::Integer(
            n.as_i64()
                .ok_or_else(|| format!("{n} is not a 64-bit integer"))?,
        ),
        (Json::Number(n), DataType::Real) => n
            .as_f64()
            .and_then(Literal::real)
            .ok_or_else(|| format!("{n} is not finite"))?,
        (other, dtype) => return Err(format!("{other} is not a valid {dtype}")),
    };
    Ok(Some(lit))
}

fn encode_cell(v: &Option<Literal>) -> Json {
    match v {
        None => Json::Null,
        Some(Literal::Text(s)) => Json::String(s.clone()),
        Some(Literal::Integer(i)) => Json::from(*i),
        Some(Literal::Real(r)) => Json::from(*r),
        Some(Literal::Date(d)) => Json::String(d.to_string()),
    }
}

/// Reads a database, validating schema and contents.
pub fn load_database(input: &[u8]) -> Result<Database, FormatError> {
    let file: DbFile = parse_json(input)?;
    let mut tables = Vec::with_capacity(file.tables.len());
    for t in file.tables {
        let cell_err = |column: &str, location: String, message: String| FormatError::Cell {
            table: t.name.clone(),
            column: column.into(),
            location,
            message,
        };
        let mut columns = Vec::with_capacity(t.columns.len());
        for c in &t.columns {
            let dtype = DataType::parse(&c.dtype).ok_or_else(|| {
                cell_err(
                    &c.name,
                    "schema".into(),
                    format!("unknown dtype `{}`", c.dtype),
                )
            })?;
            let default = decode_cell(&c.default, dtype)
                .map_err(|m| cell_err(&c.name, "default".into(), m))?;
            columns.push(ColumnDef {
                name: c.name.clone(),
                dtype,
                is_primary_key: c.pk,
                foreign_key: c.fk.clone(),
                default,
                nullable: c.nullable && !c.pk,
            });
        }
        let mut rows: Vec<Row> = Vec::with_capacity(t.rows.len());
        for (ri, raw) in t.rows.iter().enumerate() {
            if raw.len() != columns.len() {
                return Err(cell_err(
                    "*",
                    format!("row {ri}"),
                    format!("{} cells for {} columns", raw.len(), columns.len()),
                ));
            }
            let row = raw
                .iter()
                .zip(&columns)
                .map(|(v, c)| {
                    decode_cell(v, c.dtype).map_err(|m| cell_err(&c.name, format!("row {ri}"), m))
                })
                .collect::<Result<Row, _>>()?;
            rows.push(row);
        }
        tables.push(Table::new(t.name.clone(), columns, rows)?);
    }
    Ok(Database::validated(tables)?)
}

/// Pretty-printed database JSON; tables in name order.
pub fn save_database(db: &Database) -> String {
    let file = DbFile {
        tables: db
            .tables()
            .map(|t| TableFile {
                name: t.name().to_string(),
                columns: t
                    .columns()
                    .iter()
                    .map(|c| ColumnFile {
                        name: c.name.clone(),
                        dtype: c.dtype.as_str().into(),
                        pk: c.is_primary_key,
                        fk: c.foreign_key.clone(),
                        default: encode_cell(&c.default),
                        nullable: c.nullable,
                    })
                    .collect(),
                rows: t
                    .rows()
                    .iter()
                    .map(|r| r.iter().map(encode_cell).collect())
                    .collect(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("database JSON is serializable");
    s.push('\n');
    s
}

/// A diff as a sorted JSON array of `[table, pk_column, pk_value, column, value]`.
pub fn save_diff(diff: &BTreeSet<DiffTuple>) -> String {
    let rows: Vec<[&str; 5]> = diff
        .iter()
        .map(|t| {
            [
                t.table.as_str(),
                &t.pk_column,
                &t.pk_value,
                &t.column,
                &t.value,
            ]
        })
        .collect();
    let mut s = String::from("[");
    for (i, r) in rows.iter().enumerate() {
        s.push_str(if i == 0 { "\n  " } else { ",\n  " });
        s.push_str(&serde_json::to_string(r).expect("strings serialize"));
    }
    s.push_str(if rows.is_empty() { "]\n" } else { "\n]\n" });
    s
}

pub fn load_diff(input: &[u8]) -> Result<BTreeSet<DiffTuple>, FormatError> {
    let rows: Vec<[String; 5]> = parse_json(input)?;
    Ok(rows
        .into_iter()
        .map(|[table, pk_column, pk_value, column, value]| DiffTuple {
            table,
            pk_column,
            pk_value,
            column,
            value,
        })
        .collect())
}

pub fn load_fixtures(input: &[u8]) -> Result<FixtureSet, FormatError> {
    parse_json(input)
}

pub fn save_fixtures(fixtures: &FixtureSet) -> String {
    let mut s = serde_json::to_string_pretty(fixtures).expect("fixtures serialize");
    s.push('\n');
    s
}

/// One compact JSON document per line.
pub fn to_jsonl<T: Serialize>(items: &[T]) -> String {
    let mut s = String::new();
    for i in items {
        s.push_str(&serde_json::to_string(i).expect("log events serialize"));
        s.push('\n');
    }
    s
}

pub fn from_jsonl<T: DeserializeOwned>(input: &str) -> Result<Vec<T>, FormatError> {
    input
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| FormatError::Line {
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

pub fn load_trace(input: &str) -> Result<ExecutionTrace, FormatError> {
    Ok(ExecutionTrace {
        events: from_jsonl::<TraceEvent>(input)?,
    })
}

/// Fixtures from a file that is either a fixture map or an execution
/// trace in JSON lines.
pub fn load_fixtures_or_trace(
    path: &std::path::Path,
    input: &[u8],
) -> Result<FixtureSet, FormatError> {
    if path.extension().is_some_and(|e| e == "jsonl") {
        let text = String::from_utf8_lossy(input);
        Ok(load_trace(&text)?.to_fixtures())
    } else {
        load_fixtures(input)
    }
}
