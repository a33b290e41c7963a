//! The database-expert agent: schema and content summaries for the planner,
//! demonstrations for extraction tools and mock instances for simulated
//! tests.

mod demos;
mod mock;
mod pattern;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::{self, Write};

use serde::Serialize;

use crate::db::{DataType, Database, Literal, Table};
use crate::text::identifier_words;
use crate::tools::Tool;

pub use demos::{
    column_demonstrations, render_row, select_demonstrations, select_row_demonstrations,
};
pub use mock::{generate_mock_instance, MockInstance, MockScope};
pub use pattern::{Pattern, Segment};

/// Column names that mark a categorical attribute even when the table
/// holds too few rows to tell from the values alone.
const CATEGORY_HINTS: &[&str] = &[
    "genre", "type", "category", "status", "kind", "class", "rating", "gender", "language",
    "country",
];

/// How many example values a non-categorical column shows.
const EXAMPLES: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ColumnRole {
    PrimaryKey,
    ForeignKey {
        table: String,
        column: String,
    },
    /// The column naming each row's entity.
    Entity,
    Categorical,
    Attribute,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ValueRange {
    MinMax {
        min: Literal,
        max: Literal,
    },
    /// Every value of a categorical column, most frequent first.
    Categories {
        values: Vec<Literal>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ColumnObservation {
    pub name: String,
    pub dtype: DataType,
    pub role: ColumnRole,
    pub detected_format: Option<Pattern>,
    pub value_range: Option<ValueRange>,
    pub examples: Vec<Literal>,
    pub semantic_note: String,
    pub null_rate: f64,
    pub distinct: usize,
    pub suggested_tool: Tool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableObservation {
    pub name: String,
    pub row_count: usize,
    pub primary_key: String,
    pub entity_column: Option<String>,
    pub columns: Vec<ColumnObservation>,
    pub summary: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Observation {
    pub tables: Vec<TableObservation>,
}

impl Observation {
    pub fn table(&self, name: &str) -> Option<&TableObservation> {
        self.tables.iter().find(|t| t.name == name)
    }
}

impl TableObservation {
    pub fn column(&self, name: &str) -> Option<&ColumnObservation> {
        self.columns.iter().find(|c| c.name == name)
    }
}

/// Summarizes every table. Pure in `(db, categorical_k)`.
pub fn analyze_schema(db: &Database, categorical_k: usize) -> Observation {
    let order = db.topological_order();
    let tables = order
        .iter()
        .filter_map(|n| db.table(n))
        .map(|t| analyze_table(db, t, categorical_k))
        .collect();
    Observation { tables }
}

fn analyze_table(db: &Database, t: &Table, k: usize) -> TableObservation {
    let entity = t.entity_column().map(|c| c.name.clone());
    let pk = t.pk_column().name.clone();
    let columns: Vec<ColumnObservation> = t
        .columns()
        .iter()
        .enumerate()
        .map(|(ci, col)| {
            let values: Vec<&Literal> = t.rows().iter().filter_map(|r| r[ci].as_ref()).collect();
            let mut counts: BTreeMap<&Literal, usize> = BTreeMap::new();
            for v in &values {
                *counts.entry(v).or_default() += 1;
            }
            let distinct = counts.len();
            let null_rate = if t.rows().is_empty() {
                1.0
            } else {
                (t.rows().len() - values.len()) as f64 / t.rows().len() as f64
            };
            let is_entity = entity.as_deref() == Some(col.name.as_str()) && !col.is_primary_key;
            let role = if col.is_primary_key {
                ColumnRole::PrimaryKey
            } else if let Some(fk) = &col.foreign_key {
                ColumnRole::ForeignKey {
                    table: fk.table.clone(),
                    column: fk.column.clone(),
                }
            } else if is_entity {
                ColumnRole::Entity
            } else if is_categorical(&col.name, col.dtype, values.len(), distinct, k) {
                ColumnRole::Categorical
            } else {
                ColumnRole::Attribute
            };
            let detected_format = Pattern::mine(
                values
                    .iter()
                    .map(|v| v.canonical())
                    .collect::<Vec<_>>()
                    .iter()
                    .map(String::as_str),
            );
            let value_range = match (&role, col.dtype) {
                (ColumnRole::Categorical, _) => {
                    let mut by_count: Vec<(&Literal, usize)> =
                        counts.iter().map(|(v, n)| (*v, *n)).collect();
                    by_count.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
                    Some(ValueRange::Categories {
                        values: by_count.into_iter().map(|(v, _)| v.clone()).collect(),
                    })
                }
                (_, DataType::Integer | DataType::Real | DataType::Date) if distinct > 0 => {
                    let min = (*counts.keys().next().expect("non-empty")).clone();
                    let max = (*counts.keys().next_back().expect("non-empty")).clone();
                    Some(ValueRange::MinMax { min, max })
                }
                _ => None,
            };
            let mut examples: Vec<Literal> = Vec::new();
            for v in &values {
                if examples.len() == EXAMPLES {
                    break;
                }
                if !examples.contains(v) {
                    examples.push((*v).clone());
                }
            }
            let suggested_tool = match &role {
                ColumnRole::Entity => Tool::Ner,
                ColumnRole::PrimaryKey if col.dtype == DataType::Text => Tool::Ner,
                ColumnRole::PrimaryKey | ColumnRole::ForeignKey { .. } => Tool::Link,
                ColumnRole::Categorical => Tool::Classify,
                ColumnRole::Attribute => Tool::Ae,
            };
            let semantic_note = semantic_note(
                t.name(),
                &col.name,
                col.dtype,
                &role,
                detected_format.as_ref(),
                &examples,
            );
            ColumnObservation {
                name: col.name.clone(),
                dtype: col.dtype,
                role,
                detected_format,
                value_range,
                examples,
                semantic_note,
                null_rate,
                distinct,
                suggested_tool,
            }
        })
        .collect();
    let summary = table_summary(db, t, &columns);
    TableObservation {
        name: t.name().into(),
        row_count: t.rows().len(),
        primary_key: pk,
        entity_column: entity,
        columns,
        summary,
    }
}

fn is_categorical(name: &str, dtype: DataType, non_null: usize, distinct: usize, k: usize) -> bool {
    if dtype != DataType::Text || distinct < 2 || distinct > k {
        return false;
    }
    let hinted = identifier_words(name)
        .iter()
        .any(|w| CATEGORY_HINTS.contains(&w.as_str()));
    hinted || non_null >= 2 * distinct
}

fn semantic_note(
    table: &str,
    column: &str,
    dtype: DataType,
    role: &ColumnRole,
    format: Option<&Pattern>,
    examples: &[Literal],
) -> String {
    let words = identifier_words(column).join(" ");
    let mut note = match role {
        ColumnRole::PrimaryKey if dtype == DataType::Integer => {
            format!("unique id of each {table}; new rows get the next free integer")
        }
        ColumnRole::PrimaryKey => format!("unique name of each {table}; new rows must supply it"),
        ColumnRole::ForeignKey {
            table: parent,
            column: pc,
        } => {
            format!("refers to {parent}.{pc}; link extracted names to existing {parent} rows")
        }
        ColumnRole::Entity => format!("name of the {table}; extract with NER"),
        ColumnRole::Categorical => {
            format!("{words} label; values must be one of the known categories")
        }
        ColumnRole::Attribute => match dtype {
            DataType::Date => format!("{words} as an ISO date"),
            DataType::Integer | DataType::Real => format!("{words} as a plain number"),
            DataType::Text => format!("{words} of the {table}"),
        },
    };
    let place = [
        "place",
        "loc",
        "location",
        "city",
        "birthplace",
        "address",
        "country",
    ];
    if matches!(role, ColumnRole::Attribute)
        && identifier_words(column)
            .iter()
            .any(|w| place.contains(&w.as_str()))
        && !examples.is_empty()
    {
        note.push_str("; match the place granularity of existing values");
    }
    if let (ColumnRole::Attribute, DataType::Text, Some(p)) = (role, dtype, format) {
        let _ = write!(note, "; existing values follow `{p}`");
    }
    note
}

fn table_summary(db: &Database, t: &Table, columns: &[ColumnObservation]) -> String {
    let mut s = format!(
        "{} holds {} row{}",
        t.name(),
        t.rows().len(),
        if t.rows().len() == 1 { "" } else { "s" }
    );
    match t.entity_column() {
        Some(e) => {
            let _ = write!(s, ", one per {} named by `{}`", t.name(), e.name);
        }
        None => s.push_str(", with no name column"),
    }
    let parents: Vec<String> = t
        .foreign_keys()
        .map(|(c, fk)| format!("`{}` -> {}", c.name, fk.table))
        .collect();
    if !parents.is_empty() {
        let _ = write!(s, "; references {}", parents.join(", "));
    }
    let children: Vec<&str> = db
        .tables()
        .filter(|o| o.foreign_keys().any(|(_, fk)| fk.table == t.name()))
        .map(Table::name)
        .collect();
    if !children.is_empty() {
        let _ = write!(s, "; referenced by {}", children.join(", "));
    }
    let sparse: Vec<&str> = columns
        .iter()
        .filter(|c| c.null_rate > 0.0 && !t.rows().is_empty())
        .map(|c| c.name.as_str())
        .collect();
    if !sparse.is_empty() {
        let _ = write!(s, "; missing values in {}", sparse.join(", "));
    }
    s.push('.');
    s
}

/// The text block shown to the planner.
impl fmt::Display for Observation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.tables.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            writeln!(
                f,
                "Table {} ({} rows, primary key {})",
                t.name, t.row_count, t.primary_key
            )?;
            writeln!(f, "  {}", t.summary)?;
            for c in &t.columns {
                write!(f, "  - {} [{}", c.name, c.dtype)?;
                match &c.role {
                    ColumnRole::PrimaryKey => write!(f, ", primary key")?,
                    ColumnRole::ForeignKey { table, column } => {
                        write!(f, ", references {table}.{column}")?
                    }
                    ColumnRole::Entity => write!(f, ", entity name")?,
                    ColumnRole::Categorical => write!(f, ", categorical")?,
                    ColumnRole::Attribute => {}
                }
                write!(f, "] {}", c.semantic_note)?;
                if let Some(p) = &c.detected_format {
                    write!(f, "; format {p}")?;
                }
                match &c.value_range {
                    Some(ValueRange::MinMax { min, max }) => write!(f, "; range {min} .. {max}")?,
                    Some(ValueRange::Categories { values }) => {
                        f.write_str("; values ")?;
                        for (j, v) in values.iter().enumerate() {
                            if j > 0 {
                                f.write_str(", ")?;
                            }
                            write!(f, "{v}")?;
                        }
                    }
                    None => {}
                }
                if !c.examples.is_empty()
                    && !matches!(c.value_range, Some(ValueRange::Categories { .. }))
                {
                    f.write_str("; e.g. ")?;
                    for (j, v) in c.examples.iter().enumerate() {
                        if j > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{v:?}", v = v.canonical())?;
                    }
                }
                writeln!(
                    f,
                    "; {:.0}% missing; tool {}",
                    c.null_rate * 100.0,
                    c.suggested_tool
                )?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::db::testing::movie_db;
    use crate::db::{ColumnDef, Row};
    use alloc::string::ToString;
    use alloc::vec;

    #[test]
    fn genre_is_categorical_and_suggests_classify() {
        let rows: Vec<Row> = ["Action", "Comedy", "Drama"]
            .iter()
            .enumerate()
            .map(|(i, g)| {
                vec![
                    Some(Literal::Integer(i as i64 + 1)),
                    Some(Literal::text(format!("M{i}"))),
                    Some(Literal::text(*g)),
                ]
            })
            .collect();
        let t = Table::new(
            "Movie",
            vec![
                ColumnDef::new("ID", DataType::Integer).primary_key(),
                ColumnDef::new("Title", DataType::Text),
                ColumnDef::new("Genre", DataType::Text),
            ],
            rows,
        )
        .unwrap();
        let obs = analyze_schema(&Database::new(vec![t]).unwrap(), 12);
        let g = obs.table("Movie").unwrap().column("Genre").unwrap();
        assert_eq!(g.role, ColumnRole::Categorical);
        assert_eq!(g.suggested_tool, Tool::Classify);
        let Some(ValueRange::Categories { values }) = &g.value_range else {
            panic!()
        };
        assert_eq!(values.len(), 3);
    }

    #[test]
    fn empty_table_has_full_null_rate_and_no_format() {
        let t = Table::new(
            "Empty",
            vec![
                ColumnDef::new("ID", DataType::Integer).primary_key(),
                ColumnDef::new("When", DataType::Date),
            ],
            vec![],
        )
        .unwrap();
        let obs = analyze_schema(&Database::new(vec![t]).unwrap(), 12);
        for c in &obs.tables[0].columns {
            assert_eq!(c.null_rate, 1.0);
            assert!(c.detected_format.is_none());
        }
    }

    #[test]
    fn roles_and_rendering() {
        let obs = analyze_schema(&movie_db(), 12);
        let names: Vec<&str> = obs.tables.iter().map(|t| t.name.as_str()).collect();
        assert_eq!(names, ["Actor", "Movie", "Character"]);
        let ch = obs.table("Character").unwrap();
        assert_eq!(ch.column("ActorID").unwrap().suggested_tool, Tool::Link);
        assert_eq!(
            obs.table("Movie").unwrap().column("Title").unwrap().role,
            ColumnRole::Entity
        );
        let text = obs.to_string();
        assert!(text.contains("Table Movie (2 rows, primary key ID)"));
        assert!(text.contains("references Actor.ActorID"));
    }
}
