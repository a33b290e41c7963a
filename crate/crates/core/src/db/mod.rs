//! In-memory relational database model.
//!
//! A [`Database`] is an immutable value: the mutation operations in this
//! module take a database by reference and return a new one, sharing
//! untouched tables. Each table has exactly one primary-key column; foreign
//! keys always reference the primary key of another table and the foreign-key
//! graph is acyclic.

mod diff;
mod integrity;
mod ops;
mod value;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub use diff::{diff, DiffTuple};
pub use integrity::{check_integrity, Violation, ViolationKind};
pub use ops::{add_columns, infill_cells, insert_rows, insert_rows_with_keys, PartialRow};
pub use value::{DataType, Date, Literal};

/// One row, positionally aligned with the table's columns. `None` is NULL.
pub type Row = Vec<Option<Literal>>;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ForeignKey {
    pub table: String,
    pub column: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnDef {
    pub name: String,
    pub dtype: DataType,
    pub is_primary_key: bool,
    pub foreign_key: Option<ForeignKey>,
    pub default: Option<Literal>,
    pub nullable: bool,
}

impl ColumnDef {
    /// A nullable, non-key column without a default.
    pub fn new(name: impl Into<String>, dtype: DataType) -> Self {
        Self {
            name: name.into(),
            dtype,
            is_primary_key: false,
            foreign_key: None,
            default: None,
            nullable: true,
        }
    }

    pub fn primary_key(mut self) -> Self {
        self.is_primary_key = true;
        self.nullable = false;
        self
    }

    pub fn references(mut self, table: impl Into<String>, column: impl Into<String>) -> Self {
        self.foreign_key = Some(ForeignKey {
            table: table.into(),
            column: column.into(),
        });
        self
    }

    pub fn with_default(mut self, default: Literal) -> Self {
        self.default = Some(default);
        self
    }

    pub fn not_null(mut self) -> Self {
        self.nullable = false;
        self
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum DbError {
    #[error("table `{table}`: {message}")]
    Schema { table: String, message: String },
    #[error("unknown table `{0}`")]
    UnknownTable(String),
    #[error("table `{table}` has no column `{column}`")]
    UnknownColumn { table: String, column: String },
    #[error("table `{table}`: no row with primary key {pk}")]
    RowNotFound { table: String, pk: String },
    #[error("table `{table}`, row {pk}: column `{column}` already holds {existing}; overwriting existing values is not supported")]
    OverwriteAttempt {
        table: String,
        pk: String,
        column: String,
        existing: String,
    },
    #[error("table `{table}`: duplicate primary key {pk}")]
    DuplicatePrimaryKey { table: String, pk: String },
    #[error("table `{table}`, column `{column}`: {value} does not reference an existing {parent_table}.{parent_column}")]
    ForeignKeyViolation {
        table: String,
        column: String,
        value: String,
        parent_table: String,
        parent_column: String,
    },
    #[error("table `{table}`, column `{column}`: `{value}` is not a valid {dtype}")]
    TypeMismatch {
        table: String,
        column: String,
        value: String,
        dtype: DataType,
    },
    #[error("table `{table}`, column `{column}`: a value is required")]
    MissingValue { table: String, column: String },
    #[error("table `{table}`: column `{column}` already exists")]
    ColumnCollision { table: String, column: String },
    #[error("table `{table}`: primary key `{column}` must be supplied for {dtype} keys")]
    PrimaryKeyRequired {
        table: String,
        column: String,
        dtype: DataType,
    },
    #[error("table `{table}`: {message}")]
    SchemaIncompatible { table: String, message: String },
    #[error("integrity violation: {0}")]
    Integrity(Violation),
}

/// A named table. Rows always have exactly one cell per column.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    name: String,
    columns: Vec<ColumnDef>,
    rows: Vec<Row>,
}

impl Table {
    /// Builds a table, checking only its shape: exactly one primary key,
    /// unique column names, conforming defaults and row arity. Cell values
    /// are not checked here; see [`check_integrity`].
    pub fn new(
        name: impl Into<String>,
        columns: Vec<ColumnDef>,
        rows: Vec<Row>,
    ) -> Result<Self, DbError> {
        let name = name.into();
        let schema_err = |message: String| DbError::Schema {
            table: name.clone(),
            message,
        };
        if name.trim().is_empty() {
            return Err(schema_err("table name is empty".into()));
        }
        let pks = columns.iter().filter(|c| c.is_primary_key).count();
        if pks != 1 {
            return Err(schema_err(format!(
                "expected exactly one primary-key column, found {pks}"
            )));
        }
        let mut seen = BTreeSet::new();
        for c in &columns {
            if c.name.trim().is_empty() {
                return Err(schema_err("column name is empty".into()));
            }
            if !seen.insert(c.name.as_str()) {
                return Err(schema_err(format!("duplicate column `{}`", c.name)));
            }
            if let Some(d) = &c.default {
                if !d.conforms(c.dtype) {
                    return Err(schema_err(format!(
                        "default of `{}` is not a valid {}",
                        c.name, c.dtype
                    )));
                }
            }
            if c.is_primary_key && c.nullable {
                return Err(schema_err(format!(
                    "primary key `{}` cannot be nullable",
                    c.name
                )));
            }
        }
        for (i, r) in rows.iter().enumerate() {
            if r.len() != columns.len() {
                return Err(schema_err(format!(
                    "row {i} has {} cells but the table has {} columns",
                    r.len(),
                    columns.len()
                )));
            }
        }
        Ok(Self {
            name,
            columns,
            rows,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn columns(&self) -> &[ColumnDef] {
        &self.columns
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn column(&self, name: &str) -> Option<&ColumnDef> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn pk_index(&self) -> usize {
        self.columns
            .iter()
            .position(|c| c.is_primary_key)
            .expect("table invariant: one primary key")
    }

    pub fn pk_column(&self) -> &ColumnDef {
        &self.columns[self.pk_index()]
    }

    /// Index of the row whose primary key equals `pk`.
    pub fn find_row(&self, pk: &Literal) -> Option<usize> {
        let i = self.pk_index();
        self.rows.iter().position(|r| r[i].as_ref() == Some(pk))
    }

    pub fn cell(&self, row: usize, column: &str) -> Option<&Literal> {
        let c = self.column_index(column)?;
        self.rows.get(row)?.get(c)?.as_ref()
    }

    /// The column that names the row's entity: a text primary key, otherwise
    /// the first text column that is not a foreign key.
    pub fn entity_column(&self) -> Option<&ColumnDef> {
        let pk = self.pk_column();
        if pk.dtype == DataType::Text {
            return Some(pk);
        }
        self.columns
            .iter()
            .find(|c| !c.is_primary_key && c.foreign_key.is_none() && c.dtype == DataType::Text)
    }

    pub fn foreign_keys(&self) -> impl Iterator<Item = (&ColumnDef, &ForeignKey)> {
        self.columns
            .iter()
            .filter_map(|c| c.foreign_key.as_ref().map(|fk| (c, fk)))
    }

    pub(crate) fn rows_mut(&mut self) -> &mut Vec<Row> {
        &mut self.rows
    }

    pub(crate) fn push_column(
        &mut self,
        column: ColumnDef,
        fill: impl Fn(usize) -> Option<Literal>,
    ) {
        for (i, r) in self.rows.iter_mut().enumerate() {
            r.push(fill(i));
        }
        self.columns.push(column);
    }
}

/// A set of named tables with a validated schema.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Database {
    tables: BTreeMap<String, Arc<Table>>,
}

impl Database {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a database, checking the schema: unique table names, foreign
    /// keys that name an existing primary key of the same type, and an
    /// acyclic foreign-key graph. Row contents are not validated; use
    /// [`Database::validated`] for that.
    pub fn new(tables: Vec<Table>) -> Result<Self, DbError> {
        let mut map = BTreeMap::new();
        for t in tables {
            let name = t.name.clone();
            if map.insert(name.clone(), Arc::new(t)).is_some() {
                return Err(DbError::Schema {
                    table: name,
                    message: "duplicate table name".into(),
                });
            }
        }
        let db = Self { tables: map };
        db.check_schema()?;
        Ok(db)
    }

    /// [`Database::new`] followed by a full integrity check.
    pub fn validated(tables: Vec<Table>) -> Result<Self, DbError> {
        let db = Self::new(tables)?;
        if let Some(v) = check_integrity(&db).into_iter().next() {
            return Err(DbError::Integrity(v));
        }
        Ok(db)
    }

    fn check_schema(&self) -> Result<(), DbError> {
        for t in self.tables.values() {
            for (c, fk) in t.foreign_keys() {
                let err = |message: String| DbError::Schema {
                    table: t.name.clone(),
                    message,
                };
                let parent = self.tables.get(&fk.table).ok_or_else(|| {
                    err(format!(
                        "column `{}` references missing table `{}`",
                        c.name, fk.table
                    ))
                })?;
                let pc = parent.pk_column();
                if pc.name != fk.column {
                    return Err(err(format!(
                        "column `{}` references `{}.{}`, which is not its primary key",
                        c.name, fk.table, fk.column
                    )));
                }
                if pc.dtype != c.dtype {
                    return Err(err(format!(
                        "column `{}` is {} but `{}.{}` is {}",
                        c.name, c.dtype, fk.table, fk.column, pc.dtype
                    )));
                }
            }
        }
        if self.fk_order().is_none() {
            return Err(DbError::Schema {
                table: self.tables.keys().next().cloned().unwrap_or_default(),
                message: "foreign-key references form a cycle".into(),
            });
        }
        Ok(())
    }

    /// Table names with every referenced table ordered before the tables
    /// referencing it; ties broken by name. `None` if the graph has a cycle.
    fn fk_order(&self) -> Option<Vec<String>> {
        let mut indeg: BTreeMap<&str, usize> =
            self.tables.keys().map(|k| (k.as_str(), 0)).collect();
        let mut children: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for t in self.tables.values() {
            let parents: BTreeSet<&str> =
                t.foreign_keys().map(|(_, fk)| fk.table.as_str()).collect();
            for p in parents {
                *indeg.get_mut(t.name.as_str())? += 1;
                children.entry(p).or_default().push(t.name.as_str());
            }
        }
        let mut ready: BTreeSet<&str> = indeg
            .iter()
            .filter(|(_, d)| **d == 0)
            .map(|(k, _)| *k)
            .collect();
        let mut out = Vec::with_capacity(indeg.len());
        while let Some(n) = ready.pop_first() {
            out.push(n.to_string());
            for c in children.get(n).map(Vec::as_slice).unwrap_or(&[]) {
                let d = indeg.get_mut(c)?;
                *d -= 1;
                if *d == 0 {
                    ready.insert(c);
                }
            }
        }
        (out.len() == self.tables.len()).then_some(out)
    }

    /// Topological order of the foreign-key graph, parents first.
    pub fn topological_order(&self) -> Vec<String> {
        self.fk_order()
            .expect("schema invariant: acyclic foreign keys")
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.get(name).map(|t| &**t)
    }

    pub fn require_table(&self, name: &str) -> Result<&Table, DbError> {
        self.table(name)
            .ok_or_else(|| DbError::UnknownTable(name.into()))
    }

    pub fn tables(&self) -> impl Iterator<Item = &Table> {
        self.tables.values().map(|t| &**t)
    }

    pub fn table_names(&self) -> impl Iterator<Item = &str> {
        self.tables.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.tables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }

    pub(crate) fn table_mut(&mut self, name: &str) -> Option<&mut Table> {
        self.tables.get_mut(name).map(Arc::make_mut)
    }

    /// All primary-key values of `table`.
    pub fn primary_keys(&self, table: &str) -> BTreeSet<Literal> {
        self.table(table)
            .map(|t| {
                let i = t.pk_index();
                t.rows.iter().filter_map(|r| r[i].clone()).collect()
            })
            .unwrap_or_default()
    }

    /// Rewrites one cell without any checks. Used to build corrupted
    /// fixtures and raw previews of pending writes.
    pub fn with_cell_unchecked(
        &self,
        table: &str,
        row: usize,
        column: usize,
        value: Option<Literal>,
    ) -> Self {
        let mut db = self.clone();
        if let Some(t) = db.table_mut(table) {
            if let Some(cell) = t.rows.get_mut(row).and_then(|r| r.get_mut(column)) {
                *cell = value;
            }
        }
        db
    }

    /// Appends a row without any checks (arity is still padded/truncated to
    /// the column count).
    pub fn with_row_unchecked(&self, table: &str, mut row: Row) -> Self {
        let mut db = self.clone();
        if let Some(t) = db.table_mut(table) {
            row.resize(t.columns.len(), None);
            t.rows.push(row);
        }
        db
    }

    /// Appends a column without any checks; every row gets `fill`.
    pub fn with_column_unchecked(
        &self,
        table: &str,
        column: ColumnDef,
        fill: Option<Literal>,
    ) -> Self {
        let mut db = self.clone();
        if let Some(t) = db.table_mut(table) {
            t.push_column(column, |_| fill.clone());
        }
        db
    }
}
