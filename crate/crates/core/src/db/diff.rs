use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;

use serde::{Deserialize, Serialize};

use super::{Database, DbError, Literal, Row};

/// One materialized cell change: `(table, pk column, pk value, column, value)`.
///
/// Values are held in canonical text form, so equality is exact match after
/// canonicalization. The derived ordering is lexicographic over the five
/// fields.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DiffTuple {
    pub table: String,
    pub pk_column: String,
    pub pk_value: String,
    pub column: String,
    pub value: String,
}

impl DiffTuple {
    pub fn new(
        table: &str,
        pk_column: &str,
        pk_value: &Literal,
        column: &str,
        value: &Literal,
    ) -> Self {
        Self {
            table: table.into(),
            pk_column: pk_column.into(),
            pk_value: pk_value.canonical(),
            column: column.into(),
            value: value.canonical(),
        }
    }
}

/// Cells where `after` holds a non-NULL value that `before` does not hold,
/// including every cell of inserted rows and added columns.
///
/// Rows are matched by primary-key value. `after` may add columns and tables
/// but must keep every table and column of `before`.
pub fn diff(before: &Database, after: &Database) -> Result<BTreeSet<DiffTuple>, DbError> {
    let mut out = BTreeSet::new();
    for bt in before.tables() {
        let at = after
            .table(bt.name())
            .ok_or_else(|| DbError::SchemaIncompatible {
                table: bt.name().into(),
                message: "table missing from the updated database".into(),
            })?;
        for c in bt.columns() {
            if at.column_index(&c.name).is_none() {
                return Err(DbError::SchemaIncompatible {
                    table: bt.name().into(),
                    message: format!("column `{}` missing from the updated database", c.name),
                });
            }
        }
        if at.pk_column().name != bt.pk_column().name {
            return Err(DbError::SchemaIncompatible {
                table: bt.name().into(),
                message: format!(
                    "primary key changed from `{}` to `{}`",
                    bt.pk_column().name,
                    at.pk_column().name
                ),
            });
        }
    }

    for at in after.tables() {
        let pk = at.pk_index();
        let pk_name = &at.columns()[pk].name;
        let old: Option<(&super::Table, BTreeMap<&Literal, &Row>)> =
            before.table(at.name()).map(|bt| {
                let i = bt.pk_index();
                (
                    bt,
                    bt.rows()
                        .iter()
                        .filter_map(|r| r[i].as_ref().map(|k| (k, r)))
                        .collect(),
                )
            });
        // column index in `before` for each `after` column
        let map: alloc::vec::Vec<Option<usize>> = at
            .columns()
            .iter()
            .map(|c| old.as_ref().and_then(|(bt, _)| bt.column_index(&c.name)))
            .collect();
        for row in at.rows() {
            let Some(key) = &row[pk] else { continue };
            let old_row = old.as_ref().and_then(|(_, rows)| rows.get(key).copied());
            for (ci, cell) in row.iter().enumerate() {
                let Some(v) = cell else { continue };
                let prev = match (old_row, map[ci]) {
                    (Some(r), Some(bi)) => r[bi].as_ref(),
                    _ => None,
                };
                if prev != Some(v) {
                    out.insert(DiffTuple::new(
                        at.name(),
                        pk_name,
                        key,
                        &at.columns()[ci].name,
                        v,
                    ));
                }
            }
        }
    }
    Ok(out)
}
