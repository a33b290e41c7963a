use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{ColumnDef, DataType, Database, DbError, Literal, Row, Table};

/// Column name to value for a row being written. Omitted columns are
/// left to the schema default or NULL.
pub type PartialRow = BTreeMap<String, Literal>;

fn check_value(table: &Table, col: &ColumnDef, v: &Literal) -> Result<(), DbError> {
    if v.conforms(col.dtype) {
        Ok(())
    } else {
        Err(DbError::TypeMismatch {
            table: table.name().into(),
            column: col.name.clone(),
            value: v.canonical(),
            dtype: col.dtype,
        })
    }
}

fn check_fk(db: &Database, table: &Table, col: &ColumnDef, v: &Literal) -> Result<(), DbError> {
    let Some(fk) = &col.foreign_key else {
        return Ok(());
    };
    let exists = db.table(&fk.table).is_some_and(|p| p.find_row(v).is_some());
    if exists {
        Ok(())
    } else {
        Err(DbError::ForeignKeyViolation {
            table: table.name().into(),
            column: col.name.clone(),
            value: v.canonical(),
            parent_table: fk.table.clone(),
            parent_column: fk.column.clone(),
        })
    }
}

/// Fills NULL cells of one existing row.
pub fn infill_cells(
    db: &Database,
    table: &str,
    pk_value: &Literal,
    updates: &PartialRow,
) -> Result<Database, DbError> {
    let t = db.require_table(table)?;
    let ri = t.find_row(pk_value).ok_or_else(|| DbError::RowNotFound {
        table: table.into(),
        pk: pk_value.canonical(),
    })?;
    let mut writes = Vec::with_capacity(updates.len());
    for (name, v) in updates {
        let ci = t.column_index(name).ok_or_else(|| DbError::UnknownColumn {
            table: table.into(),
            column: name.clone(),
        })?;
        let col = &t.columns()[ci];
        if let Some(existing) = &t.rows()[ri][ci] {
            return Err(DbError::OverwriteAttempt {
                table: table.into(),
                pk: pk_value.canonical(),
                column: name.clone(),
                existing: existing.canonical(),
            });
        }
        check_value(t, col, v)?;
        check_fk(db, t, col, v)?;
        writes.push((ci, v.clone()));
    }
    let mut out = db.clone();
    let rows = out.table_mut(table).expect("table exists").rows_mut();
    for (ci, v) in writes {
        rows[ri][ci] = Some(v);
    }
    Ok(out)
}

/// Appends rows; see [`insert_rows_with_keys`].
pub fn insert_rows(db: &Database, table: &str, rows: &[PartialRow]) -> Result<Database, DbError> {
    insert_rows_with_keys(db, table, rows).map(|(db, _)| db)
}

/// Appends rows and returns the primary key of each.
///
/// An omitted integer primary key is minted as one more than the largest
/// key present (1 for an empty table). Omitted columns take the schema
/// default, else NULL; a non-nullable column with neither is an error.
pub fn insert_rows_with_keys(
    db: &Database,
    table: &str,
    rows: &[PartialRow],
) -> Result<(Database, Vec<Literal>), DbError> {
    let t = db.require_table(table)?;
    let pk_i = t.pk_index();
    let mut keys: BTreeSet<Literal> = db.primary_keys(table);
    let mut next_int = keys
        .iter()
        .filter_map(Literal::as_integer)
        .max()
        .map_or(1, |m| m.saturating_add(1));

    let mut built: Vec<Row> = Vec::with_capacity(rows.len());
    let mut minted = Vec::with_capacity(rows.len());
    for partial in rows {
        for name in partial.keys() {
            if t.column_index(name).is_none() {
                return Err(DbError::UnknownColumn {
                    table: table.into(),
                    column: name.clone(),
                });
            }
        }
        let mut row: Row = Vec::with_capacity(t.columns().len());
        for col in t.columns() {
            let cell = match partial.get(&col.name) {
                Some(v) => {
                    check_value(t, col, v)?;
                    check_fk(db, t, col, v)?;
                    Some(v.clone())
                }
                None if col.is_primary_key => {
                    if col.dtype != DataType::Integer {
                        return Err(DbError::PrimaryKeyRequired {
                            table: table.into(),
                            column: col.name.clone(),
                            dtype: col.dtype,
                        });
                    }
                    let k = Literal::Integer(next_int);
                    next_int = next_int.saturating_add(1);
                    Some(k)
                }
                None => match &col.default {
                    Some(d) => {
                        check_fk(db, t, col, d)?;
                        Some(d.clone())
                    }
                    None if col.nullable => None,
                    None => {
                        return Err(DbError::MissingValue {
                            table: table.into(),
                            column: col.name.clone(),
                        })
                    }
                },
            };
            row.push(cell);
        }
        let key = row[pk_i].clone().expect("primary key set above");
        if !keys.insert(key.clone()) {
            return Err(DbError::DuplicatePrimaryKey {
                table: table.into(),
                pk: key.canonical(),
            });
        }
        if let Literal::Integer(i) = key {
            next_int = next_int.max(i.saturating_add(1));
        }
        minted.push(key);
        built.push(row);
    }
    let mut out = db.clone();
    out.table_mut(table)
        .expect("table exists")
        .rows_mut()
        .extend(built);
    Ok((out, minted))
}

/// Adds columns to every row of `table`. `values` keys rows by primary key;
/// rows without an entry get the column default (or NULL).
pub fn add_columns(
    db: &Database,
    table: &str,
    new_columns: &[ColumnDef],
    values: &BTreeMap<Literal, PartialRow>,
) -> Result<Database, DbError> {
    let t = db.require_table(table)?;
    let mut names: BTreeSet<&str> = t.columns().iter().map(|c| c.name.as_str()).collect();
    for c in new_columns {
        if !names.insert(c.name.as_str()) {
            return Err(DbError::ColumnCollision {
                table: table.into(),
                column: c.name.clone(),
            });
        }
        if c.is_primary_key {
            return Err(DbError::Schema {
                table: table.into(),
                message: format!("added column `{}` cannot be a primary key", c.name),
            });
        }
        if c.name.trim().is_empty() {
            return Err(DbError::Schema {
                table: table.into(),
                message: "column name is empty".into(),
            });
        }
        if let Some(d) = &c.default {
            check_value(t, c, d)?;
            check_fk(db, t, c, d)?;
        }
        if let Some(fk) = &c.foreign_key {
            let parent = db.require_table(&fk.table)?;
            if parent.pk_column().name != fk.column || parent.pk_column().dtype != c.dtype {
                return Err(DbError::Schema {
                    table: table.into(),
                    message: format!(
                        "column `{}` must reference the primary key of `{}`",
                        c.name, fk.table
                    ),
                });
            }
            if fk.table == table {
                return Err(DbError::Schema {
                    table: table.into(),
                    message: format!(
                        "column `{}` would make the foreign-key graph cyclic",
                        c.name
                    ),
                });
            }
            // a new edge table -> parent is cyclic iff parent already reaches table
            let mut stack = alloc::vec![fk.table.as_str()];
            let mut seen = BTreeSet::new();
            while let Some(n) = stack.pop() {
                if n == table {
                    return Err(DbError::Schema {
                        table: table.into(),
                        message: format!(
                            "column `{}` would make the foreign-key graph cyclic",
                            c.name
                        ),
                    });
                }
                if seen.insert(n) {
                    if let Some(nt) = db.table(n) {
                        stack.extend(nt.foreign_keys().map(|(_, f)| f.table.as_str()));
                    }
                }
            }
        }
    }

    let mut per_row: BTreeMap<usize, &PartialRow> = BTreeMap::new();
    for (pk, cells) in values {
        let ri = t.find_row(pk).ok_or_else(|| DbError::RowNotFound {
            table: table.into(),
            pk: pk.canonical(),
        })?;
        for (name, v) in cells {
            let col = new_columns
                .iter()
                .find(|c| &c.name == name)
                .ok_or_else(|| DbError::UnknownColumn {
                    table: table.into(),
                    column: name.clone(),
                })?;
            check_value(t, col, v)?;
            check_fk(db, t, col, v)?;
        }
        per_row.insert(ri, cells);
    }
    for c in new_columns {
        if c.nullable || c.default.is_some() {
            continue;
        }
        for ri in 0..t.rows().len() {
            if per_row
                .get(&ri)
                .and_then(|cells| cells.get(&c.name))
                .is_none()
            {
                return Err(DbError::MissingValue {
                    table: table.into(),
                    column: c.name.clone(),
                });
            }
        }
    }

    let mut out = db.clone();
    let tm = out.table_mut(table).expect("table exists");
    for c in new_columns {
        let name = c.name.clone();
        let default = c.default.clone();
        tm.push_column(c.clone(), |ri| {
            per_row
                .get(&ri)
                .and_then(|cells| cells.get(&name))
                .cloned()
                .or_else(|| default.clone())
        });
    }
    Ok(out)
}
