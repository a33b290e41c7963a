//! Applying update proposals to a database.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::db::{
    add_columns, check_integrity, infill_cells, insert_rows_with_keys, ColumnDef, DataType,
    Database, DbError, Literal, PartialRow, Violation,
};
use crate::tools::{KeyRef, Proposal, ProposedValue, Tool};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum CommitError {
    #[error("proposal {proposal} ({tool} on `{table}`): {source}")]
    Database {
        proposal: u32,
        tool: Tool,
        table: String,
        source: DbError,
    },
    #[error("proposal {proposal} ({tool} on `{table}`): pending key #{}.{} refers to a row that is never inserted", key.proposal, key.row)]
    UnresolvedKey {
        proposal: u32,
        tool: Tool,
        table: String,
        key: KeyRef,
    },
    #[error("committed database breaks {} constraint(s), first: {}", .0.len(), .0[0])]
    Integrity(Vec<Violation>),
}

impl CommitError {
    /// Index of the offending proposal, if one is to blame.
    pub fn proposal(&self) -> Option<u32> {
        match self {
            CommitError::Database { proposal, .. }
            | CommitError::UnresolvedKey { proposal, .. } => Some(*proposal),
            CommitError::Integrity(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Committed {
    pub database: Database,
    /// The primary key each pending key resolved to.
    pub keys: BTreeMap<KeyRef, Literal>,
}

/// Order in which proposals are applied: AC first, then PR with parent
/// tables before children, then DI; ties keep emit order.
pub fn commit_order(db: &Database, proposals: &[Proposal]) -> Vec<usize> {
    let topo = db.topological_order();
    let rank = |p: &Proposal| match p {
        Proposal::AddColumns { .. } => (0, 0),
        Proposal::Populate { table, .. } => (
            1,
            topo.iter().position(|t| t == table).unwrap_or(usize::MAX),
        ),
        Proposal::Infill { .. } => (2, 0),
    };
    let mut idx: Vec<usize> = (0..proposals.len()).collect();
    idx.sort_by_key(|&i| (rank(&proposals[i]), i));
    idx
}

/// Applies every proposal or none. Proposal `i` is the one a pending key
/// `#i.r` refers to. Rows and columns proposed twice are added once.
pub fn commit(db: &Database, proposals: &[Proposal]) -> Result<Committed, CommitError> {
    let mut cur = db.clone();
    let mut keys: BTreeMap<KeyRef, Literal> = BTreeMap::new();
    // rows inserted during this commit, for cross-proposal duplicate removal
    let mut inserted: BTreeMap<(String, PartialRow), Literal> = BTreeMap::new();
    let mut added: BTreeMap<(String, String), ColumnDef> = BTreeMap::new();

    for i in commit_order(db, proposals) {
        let p = &proposals[i];
        let id = i as u32;
        let table = p.table();
        let db_err = |source: DbError| CommitError::Database {
            proposal: id,
            tool: p.tool(),
            table: table.into(),
            source,
        };
        let resolve = |v: &ProposedValue, keys: &BTreeMap<KeyRef, Literal>| match v {
            ProposedValue::Lit(l) => Ok(l.clone()),
            ProposedValue::Key(k) => keys.get(k).cloned().ok_or(CommitError::UnresolvedKey {
                proposal: id,
                tool: p.tool(),
                table: table.into(),
                key: *k,
            }),
        };
        match p {
            Proposal::Populate { rows, .. } => {
                let mut fresh: Vec<PartialRow> = Vec::new();
                let mut fresh_idx: Vec<u32> = Vec::new();
                for (r, row) in rows.iter().enumerate() {
                    let mut resolved = PartialRow::new();
                    for (col, v) in row {
                        resolved.insert(col.clone(), resolve(v, &keys)?);
                    }
                    if let Some(k) = inserted.get(&(table.into(), resolved.clone())) {
                        keys.insert(
                            KeyRef {
                                proposal: id,
                                row: r as u32,
                            },
                            k.clone(),
                        );
                        continue;
                    }
                    fresh.push(resolved);
                    fresh_idx.push(r as u32);
                }
                let (next, minted) = insert_rows_with_keys(&cur, table, &fresh).map_err(db_err)?;
                cur = next;
                for ((row, r), k) in fresh.into_iter().zip(fresh_idx).zip(minted) {
                    keys.insert(
                        KeyRef {
                            proposal: id,
                            row: r,
                        },
                        k.clone(),
                    );
                    inserted.insert((table.into(), row), k);
                }
            }
            Proposal::Infill { cells, .. } => {
                let t = cur.require_table(table).map_err(db_err)?;
                let mut by_row: BTreeMap<Literal, PartialRow> = BTreeMap::new();
                for c in cells {
                    let v = resolve(&c.value, &keys)?;
                    // an identical write from an earlier proposal is a no-op
                    let same = t.find_row(&c.pk).and_then(|ri| t.cell(ri, &c.column)) == Some(&v);
                    if !same {
                        by_row
                            .entry(c.pk.clone())
                            .or_default()
                            .insert(c.column.clone(), v);
                    }
                }
                for (pk, updates) in by_row {
                    cur = infill_cells(&cur, table, &pk, &updates).map_err(db_err)?;
                }
            }
            Proposal::AddColumns { columns, cells, .. } => {
                // a column an earlier AC of this commit added with the same
                // definition only receives the values
                let (seen, fresh): (Vec<&ColumnDef>, Vec<&ColumnDef>) = columns
                    .iter()
                    .partition(|c| added.get(&(table.into(), c.name.clone())) == Some(*c));
                let mut values: BTreeMap<Literal, PartialRow> = BTreeMap::new();
                let mut later: BTreeMap<Literal, PartialRow> = BTreeMap::new();
                for c in cells {
                    let v = resolve(&c.value, &keys)?;
                    let target = if seen.iter().any(|s| s.name == c.column) {
                        &mut later
                    } else {
                        &mut values
                    };
                    target
                        .entry(c.pk.clone())
                        .or_default()
                        .insert(c.column.clone(), v);
                }
                let fresh: Vec<ColumnDef> = fresh.into_iter().cloned().collect();
                if !fresh.is_empty() {
                    cur = add_columns(&cur, table, &fresh, &values).map_err(db_err)?;
                }
                for c in fresh {
                    added.insert((table.into(), c.name.clone()), c);
                }
                let t = cur.require_table(table).map_err(db_err)?;
                let mut infills: Vec<(Literal, PartialRow)> = Vec::new();
                for (pk, mut row) in later {
                    let ri = t.find_row(&pk);
                    row.retain(|col, v| ri.and_then(|ri| t.cell(ri, col)) != Some(v));
                    if !row.is_empty() {
                        infills.push((pk, row));
                    }
                }
                for (pk, row) in infills {
                    cur = infill_cells(&cur, table, &pk, &row).map_err(db_err)?;
                }
            }
        }
    }
    let violations = check_integrity(&cur);
    if !violations.is_empty() {
        return Err(CommitError::Integrity(violations));
    }
    Ok(Committed {
        database: cur,
        keys,
    })
}

/// Applies proposals without any checks, so that every constraint they
/// would break shows up in [`check_integrity`]. Unresolvable pending keys
/// become NULL; writes to non-NULL cells are skipped.
pub fn preview(db: &Database, proposals: &[Proposal]) -> Database {
    let mut cur = db.clone();
    let mut keys: BTreeMap<KeyRef, Literal> = BTreeMap::new();
    for i in commit_order(db, proposals) {
        let id = i as u32;
        let p = &proposals[i];
        let table = p.table();
        let resolve = |v: &ProposedValue, keys: &BTreeMap<KeyRef, Literal>| match v {
            ProposedValue::Lit(l) => Some(l.clone()),
            ProposedValue::Key(k) => keys.get(k).cloned(),
        };
        match p {
            Proposal::Populate { rows, .. } => {
                for (r, row) in rows.iter().enumerate() {
                    let Some(t) = cur.table(table) else { break };
                    let pk = t.pk_column();
                    let mut cells: Vec<Option<Literal>> = Vec::with_capacity(t.columns().len());
                    for c in t.columns() {
                        let v = match row.get(&c.name) {
                            Some(v) => resolve(v, &keys),
                            None if c.is_primary_key && pk.dtype == DataType::Integer => {
                                let max = cur
                                    .primary_keys(table)
                                    .iter()
                                    .filter_map(Literal::as_integer)
                                    .max();
                                Some(Literal::Integer(max.map_or(1, |m| m.saturating_add(1))))
                            }
                            None => c.default.clone(),
                        };
                        cells.push(v);
                    }
                    if let Some(k) = &cells[t.pk_index()] {
                        keys.insert(
                            KeyRef {
                                proposal: id,
                                row: r as u32,
                            },
                            k.clone(),
                        );
                    }
                    cur = cur.with_row_unchecked(table, cells);
                }
            }
            Proposal::Infill { cells, .. } => {
                for c in cells {
                    let Some(t) = cur.table(table) else { break };
                    let (Some(ri), Some(ci)) = (t.find_row(&c.pk), t.column_index(&c.column))
                    else {
                        continue;
                    };
                    if t.rows()[ri][ci].is_none() {
                        let v = resolve(&c.value, &keys);
                        cur = cur.with_cell_unchecked(table, ri, ci, v);
                    }
                }
            }
            Proposal::AddColumns { columns, cells, .. } => {
                for col in columns {
                    if cur
                        .table(table)
                        .is_some_and(|t| t.column(&col.name).is_none())
                    {
                        cur = cur.with_column_unchecked(table, col.clone(), col.default.clone());
                    }
                }
                for c in cells {
                    let Some(t) = cur.table(table) else { break };
                    let (Some(ri), Some(ci)) = (t.find_row(&c.pk), t.column_index(&c.column))
                    else {
                        continue;
                    };
                    let v = resolve(&c.value, &keys);
                    cur = cur.with_cell_unchecked(table, ri, ci, v);
                }
            }
        }
    }
    cur
}
