use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use super::{Database, Literal};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    DuplicatePk,
    DanglingFk,
    DtypeMismatch,
    /// NULL in a primary-key or non-nullable column.
    NullViolation,
}

impl ViolationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationKind::DuplicatePk => "duplicate-pk",
            ViolationKind::DanglingFk => "dangling-fk",
            ViolationKind::DtypeMismatch => "dtype-mismatch",
            ViolationKind::NullViolation => "null-violation",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Violation {
    pub table: String,
    pub row: usize,
    pub kind: ViolationKind,
    pub column: String,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} in table `{}`, row {}, column `{}`: {}",
            self.kind.as_str(),
            self.table,
            self.row,
            self.column,
            self.detail
        )
    }
}

/// Every constraint violation in `db`, sorted by (table, row, kind, column).
///
/// A row whose primary key repeats an earlier row's key yields one
/// `duplicate-pk` violation; the first occurrence is not reported.
pub fn check_integrity(db: &Database) -> Vec<Violation> {
    let mut out = Vec::new();
    let parent_keys: BTreeMap<&str, BTreeSet<Literal>> =
        db.table_names().map(|n| (n, db.primary_keys(n))).collect();

    for t in db.tables() {
        let pk = t.pk_index();
        let mut seen: BTreeSet<&Literal> = BTreeSet::new();
        for (ri, row) in t.rows().iter().enumerate() {
            for (ci, col) in t.columns().iter().enumerate() {
                let push = |out: &mut Vec<Violation>, kind, detail| {
                    out.push(Violation {
                        table: t.name().into(),
                        row: ri,
                        kind,
                        column: col.name.clone(),
                        detail,
                    })
                };
                match &row[ci] {
                    None => {
                        if col.is_primary_key || !col.nullable {
                            push(
                                &mut out,
                                ViolationKind::NullViolation,
                                format!("NULL in non-nullable column `{}`", col.name),
                            );
                        }
                    }
                    Some(v) => {
                        if !v.conforms(col.dtype) {
                            push(
                                &mut out,
                                ViolationKind::DtypeMismatch,
                                format!("`{v}` is not a valid {}", col.dtype),
                            );
                        }
                        if let Some(fk) = &col.foreign_key {
                            let ok = parent_keys
                                .get(fk.table.as_str())
                                .is_some_and(|keys| keys.contains(v));
                            if !ok {
                                push(
                                    &mut out,
                                    ViolationKind::DanglingFk,
                                    format!("`{v}` has no matching {}.{}", fk.table, fk.column),
                                );
                            }
                        }
                    }
                }
            }
            if let Some(k) = &row[pk] {
                if !seen.insert(k) {
                    out.push(Violation {
                        table: t.name().into(),
                        row: ri,
                        kind: ViolationKind::DuplicatePk,
                        column: t.columns()[pk].name.clone(),
                        detail: format!("primary key `{k}` already used by an earlier row"),
                    });
                }
            }
        }
    }
    out.sort();
    out
}
