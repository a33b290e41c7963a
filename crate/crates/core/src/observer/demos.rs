use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::db::{Database, DbError, Literal, Table};
use crate::tools::Demonstration;

/// Up to `k` distinct non-NULL values of one column, sampled uniformly
/// without replacement and listed in table order.
pub fn select_demonstrations(
    db: &Database,
    table: &str,
    column: &str,
    k: usize,
    seed: u64,
) -> Result<Demonstration, DbError> {
    let t = db.require_table(table)?;
    let ci = t
        .column_index(column)
        .ok_or_else(|| DbError::UnknownColumn {
            table: table.into(),
            column: column.into(),
        })?;
    let mut distinct: Vec<&Literal> = Vec::new();
    for r in t.rows() {
        if let Some(v) = &r[ci] {
            if !distinct.contains(&v) {
                distinct.push(v);
            }
        }
    }
    let values = sample(distinct.len(), k, mix(seed, table, column))
        .into_iter()
        .map(|i| distinct[i].clone())
        .collect();
    Ok(Demonstration {
        table: table.into(),
        column: column.into(),
        values,
    })
}

/// Up to `k` rows of `table`, one per sampled primary key, rendered as
/// `col=value` pairs.
pub fn select_row_demonstrations(
    db: &Database,
    table: &str,
    k: usize,
    seed: u64,
) -> Result<Vec<String>, DbError> {
    let t = db.require_table(table)?;
    Ok(sample(t.rows().len(), k, mix(seed, table, ""))
        .into_iter()
        .map(|i| render_row(t, i))
        .collect())
}

pub fn render_row(t: &Table, row: usize) -> String {
    let cells: Vec<String> = t
        .columns()
        .iter()
        .zip(&t.rows()[row])
        .map(|(c, v)| match v {
            Some(v) => format!("{}={}", c.name, v),
            None => format!("{}=NULL", c.name),
        })
        .collect();
    cells.join(" | ")
}

/// Demonstrations for every non-key column of every table, as handed to
/// extraction tools.
pub fn column_demonstrations(db: &Database, k: usize, seed: u64) -> Vec<Demonstration> {
    let mut out = Vec::new();
    for t in db.tables() {
        for c in t.columns() {
            if c.foreign_key.is_some() || (c.is_primary_key && c.dtype != crate::db::DataType::Text)
            {
                continue;
            }
            if let Ok(d) = select_demonstrations(db, t.name(), &c.name, k, seed) {
                if !d.values.is_empty() {
                    out.push(d);
                }
            }
        }
    }
    out
}

fn sample(n: usize, k: usize, seed: u64) -> Vec<usize> {
    if n <= k {
        return (0..n).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = rand::seq::index::sample(&mut rng, n, k).into_vec();
    idx.sort_unstable();
    idx
}

/// Per-column seed so different columns draw independent samples.
fn mix(seed: u64, table: &str, column: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in table.bytes().chain([0u8]).chain(column.bytes()) {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h ^ seed.wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::db::testing::movie_db;
    use crate::db::{ColumnDef, DataType, Row};
    use alloc::vec;

    fn places() -> Database {
        let rows: Vec<Row> = ["New York", "Los Angeles", "Boston", "Boston"]
            .iter()
            .enumerate()
            .map(|(i, p)| {
                vec![
                    Some(Literal::Integer(i as i64)),
                    Some(Literal::text(*p)),
                    None,
                ]
            })
            .collect();
        let t = Table::new(
            "Person",
            vec![
                ColumnDef::new("ID", DataType::Integer).primary_key(),
                ColumnDef::new("Loc", DataType::Text),
                ColumnDef::new("Note", DataType::Text),
            ],
            rows,
        )
        .unwrap();
        Database::new(vec![t]).unwrap()
    }

    #[test]
    fn exhaustion_returns_every_distinct_value() {
        let d = select_demonstrations(&places(), "Person", "Loc", 20, 7).unwrap();
        let got: Vec<&str> = d.values.iter().filter_map(Literal::as_text).collect();
        assert_eq!(got, ["New York", "Los Angeles", "Boston"]);
        assert!(select_demonstrations(&places(), "Person", "Note", 20, 7)
            .unwrap()
            .values
            .is_empty());
    }

    #[test]
    fn rows_render_with_nulls() {
        let rows = select_row_demonstrations(&movie_db(), "Movie", 5, 1).unwrap();
        assert_eq!(
            rows[0],
            "ID=1 | Title=Heat | Genre=Action | Budget=NULL | Release=NULL"
        );
    }

    #[test]
    fn unknown_column_is_an_error() {
        assert!(select_demonstrations(&movie_db(), "Movie", "Nope", 3, 0).is_err());
    }
}
