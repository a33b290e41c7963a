//! Independent oracles for scores and difficulty levels.

use std::collections::BTreeSet;

use opal_core::db::DiffTuple;
use opal_core::eval::Difficulty;

pub fn tuple(i: usize) -> DiffTuple {
    DiffTuple {
        table: "Movie".into(),
        pk_column: "ID".into(),
        pk_value: i.to_string(),
        column: "Budget".into(),
        value: format!("{}", i * 1000),
    }
}

/// `gold` tuples, `predicted` tuples of which the first `matched` are gold.
pub fn sets(
    gold: usize,
    predicted: usize,
    matched: usize,
) -> (BTreeSet<DiffTuple>, BTreeSet<DiffTuple>) {
    let g = (0..gold).map(tuple).collect();
    let p = (0..matched)
        .chain(10_000..10_000 + predicted - matched)
        .map(tuple)
        .collect();
    (p, g)
}

// (gold, predicted, matched, precision, recall, f1), worked by hand
pub const TABLE: [(usize, usize, usize, f64, f64, f64); 20] = [
    (4, 3, 2, 2.0 / 3.0, 1.0 / 2.0, 4.0 / 7.0),
    (1, 1, 1, 1.0, 1.0, 1.0),
    (5, 5, 5, 1.0, 1.0, 1.0),
    (3, 0, 0, 0.0, 0.0, 0.0),
    (0, 3, 0, 0.0, 0.0, 0.0),
    (0, 0, 0, 0.0, 0.0, 0.0),
    (4, 4, 0, 0.0, 0.0, 0.0),
    (2, 4, 2, 1.0 / 2.0, 1.0, 2.0 / 3.0),
    (4, 2, 2, 1.0, 1.0 / 2.0, 2.0 / 3.0),
    (10, 10, 5, 1.0 / 2.0, 1.0 / 2.0, 1.0 / 2.0),
    (3, 1, 1, 1.0, 1.0 / 3.0, 1.0 / 2.0),
    (1, 3, 1, 1.0 / 3.0, 1.0, 1.0 / 2.0),
    (5, 3, 1, 1.0 / 3.0, 1.0 / 5.0, 1.0 / 4.0),
    (6, 4, 3, 3.0 / 4.0, 1.0 / 2.0, 3.0 / 5.0),
    (7, 7, 6, 6.0 / 7.0, 6.0 / 7.0, 6.0 / 7.0),
    (8, 2, 1, 1.0 / 2.0, 1.0 / 8.0, 1.0 / 5.0),
    (2, 8, 1, 1.0 / 8.0, 1.0 / 2.0, 1.0 / 5.0),
    (9, 6, 6, 1.0, 2.0 / 3.0, 4.0 / 5.0),
    (100, 1, 1, 1.0, 1.0 / 100.0, 2.0 / 101.0),
    (12, 15, 9, 3.0 / 5.0, 3.0 / 4.0, 2.0 / 3.0),
];

/// Neumaier-compensated sum, summed back to front.
pub fn compensated_mean(xs: &[f64]) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for &x in xs.iter().rev() {
        let t = sum + x;
        c += if sum.abs() >= x.abs() {
            (sum - t) + x
        } else {
            (x - t) + sum
        };
        sum = t;
    }
    (sum + c) / xs.len() as f64
}

/// The three rows of the level table read literally; `None` where no row applies.
pub fn literal_rows(tables: usize, delta: usize, words: usize) -> Option<Difficulty> {
    let easy = tables == 1 && delta <= 10 && words <= 1000;
    let medium = tables == 1 && 10 < delta && delta <= 20 && 1000 < words && words <= 2000;
    let hard = tables > 1 || delta > 20 || words > 2000;
    match (easy, medium, hard) {
        (true, false, false) => Some(Difficulty::Easy),
        (false, true, false) => Some(Difficulty::Medium),
        (false, false, true) => Some(Difficulty::Hard),
        (false, false, false) => None,
        _ => panic!("rows overlap at {tables} {delta} {words}"),
    }
}
