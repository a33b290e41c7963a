use alloc::string::String;
use alloc::vec::Vec;

use super::Value;
use crate::db::{Literal, Table};
use crate::text::{bigram_dice, tokens, STOPWORDS};

#[derive(Clone, Debug, PartialEq)]
pub struct LinkResult {
    pub entry: Value,
    /// Primary key of the matched row, if any scored at or above the threshold.
    pub pk: Option<Literal>,
    pub score: f64,
}

impl LinkResult {
    pub fn into_value(self) -> Value {
        Value::record([
            ("entry", self.entry),
            ("pk", self.pk.as_ref().map_or(Value::Null, Value::from)),
            ("score", Value::Real(self.score)),
        ])
    }
}

fn content_tokens(s: &str) -> Vec<String> {
    let all = tokens(s);
    let kept: Vec<String> = all
        .iter()
        .filter(|t| !STOPWORDS.contains(&t.as_str()))
        .cloned()
        .collect();
    if kept.is_empty() {
        all
    } else {
        kept
    }
}

fn soft_cover(xs: &[String], ys: &[String]) -> f64 {
    xs.iter()
        .map(|x| ys.iter().map(|y| bigram_dice(x, y)).fold(0.0, f64::max))
        .sum()
}

/// Similarity of two names in [0, 1]: token overlap after lowercasing and
/// dropping punctuation and function words, where each token counts by
/// its best character-bigram match on the other side. Identical token
/// sequences score 1.
pub fn link_score(mention: &str, candidate: &str) -> f64 {
    let a = content_tokens(mention);
    let b = content_tokens(candidate);
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    if a == b {
        return 1.0;
    }
    let s = (soft_cover(&a, &b) + soft_cover(&b, &a)) / (a.len() + b.len()) as f64;
    s.clamp(0.0, 1.0)
}

/// The default entity linker: matches a mention against the entity column
/// of each row.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Linker {
    threshold: f64,
}

impl Linker {
    pub fn new(threshold: f64) -> Self {
        Self { threshold }
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Row index and score of the best match for `entry`. A record entry
    /// carrying an existing primary key links to that row directly;
    /// otherwise its entity-column field (or a text entry itself) is
    /// compared with every row's entity name.
    pub fn link_one(&self, entry: &Value, table: &Table) -> (Option<usize>, f64) {
        let pk = table.pk_column();
        let direct = match entry {
            Value::Record(m) => m.get(&pk.name),
            Value::Integer(_) => Some(entry),
            _ => None,
        };
        if let Some(row) = direct
            .and_then(|v| v.to_literal(pk.dtype))
            .and_then(|k| table.find_row(&k))
        {
            return (Some(row), 1.0);
        }
        let Some(entity) = table.entity_column() else {
            return (None, 0.0);
        };
        let mention = match entry {
            Value::Text(s) => Some(s.as_str()),
            Value::Record(m) => m.get(&entity.name).and_then(Value::as_str),
            _ => None,
        };
        let Some(mention) = mention else {
            return (None, 0.0);
        };
        let ci = table
            .column_index(&entity.name)
            .expect("entity column exists");
        let mut best: (Option<usize>, f64) = (None, 0.0);
        for (ri, row) in table.rows().iter().enumerate() {
            let Some(Literal::Text(name)) = &row[ci] else {
                continue;
            };
            let s = link_score(mention, name);
            if s > best.1 {
                best = (Some(ri), s);
            }
        }
        if best.1 >= self.threshold {
            best
        } else {
            (None, best.1)
        }
    }

    pub fn link(&self, entries: &[Value], table: &Table) -> Vec<LinkResult> {
        entries
            .iter()
            .map(|e| {
                let (row, score) = self.link_one(e, table);
                let pk = row.and_then(|r| table.rows()[r][table.pk_index()].clone());
                LinkResult {
                    entry: e.clone(),
                    pk,
                    score,
                }
            })
            .collect()
    }
}

/// Links each entry to at most one row of `table`.
pub fn link_entities(entries: &[Value], table: &Table, threshold: f64) -> Vec<LinkResult> {
    Linker::new(threshold).link(entries, table)
}
