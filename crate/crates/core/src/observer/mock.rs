//! Synthetic task instances for simulated tests: a few made-up rows, a
//! document describing them and the extraction outputs a plan would need.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::is_categorical;
use crate::db::{
    add_columns, diff, infill_cells, insert_rows_with_keys, ColumnDef, DataType, Database, Date,
    DbError, DiffTuple, Literal, PartialRow, Table,
};
use crate::eval::TaskType;
use crate::text::identifier_words;
use crate::tools::{link_score, normalize_value, Args, FixtureSet, Linker, Tool, Value};

const ADJECTIVES: &[&str] = &[
    "Silent",
    "Crimson",
    "Hollow",
    "Golden",
    "Northern",
    "Broken",
    "Velvet",
    "Distant",
    "Frozen",
    "Hidden",
    "Quiet",
    "Amber",
    "Electric",
    "Paper",
    "Iron",
    "Wandering",
];
const NOUNS: &[&str] = &[
    "Harbor", "Orchard", "Lantern", "Meridian", "Canyon", "Tide", "Compass", "Garden", "Signal",
    "Ember", "Atlas", "Horizon", "Falcon", "Mirror", "Bridge", "Cascade",
];
const GIVEN: &[&str] = &[
    "Marlowe",
    "Imogen",
    "Thaddeus",
    "Saoirse",
    "Casimir",
    "Ottilie",
    "Leopold",
    "Rosalind",
    "Evander",
    "Philippa",
    "Bartholomew",
    "Henrietta",
    "Cornelius",
    "Genevieve",
    "Ignatius",
    "Wilhelmina",
];
const FAMILY: &[&str] = &[
    "Quillfeather",
    "Ashdown",
    "Pembrose",
    "Vantreight",
    "Kestrell",
    "Oakhurst",
    "Delacroix",
    "Thornbury",
    "Wexley",
    "Marchetti",
    "Holloway",
    "Brannigan",
    "Featherstone",
    "Lindqvist",
    "Okonkwo",
    "Szymanski",
];
const PERSON_WORDS: &[&str] = &[
    "actor",
    "actress",
    "person",
    "people",
    "director",
    "author",
    "writer",
    "artist",
    "singer",
    "player",
    "employee",
    "student",
    "member",
    "user",
    "customer",
    "character",
    "founder",
    "coach",
    "teacher",
    "scientist",
    "manager",
];

/// What a mock instance covers.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct MockScope {
    /// Target tables; the first is the main one. Empty picks one.
    pub tables: Vec<String>,
    /// Columns to fill, by name; empty means every non-key column.
    pub columns: Vec<String>,
    /// Columns a CA instance adds.
    pub new_columns: Vec<ColumnDef>,
}

/// A synthetic task: the database to run on, documents and recorded tool
/// outputs, and the database the task should produce.
#[derive(Clone, Debug, PartialEq)]
pub struct MockInstance {
    pub task_type: TaskType,
    pub target_table: String,
    /// The real database plus any synthetic rows the task needs to exist.
    pub database: Database,
    pub documents: Vec<String>,
    pub fixtures: FixtureSet,
    pub expected: Database,
    pub expected_diff: BTreeSet<DiffTuple>,
    /// The scope with tables and columns resolved.
    pub scope: MockScope,
}

struct Gen<'a> {
    db: &'a Database,
    rng: ChaCha8Rng,
    used_names: Vec<String>,
    threshold: f64,
    fixtures: FixtureSet,
    sentences: Vec<String>,
    doc: String,
    categorical_k: usize,
}

/// One synthetic row as described in the document.
struct MockRow {
    table: String,
    name: Option<String>,
    values: PartialRow,
    /// Surface form of each described attribute, `None` when the document
    /// says nothing about it.
    raw: BTreeMap<String, Option<String>>,
    /// FK column to the parent's entity name.
    parents: BTreeMap<String, (String, String)>,
}

/// Builds a mock instance of `task_type` over `db`. Fixture keys use the
/// single generated document as `text`.
pub fn generate_mock_instance(
    db: &Database,
    task_type: TaskType,
    scope: &MockScope,
    seed: u64,
    link_threshold: f64,
    categorical_k: usize,
) -> Result<MockInstance, DbError> {
    let mut g = Gen {
        db,
        rng: ChaCha8Rng::seed_from_u64(seed),
        used_names: Vec::new(),
        threshold: link_threshold.min(0.8),
        fixtures: FixtureSet::default(),
        sentences: Vec::new(),
        doc: String::new(),
        categorical_k,
    };
    let tables = resolve_tables(db, task_type, &scope.tables)?;
    let target = tables[0].clone();
    let mut resolved = MockScope {
        tables: tables.clone(),
        columns: scope.columns.clone(),
        new_columns: Vec::new(),
    };

    let (database, expected, rows) = match task_type {
        TaskType::Rp => {
            let mut expected = db.clone();
            let mut keys: BTreeMap<String, (Literal, Option<String>)> = BTreeMap::new();
            let mut rows = Vec::new();
            let order = db.topological_order();
            let mut inserts = tables.clone();
            inserts.sort_by_key(|t| order.iter().position(|o| o == t));
            for t in &inserts {
                let table = db.require_table(t)?;
                let row = g.row(table, &scope.columns, &keys, true, false);
                let (next, minted) =
                    insert_rows_with_keys(&expected, t, core::slice::from_ref(&row.values))?;
                expected = next;
                keys.insert(t.clone(), (minted[0].clone(), row.name.clone()));
                rows.push(row);
            }
            (db.clone(), expected, rows)
        }
        TaskType::Di => {
            let table = db.require_table(&target)?;
            let holes = di_columns(table, &scope.columns, categorical_k);
            if holes.is_empty() {
                return Err(DbError::Schema {
                    table: target,
                    message: "no nullable column to infill".into(),
                });
            }
            resolved.columns = holes.clone();
            let mut row = g.row(table, &[], &BTreeMap::new(), false, true);
            let mut fill = PartialRow::new();
            for h in &holes {
                if let Some(v) = row.values.remove(h) {
                    fill.insert(h.clone(), v);
                }
            }
            for (col, raw) in row.raw.iter_mut() {
                if !holes.contains(col) {
                    // existing cells are not described, only fixtured
                    *raw = None;
                }
            }
            let (before, minted) =
                insert_rows_with_keys(db, &target, core::slice::from_ref(&row.values))?;
            let expected = infill_cells(&before, &target, &minted[0], &fill)?;
            row.values.extend(fill);
            (before, expected, alloc::vec![row])
        }
        TaskType::Ca => {
            let table = db.require_table(&target)?;
            let mut new_columns = scope.new_columns.clone();
            if new_columns.is_empty() {
                let mut name = String::from("Extra");
                let mut n = 2;
                while table.column(&name).is_some() {
                    name = format!("Extra{n}");
                    n += 1;
                }
                new_columns.push(ColumnDef::new(name, DataType::Text));
            }
            resolved.new_columns = new_columns.clone();
            let mut row = g.row(table, &[], &BTreeMap::new(), false, true);
            for raw in row.raw.values_mut() {
                *raw = None;
            }
            let (before, minted) =
                insert_rows_with_keys(db, &target, core::slice::from_ref(&row.values))?;
            let mut cells = PartialRow::new();
            for c in &new_columns {
                let (raw, lit) = g.synth(c, None);
                row.raw.insert(c.name.clone(), Some(raw));
                row.values.insert(c.name.clone(), lit.clone());
                cells.insert(c.name.clone(), lit);
            }
            let mut values = BTreeMap::new();
            values.insert(minted[0].clone(), cells);
            let expected = add_columns(&before, &target, &new_columns, &values)?;
            (before, expected, alloc::vec![row])
        }
    };

    g.describe(&rows);
    g.doc = g.sentences.join(" ");
    g.record_fixtures(&rows, &database);
    let expected_diff = diff(&database, &expected)?;
    Ok(MockInstance {
        task_type,
        target_table: target,
        database,
        documents: alloc::vec![g.doc],
        fixtures: g.fixtures,
        expected,
        expected_diff,
        scope: resolved,
    })
}

fn resolve_tables(
    db: &Database,
    task: TaskType,
    requested: &[String],
) -> Result<Vec<String>, DbError> {
    let order = db.topological_order();
    let mut tables: Vec<String> = Vec::new();
    for t in requested {
        db.require_table(t)?;
        if !tables.contains(t) {
            tables.push(t.clone());
        }
    }
    if tables.is_empty() {
        let pick = order
            .iter()
            .rev()
            .find(|t| db.table(t).is_some_and(|t| t.entity_column().is_some()))
            .or_else(|| order.first())
            .ok_or_else(|| DbError::Schema {
                table: String::new(),
                message: "database has no tables".into(),
            })?;
        tables.push(pick.clone());
    }
    if task == TaskType::Rp {
        // a required reference into an empty table needs a new parent row too
        let mut i = 0;
        while i < tables.len() {
            let t = db.require_table(&tables[i])?;
            for (c, fk) in t.foreign_keys() {
                let empty = db.table(&fk.table).is_none_or(|p| p.rows().is_empty());
                if !c.nullable && c.default.is_none() && empty && !tables.contains(&fk.table) {
                    tables.push(fk.table.clone());
                }
            }
            i += 1;
        }
    }
    Ok(tables)
}

/// Columns to leave NULL in a DI mock row.
fn di_columns(table: &Table, scope: &[String], k: usize) -> Vec<String> {
    let nullable: Vec<&ColumnDef> = table
        .columns()
        .iter()
        .filter(|c| c.nullable && !c.is_primary_key)
        .collect();
    let entity = table.entity_column().map(|c| c.name.as_str());
    let scoped: Vec<String> = nullable
        .iter()
        .filter(|c| scope.contains(&c.name))
        .map(|c| c.name.clone())
        .collect();
    if !scoped.is_empty() {
        return scoped;
    }
    let counts = |c: &ColumnDef| {
        let ci = table.column_index(&c.name).expect("column");
        let vals: Vec<&Literal> = table.rows().iter().filter_map(|r| r[ci].as_ref()).collect();
        let distinct: BTreeSet<&Literal> = vals.iter().copied().collect();
        (vals.len(), distinct.len())
    };
    let attr = nullable.iter().find(|c| {
        let (n, d) = counts(c);
        c.foreign_key.is_none()
            && Some(c.name.as_str()) != entity
            && !is_categorical(&c.name, c.dtype, n, d, k)
    });
    let cat = nullable
        .iter()
        .find(|c| c.foreign_key.is_none() && Some(c.name.as_str()) != entity);
    let fk = nullable.iter().find(|c| c.foreign_key.is_some());
    attr.or(cat)
        .or(fk)
        .map(|c| alloc::vec![c.name.clone()])
        .unwrap_or_default()
}

impl Gen<'_> {
    /// A synthetic row for `table`. FK cells point at rows in `keys` when
    /// the parent is in scope, else at a random existing parent row.
    /// With `full`, every column gets a value; otherwise only the scoped
    /// ones plus whatever the schema requires.
    fn row(
        &mut self,
        table: &Table,
        scope_cols: &[String],
        keys: &BTreeMap<String, (Literal, Option<String>)>,
        pending_parents: bool,
        full: bool,
    ) -> MockRow {
        let entity = table.entity_column().map(|c| c.name.clone());
        let name = entity.as_ref().map(|_| self.fresh_name(table));
        let mut values = PartialRow::new();
        let mut raw = BTreeMap::new();
        let mut parents = BTreeMap::new();
        for c in table.columns() {
            if Some(&c.name) == entity.as_ref() {
                let n = name.clone().expect("entity row has a name");
                values.insert(c.name.clone(), Literal::text(&n));
                continue;
            }
            if c.is_primary_key {
                // integer keys are minted on insert
                continue;
            }
            if let Some(fk) = &c.foreign_key {
                let target = match keys.get(&fk.table) {
                    Some((k, n)) if pending_parents => Some((k.clone(), n.clone())),
                    _ => self.existing_parent(&fk.table),
                };
                if let Some((k, pname)) = target {
                    if pname.is_none() && c.nullable {
                        // a document cannot point at a row without a name
                        continue;
                    }
                    values.insert(c.name.clone(), k);
                    if let Some(pn) = pname {
                        parents.insert(c.name.clone(), (fk.table.clone(), pn));
                    }
                }
                continue;
            }
            let wanted = full
                || (scope_cols.is_empty() || scope_cols.contains(&c.name))
                || (!c.nullable && c.default.is_none());
            if !wanted {
                raw.insert(c.name.clone(), None);
                continue;
            }
            let (r, lit) = self.synth(c, Some(table));
            values.insert(c.name.clone(), lit);
            raw.insert(c.name.clone(), Some(r));
        }
        MockRow {
            table: table.name().into(),
            name,
            values,
            raw,
            parents,
        }
    }

    fn existing_parent(&mut self, parent: &str) -> Option<(Literal, Option<String>)> {
        let t = self.db.table(parent)?;
        if t.rows().is_empty() {
            return None;
        }
        let name_of = |ri: usize| {
            t.entity_column()
                .and_then(|e| t.cell(ri, &e.name))
                .map(|l| l.canonical())
                .filter(|n| Linker::new(1.0).link_one(&Value::text(n.clone()), t).0 == Some(ri))
        };
        // prefer rows a document can name
        let named: Vec<usize> = (0..t.rows().len())
            .filter(|&ri| name_of(ri).is_some())
            .collect();
        let ri = if named.is_empty() {
            self.rng.random_range(0..t.rows().len())
        } else {
            named[self.rng.random_range(0..named.len())]
        };
        let pk = t.rows()[ri][t.pk_index()].clone()?;
        Some((pk, name_of(ri)))
    }

    fn fresh_name(&mut self, table: &Table) -> String {
        let words = identifier_words(table.name());
        let person = words.iter().any(|w| PERSON_WORDS.contains(&w.as_str()));
        let existing: Vec<String> = table
            .entity_column()
            .and_then(|e| table.column_index(&e.name))
            .map(|ci| {
                table
                    .rows()
                    .iter()
                    .filter_map(|r| r[ci].as_ref().map(Literal::canonical))
                    .collect()
            })
            .unwrap_or_default();
        for attempt in 0..64 {
            let cand = if person {
                format!(
                    "{} {}",
                    pick(&mut self.rng, GIVEN),
                    pick(&mut self.rng, FAMILY)
                )
            } else if attempt < 48 {
                format!(
                    "The {} {}",
                    pick(&mut self.rng, ADJECTIVES),
                    pick(&mut self.rng, NOUNS)
                )
            } else {
                format!(
                    "{} {} {}",
                    pick(&mut self.rng, ADJECTIVES),
                    pick(&mut self.rng, NOUNS),
                    pick(&mut self.rng, NOUNS)
                )
            };
            let clash = existing
                .iter()
                .chain(&self.used_names)
                .any(|e| link_score(&cand, e) >= self.threshold);
            if !clash {
                self.used_names.push(cand.clone());
                return cand;
            }
        }
        let n = self.used_names.len() + existing.len() + 1;
        let cand = format!("{} Specimen {n}", table.name());
        self.used_names.push(cand.clone());
        cand
    }

    /// A value for `col` and the way a document would write it.
    fn synth(&mut self, col: &ColumnDef, table: Option<&Table>) -> (String, Literal) {
        let existing: Vec<Literal> = table
            .and_then(|t| t.column_index(&col.name).map(|ci| (t, ci)))
            .map(|(t, ci)| t.rows().iter().filter_map(|r| r[ci].clone()).collect())
            .unwrap_or_default();
        let lit = match col.dtype {
            DataType::Text => {
                if existing.is_empty() {
                    let w = identifier_words(&col.name);
                    let label = w
                        .first()
                        .map(|s| capitalize(s))
                        .unwrap_or_else(|| "Value".into());
                    Literal::text(format!("{} {}", pick(&mut self.rng, ADJECTIVES), label))
                } else {
                    existing[self.rng.random_range(0..existing.len())].clone()
                }
            }
            DataType::Integer => {
                let ints: Vec<i64> = existing.iter().filter_map(Literal::as_integer).collect();
                let (lo, hi) = match (ints.iter().min(), ints.iter().max()) {
                    (Some(&a), Some(&b)) if a < b => (a, b),
                    (Some(&a), _) => (a, a.saturating_add(100)),
                    _ => (1, 1000),
                };
                Literal::Integer(self.rng.random_range(lo..=hi))
            }
            DataType::Real => {
                let tenths = self.rng.random_range(1..=9999i64);
                Literal::real(tenths as f64 / 10.0).expect("finite")
            }
            DataType::Date => {
                let dates: Vec<Date> = existing
                    .iter()
                    .filter_map(|l| {
                        if let Literal::Date(d) = l {
                            Some(*d)
                        } else {
                            None
                        }
                    })
                    .collect();
                let lo = dates
                    .iter()
                    .min()
                    .map_or(Date::new(1960, 1, 1).expect("valid"), |d| *d)
                    .to_day_number();
                let hi = dates
                    .iter()
                    .max()
                    .map_or(Date::new(2024, 12, 31).expect("valid"), |d| *d)
                    .to_day_number();
                let n = self.rng.random_range(lo..=hi.max(lo));
                Literal::Date(Date::from_day_number(n).expect("in range"))
            }
        };
        let raw = surface_form(&lit);
        let roundtrips = table.is_some_and(|t| {
            normalize_value(&Value::text(raw.clone()), col, t)
                .ok()
                .and_then(|v| v.to_literal(col.dtype))
                .as_ref()
                == Some(&lit)
        });
        if table.is_none() || roundtrips {
            (raw, lit)
        } else {
            (lit.canonical(), lit)
        }
    }

    fn describe(&mut self, rows: &[MockRow]) {
        for r in rows {
            let kind = identifier_words(&r.table).join(" ");
            let subject = match &r.name {
                Some(n) => {
                    self.sentences.push(format!("{n} is a {kind}."));
                    n.clone()
                }
                None => format!("this {kind}"),
            };
            for (col, raw) in &r.raw {
                if let Some(v) = raw {
                    let words = identifier_words(col).join(" ");
                    self.sentences
                        .push(format!("The {words} of {subject} is {v}."));
                }
            }
            for (col, (parent, pname)) in &r.parents {
                let words = identifier_words(parent).join(" ");
                let _ = col;
                self.sentences
                    .push(format!("{subject} is linked to {pname}, a {words}."));
            }
        }
    }

    fn record_fixtures(&mut self, rows: &[MockRow], db: &Database) {
        let doc = Value::text(self.doc.clone());
        let text = |extra: &[(&str, Value)]| -> Args {
            let mut a = Args::new();
            a.insert("text".into(), doc.clone());
            for (k, v) in extra {
                a.insert((*k).into(), v.clone());
            }
            a
        };
        // NER: every mentioned entity, by table
        let mut mentions: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for r in rows {
            if let Some(n) = &r.name {
                push_unique(mentions.entry(r.table.clone()).or_default(), n);
            }
            for (parent, pname) in r.parents.values() {
                push_unique(mentions.entry(parent.clone()).or_default(), pname);
            }
        }
        for (table, names) in &mentions {
            for ty in type_variants(db, table) {
                self.fixtures.insert(
                    Tool::Ner,
                    &text(&[("type", Value::text(ty))]),
                    Value::texts(names.iter()),
                );
            }
        }
        for r in rows {
            let Some(name) = &r.name else { continue };
            let table = db.table(&r.table);
            for (col, raw) in &r.raw {
                let value = match raw {
                    Some(v) => Value::text(v.clone()),
                    None => match r.values.get(col) {
                        Some(l) => Value::text(l.canonical()),
                        None => Value::Null,
                    },
                };
                let args = text(&[
                    ("entity", Value::text(name.clone())),
                    ("attribute_list", Value::texts([col.as_str()])),
                ]);
                self.fixtures.insert(
                    Tool::Ae,
                    &args,
                    Value::record([(col.as_str(), value.clone())]),
                );
                let Some(t) = table else { continue };
                let Some(c) = t.column(col) else { continue };
                let Some(ci) = t.column_index(col) else {
                    continue;
                };
                let vals: Vec<&Literal> =
                    t.rows().iter().filter_map(|row| row[ci].as_ref()).collect();
                let labels: BTreeSet<&Literal> = vals.iter().copied().collect();
                if !value.is_null()
                    && is_categorical(
                        &c.name,
                        c.dtype,
                        vals.len(),
                        labels.len(),
                        self.categorical_k,
                    )
                {
                    let label_list = Value::texts(labels.iter().map(|l| l.canonical()));
                    self.fixtures.insert(
                        Tool::Classify,
                        &text(&[("label_list", label_list)]),
                        value,
                    );
                }
            }
            let fks: Vec<(String, String)> = table
                .map(|t| {
                    t.foreign_keys()
                        .map(|(c, fk)| (c.name.clone(), fk.table.clone()))
                        .collect()
                })
                .unwrap_or_default();
            for (col, parent) in fks {
                // references the document does not state relate to nothing
                let found = r.parents.get(&col).map(|(_, pname)| pname.as_str());
                let mut relations: Vec<String> =
                    alloc::vec![parent.clone(), parent.to_lowercase(), col.clone()];
                relations.push(identifier_words(&col).join(" "));
                relations.dedup();
                for rel in relations {
                    let args = text(&[
                        ("head_e", Value::text(name.clone())),
                        ("relation", Value::text(rel)),
                    ]);
                    if found.is_some() || self.fixtures.get(Tool::Re, &args).is_none() {
                        self.fixtures.insert(Tool::Re, &args, Value::texts(found));
                    }
                }
            }
        }
    }
}

fn type_variants(db: &Database, table: &str) -> Vec<String> {
    let mut out = alloc::vec![
        table.to_string(),
        table.to_lowercase(),
        identifier_words(table).join(" ")
    ];
    if let Some(e) = db.table(table).and_then(Table::entity_column) {
        out.push(e.name.clone());
    }
    out.sort();
    out.dedup();
    out
}

fn push_unique(v: &mut Vec<String>, s: &str) {
    if !v.iter().any(|x| x == s) {
        v.push(s.into());
    }
}

fn pick<'a>(rng: &mut ChaCha8Rng, words: &[&'a str]) -> &'a str {
    words[rng.random_range(0..words.len())]
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

const MONTH_NAMES: [&str; 12] = [
    "January",
    "February",
    "March",
    "April",
    "May",
    "June",
    "July",
    "August",
    "September",
    "October",
    "November",
    "December",
];

/// How prose would write a value: dates spelled out, large integers with
/// thousands separators.
fn surface_form(lit: &Literal) -> String {
    match lit {
        Literal::Date(d) => format!(
            "{} {}, {}",
            MONTH_NAMES[usize::from(d.month()) - 1],
            d.day(),
            d.year()
        ),
        Literal::Integer(i) if i.unsigned_abs() >= 10_000 => {
            let digits = i.unsigned_abs().to_string();
            let mut out = String::new();
            for (n, ch) in digits.chars().enumerate() {
                if n > 0 && (digits.len() - n) % 3 == 0 {
                    out.push(',');
                }
                out.push(ch);
            }
            if *i < 0 {
                format!("-{out}")
            } else {
                out
            }
        }
        other => other.canonical(),
    }
}
