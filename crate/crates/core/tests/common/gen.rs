//! Seeded random databases, mutations, corruptions and plans, with the
//! brute-force oracles they are checked against.

use std::collections::BTreeSet;

use opal_core::db::{ColumnDef, DataType, Database, Date, DiffTuple, Literal, Row, Table};
use opal_core::plan::{Expr, ExprNode, PlanProgram, Spanned, Statement, StmtNode, ToolCall};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const TABLE_NAMES: [&str; 8] = [
    "Movie",
    "Actor",
    "Character",
    "Team",
    "Player",
    "City",
    "Country",
    "Book",
];
const ATTR_NAMES: [&str; 8] = [
    "Title",
    "Name",
    "Budget",
    "Release",
    "Score",
    "Note",
    "Place of birth",
    "Année",
];
const TEXT_PIECES: [&str; 18] = [
    "Heat",
    "Al Pacino",
    "O'Brien",
    "say \"hi\"",
    "back\\slash",
    "naïve",
    "Zürich",
    "東京",
    "🎬",
    "a\tb",
    "multi\nline",
    "",
    " padded ",
    "{\"json\": 1}",
    ",",
    "null",
    "15M",
    "1995-12-15",
];
const DTYPES: [DataType; 4] = [
    DataType::Text,
    DataType::Integer,
    DataType::Real,
    DataType::Date,
];

pub fn random_text(rng: &mut impl Rng) -> String {
    let n = rng.random_range(1..=3);
    let s: String = (0..n)
        .map(|_| *TEXT_PIECES.choose(rng).unwrap())
        .collect::<Vec<_>>()
        .join(" ");
    s.trim().to_string()
}

pub fn random_real(rng: &mut impl Rng) -> f64 {
    loop {
        let v = match rng.random_range(0..3) {
            0 => f64::from_bits(rng.random()),
            1 => rng.random_range(-1e6..1e6),
            _ => rng.random_range(-400..400) as f64 / 4.0,
        };
        if v.is_finite() {
            return v;
        }
    }
}

pub fn random_integer(rng: &mut impl Rng) -> i64 {
    match rng.random_range(0..4) {
        0 => rng.random(),
        1 => *[i64::MIN, i64::MAX, 0, -1].choose(rng).unwrap(),
        2 => rng.random_range(-1000..1000),
        _ => rng.random_range(1..200),
    }
}

pub fn random_date(rng: &mut impl Rng) -> Date {
    loop {
        if let Some(d) = Date::new(
            rng.random_range(1000..3000),
            rng.random_range(1..=12),
            rng.random_range(1..=31),
        ) {
            return d;
        }
    }
}

pub fn random_literal(rng: &mut impl Rng, dtype: DataType) -> Literal {
    match dtype {
        DataType::Text => Literal::text(random_text(rng)),
        DataType::Integer => Literal::Integer(random_integer(rng)),
        DataType::Real => Literal::real(random_real(rng)).unwrap(),
        DataType::Date => Literal::Date(random_date(rng)),
    }
}

fn fresh_key(rng: &mut impl Rng, dtype: DataType, taken: &BTreeSet<Literal>) -> Literal {
    loop {
        let k = random_literal(rng, dtype);
        if !taken.contains(&k) {
            return k;
        }
    }
}

/// One to three tables with foreign-key chains, every column type,
/// nullable and non-nullable columns and defaults. Always valid.
pub fn random_database(rng: &mut impl Rng) -> Database {
    let mut names = TABLE_NAMES.to_vec();
    names.shuffle(rng);
    let n = rng.random_range(1..=3);
    let mut tables: Vec<Table> = Vec::new();
    for name in &names[..n] {
        let pk_type = *[
            DataType::Integer,
            DataType::Integer,
            DataType::Text,
            DataType::Date,
        ]
        .choose(rng)
        .unwrap();
        let mut cols = vec![ColumnDef::new(format!("{name}ID"), pk_type).primary_key()];
        for p in &tables {
            if rng.random_bool(0.6) {
                let mut c = ColumnDef::new(format!("{}Ref", p.name()), p.pk_column().dtype)
                    .references(p.name(), p.pk_column().name.clone());
                if !p.rows().is_empty() && rng.random_bool(0.3) {
                    c = c.not_null();
                }
                cols.push(c);
            }
        }
        let mut attrs = ATTR_NAMES.to_vec();
        attrs.shuffle(rng);
        for a in &attrs[..rng.random_range(1..=4)] {
            let dt = *DTYPES.choose(rng).unwrap();
            let mut c = ColumnDef::new(*a, dt);
            if rng.random_bool(0.25) {
                c = c.with_default(random_literal(rng, dt));
            }
            if rng.random_bool(0.25) {
                c = c.not_null();
            }
            cols.push(c);
        }
        let mut keys = BTreeSet::new();
        let mut rows: Vec<Row> = Vec::new();
        for _ in 0..rng.random_range(0..=6) {
            let mut row = Row::new();
            for c in &cols {
                let cell = if c.is_primary_key {
                    let k = fresh_key(rng, c.dtype, &keys);
                    keys.insert(k.clone());
                    Some(k)
                } else if let Some(fk) = &c.foreign_key {
                    let parent = tables.iter().find(|t| t.name() == fk.table).unwrap();
                    let pks: Vec<&Literal> = parent
                        .rows()
                        .iter()
                        .filter_map(|r| r[parent.pk_index()].as_ref())
                        .collect();
                    if pks.is_empty() || (c.nullable && rng.random_bool(0.3)) {
                        None
                    } else {
                        Some((*pks.choose(rng).unwrap()).clone())
                    }
                } else if c.nullable && rng.random_bool(0.3) {
                    None
                } else {
                    Some(random_literal(rng, c.dtype))
                };
                row.push(cell);
            }
            rows.push(row);
        }
        tables.push(Table::new(*name, cols, rows).unwrap());
    }
    Database::validated(tables).unwrap()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    Infill,
    InsertRow,
    AddColumn,
}

pub const MUTATIONS: [Mutation; 3] = [Mutation::Infill, Mutation::InsertRow, Mutation::AddColumn];

fn value_for(rng: &mut impl Rng, db: &Database, c: &ColumnDef) -> Literal {
    if let Some(fk) = &c.foreign_key {
        let keys: Vec<Literal> = db.primary_keys(&fk.table).into_iter().collect();
        if let Some(k) = keys.choose(rng) {
            return k.clone();
        }
    }
    random_literal(rng, c.dtype)
}

/// `db` after one change of the given kind, made without any checks.
pub fn mutate(rng: &mut impl Rng, db: &Database, kind: Mutation) -> Database {
    let names: Vec<String> = db.table_names().map(String::from).collect();
    match kind {
        Mutation::Infill => {
            let mut holes = Vec::new();
            for t in db.tables() {
                for (ri, r) in t.rows().iter().enumerate() {
                    for (ci, cell) in r.iter().enumerate() {
                        if cell.is_none() && !t.columns()[ci].is_primary_key {
                            holes.push((t.name().to_string(), ri, ci));
                        }
                    }
                }
            }
            holes.shuffle(rng);
            let mut out = db.clone();
            for (t, ri, ci) in holes.into_iter().take(rng.random_range(1..=4)) {
                let col = db.table(&t).unwrap().columns()[ci].clone();
                let v = value_for(rng, db, &col);
                out = out.with_cell_unchecked(&t, ri, ci, Some(v));
            }
            out
        }
        Mutation::InsertRow => {
            let t = db.table(names.choose(rng).unwrap()).unwrap();
            let mut out = db.clone();
            for _ in 0..rng.random_range(1..=3) {
                let keys = out.primary_keys(t.name());
                let row: Row = t
                    .columns()
                    .iter()
                    .map(|c| {
                        if c.is_primary_key {
                            Some(fresh_key(rng, c.dtype, &keys))
                        } else if rng.random_bool(0.25) {
                            None
                        } else {
                            Some(value_for(rng, db, c))
                        }
                    })
                    .collect();
                out = out.with_row_unchecked(t.name(), row);
            }
            out
        }
        Mutation::AddColumn => {
            let t = db.table(names.choose(rng).unwrap()).unwrap();
            let mut out = db.clone();
            for k in 0..rng.random_range(1..=2) {
                let dt = *DTYPES.choose(rng).unwrap();
                let ci = out.table(t.name()).unwrap().columns().len();
                out = out.with_column_unchecked(
                    t.name(),
                    ColumnDef::new(format!("Extra {k}"), dt),
                    None,
                );
                for ri in 0..t.rows().len() {
                    if rng.random_bool(0.6) {
                        out = out.with_cell_unchecked(
                            t.name(),
                            ri,
                            ci,
                            Some(random_literal(rng, dt)),
                        );
                    }
                }
            }
            out
        }
    }
}

fn same(a: &Literal, b: &Literal) -> bool {
    a.dtype() == b.dtype() && a.to_string() == b.to_string()
}

/// Cell-by-cell diff: every non-NULL cell of `after` whose row (found by a
/// linear scan on the key) or column is new, or whose value differs.
pub fn brute_force_diff(before: &Database, after: &Database) -> BTreeSet<DiffTuple> {
    let mut out = BTreeSet::new();
    for at in after.tables() {
        let apk = at.columns().iter().position(|c| c.is_primary_key).unwrap();
        let bt = before.tables().find(|t| t.name() == at.name());
        for row in at.rows() {
            let Some(key) = &row[apk] else { continue };
            for (ci, col) in at.columns().iter().enumerate() {
                let Some(v) = &row[ci] else { continue };
                let old = bt.and_then(|bt| {
                    let bpk = bt.columns().iter().position(|c| c.is_primary_key).unwrap();
                    let bci = bt.columns().iter().position(|c| c.name == col.name)?;
                    let brow = bt
                        .rows()
                        .iter()
                        .find(|r| r[bpk].as_ref().is_some_and(|k| same(k, key)))?;
                    brow[bci].as_ref()
                });
                if !old.is_some_and(|o| same(o, v)) {
                    out.insert(DiffTuple {
                        table: at.name().to_string(),
                        pk_column: at.columns()[apk].name.clone(),
                        pk_value: key.to_string(),
                        column: col.name.clone(),
                        value: v.to_string(),
                    });
                }
            }
        }
    }
    out
}

/// `db` with one to three constraint breaks written straight into cells.
pub fn corrupt(rng: &mut impl Rng, db: &Database) -> Database {
    let mut out = db.clone();
    for _ in 0..rng.random_range(1..=3) {
        let names: Vec<String> = out.table_names().map(String::from).collect();
        let t = out.table(names.choose(rng).unwrap()).unwrap().clone();
        if t.rows().is_empty() {
            let row = t
                .columns()
                .iter()
                .map(|c| Some(random_literal(rng, c.dtype)))
                .collect();
            out = out.with_row_unchecked(t.name(), row);
            continue;
        }
        let ri = rng.random_range(0..t.rows().len());
        let ci = rng.random_range(0..t.columns().len());
        let col = &t.columns()[ci];
        out = match rng.random_range(0..6) {
            0 => out.with_cell_unchecked(t.name(), ri, t.pk_index(), None),
            1 => out.with_row_unchecked(t.name(), t.rows()[ri].clone()),
            2 => match t
                .foreign_keys()
                .map(|(c, _)| c.clone())
                .collect::<Vec<_>>()
                .choose(rng)
            {
                Some(fc) => {
                    let keys = out.primary_keys(&fc.foreign_key.as_ref().unwrap().table);
                    let k = fresh_key(rng, fc.dtype, &keys);
                    out.with_cell_unchecked(
                        t.name(),
                        ri,
                        t.column_index(&fc.name).unwrap(),
                        Some(k),
                    )
                }
                None => out.with_cell_unchecked(t.name(), ri, ci, None),
            },
            3 => {
                let other = *DTYPES
                    .iter()
                    .filter(|d| **d != col.dtype)
                    .collect::<Vec<_>>()
                    .choose(rng)
                    .unwrap();
                out.with_cell_unchecked(t.name(), ri, ci, Some(random_literal(rng, *other)))
            }
            4 => out.with_cell_unchecked(t.name(), ri, ci, None),
            _ => {
                let bad = match col.dtype {
                    DataType::Text => Literal::Text(format!(" {} ", random_text(rng))),
                    DataType::Real => Literal::Real(
                        *[f64::NAN, f64::INFINITY, f64::NEG_INFINITY]
                            .choose(rng)
                            .unwrap(),
                    ),
                    d => random_literal(
                        rng,
                        if d == DataType::Date {
                            DataType::Integer
                        } else {
                            DataType::Date
                        },
                    ),
                };
                out.with_cell_unchecked(t.name(), ri, ci, Some(bad))
            }
        };
    }
    out
}

fn conforms(v: &Literal, dtype: DataType) -> bool {
    match v {
        Literal::Text(s) => dtype == DataType::Text && s.trim() == s,
        Literal::Integer(_) => dtype == DataType::Integer,
        Literal::Real(r) => dtype == DataType::Real && r.is_finite(),
        Literal::Date(_) => dtype == DataType::Date,
    }
}

/// `(table, row, kind, column)` of every constraint break, by direct
/// search over all rows.
pub fn brute_force_integrity(db: &Database) -> Vec<(String, usize, &'static str, String)> {
    let mut out = Vec::new();
    for t in db.tables() {
        let pk = t.columns().iter().position(|c| c.is_primary_key).unwrap();
        for (ri, row) in t.rows().iter().enumerate() {
            for (ci, col) in t.columns().iter().enumerate() {
                let mut push = |kind| out.push((t.name().to_string(), ri, kind, col.name.clone()));
                match &row[ci] {
                    None if col.is_primary_key || !col.nullable => push("null-violation"),
                    None => {}
                    Some(v) => {
                        if !conforms(v, col.dtype) {
                            push("dtype-mismatch");
                        }
                        if let Some(fk) = &col.foreign_key {
                            let parent = db.tables().find(|p| p.name() == fk.table).unwrap();
                            let ppk = parent
                                .columns()
                                .iter()
                                .position(|c| c.name == fk.column)
                                .unwrap();
                            if !parent
                                .rows()
                                .iter()
                                .any(|r| r[ppk].as_ref().is_some_and(|k| same(k, v)))
                            {
                                push("dangling-fk");
                            }
                        }
                    }
                }
            }
            if let Some(k) = &row[pk] {
                if t.rows()[..ri]
                    .iter()
                    .any(|r| r[pk].as_ref().is_some_and(|e| same(e, k)))
                {
                    out.push((
                        t.name().to_string(),
                        ri,
                        "duplicate-pk",
                        t.columns()[pk].name.clone(),
                    ));
                }
            }
        }
    }
    out.sort();
    out
}

const IDENTS: [&str; 10] = [
    "x", "doc", "e1", "info_2", "Budget", "_tmp", "rows3", "p", "AE", "NER",
];
const KEYS: [&str; 10] = [
    "Title",
    "for",
    "in",
    "Place of birth",
    "naïve",
    "a\"b",
    "1st",
    "pk",
    "key",
    "emit",
];

fn spanned<T>(node: T) -> Spanned<T> {
    Spanned::synthetic(node)
}

fn ident(rng: &mut impl Rng) -> Spanned<String> {
    spanned(IDENTS.choose(rng).unwrap().to_string())
}

fn key(rng: &mut impl Rng) -> Spanned<String> {
    if rng.random_bool(0.5) {
        ident(rng)
    } else {
        spanned(KEYS.choose(rng).unwrap().to_string())
    }
}

fn unique_keys(rng: &mut impl Rng, n: usize) -> Vec<Spanned<String>> {
    let mut out: Vec<Spanned<String>> = Vec::new();
    while out.len() < n {
        let k = key(rng);
        if !out.iter().any(|o| o.node == k.node) {
            out.push(k);
        }
    }
    out
}

fn call(rng: &mut impl Rng, depth: u32) -> ToolCall {
    let n = rng.random_range(0..=3);
    let names = unique_keys(rng, n)
        .into_iter()
        .filter(|k| opal_core::plan::is_identifier(&k.node))
        .collect::<Vec<_>>();
    ToolCall {
        tool: ident(rng),
        args: names.into_iter().map(|n| (n, expr(rng, depth))).collect(),
    }
}

pub fn expr(rng: &mut impl Rng, depth: u32) -> ExprNode {
    let leaf = depth == 0 || rng.random_bool(0.4);
    let e = if leaf {
        match rng.random_range(0..4) {
            0 => Expr::Text(random_text(rng)),
            1 => Expr::Integer(random_integer(rng)),
            2 => Expr::Real(random_real(rng)),
            _ => Expr::Var(ident(rng).node),
        }
    } else {
        match rng.random_range(0..4) {
            0 => Expr::List(
                (0..rng.random_range(0..=3))
                    .map(|_| expr(rng, depth - 1))
                    .collect(),
            ),
            1 => {
                let n = rng.random_range(0..=3);
                Expr::Record(
                    unique_keys(rng, n)
                        .into_iter()
                        .map(|k| (k, expr(rng, depth - 1)))
                        .collect(),
                )
            }
            2 => {
                let mut base = expr(rng, depth - 1);
                while matches!(base.node, Expr::Integer(_) | Expr::Real(_)) {
                    base = expr(rng, depth - 1);
                }
                Expr::Field(Box::new(base), key(rng))
            }
            _ => Expr::Call(call(rng, depth - 1)),
        }
    };
    spanned(e)
}

fn stmt(rng: &mut impl Rng, depth: u32) -> StmtNode {
    let s = match rng.random_range(0..if depth == 0 { 3 } else { 4 }) {
        0 => Statement::Let {
            name: ident(rng),
            value: expr(rng, 3),
        },
        1 => Statement::Comment(
            random_text(rng)
                .replace(['\n', '\r'], " ")
                .trim()
                .to_string(),
        ),
        2 => Statement::Emit {
            binding: rng.random_bool(0.3).then(|| ident(rng)),
            call: spanned(Expr::Call(call(rng, 2))),
        },
        _ => Statement::ForEach {
            var: ident(rng),
            iter: expr(rng, 2),
            body: (0..rng.random_range(0..=3))
                .map(|_| stmt(rng, depth - 1))
                .collect(),
        },
    };
    spanned(s)
}

/// A random program over the whole grammar. Numeric literals never take
/// a field access and comments hold no line breaks.
pub fn random_program(rng: &mut impl Rng) -> PlanProgram {
    PlanProgram {
        statements: (0..rng.random_range(0..=6)).map(|_| stmt(rng, 2)).collect(),
    }
}
