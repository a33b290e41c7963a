//! Reformatting of extracted values to the types and observed formats of
//! their target columns.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::Value;
use crate::db::{ColumnDef, DataType, Date, Literal, Table};

const MONTHS: [&str; 12] = [
    "january",
    "february",
    "march",
    "april",
    "may",
    "june",
    "july",
    "august",
    "september",
    "october",
    "november",
    "december",
];

const WEEKDAYS: [&str; 7] = [
    "monday",
    "tuesday",
    "wednesday",
    "thursday",
    "friday",
    "saturday",
    "sunday",
];

fn month_number(word: &str) -> Option<u8> {
    let w = word.trim_end_matches('.').to_lowercase();
    if w.len() < 3 {
        return None;
    }
    if w == "sept" {
        return Some(9);
    }
    MONTHS
        .iter()
        .position(|m| *m == w || (w.len() == 3 && m.starts_with(w.as_str())))
        .map(|i| i as u8 + 1)
}

fn is_weekday(word: &str) -> bool {
    let w = word.trim_end_matches('.').to_lowercase();
    w.len() >= 3 && WEEKDAYS.iter().any(|d| d.starts_with(w.as_str()))
}

fn day_number(tok: &str) -> Option<u8> {
    let t = tok.to_lowercase();
    let digits = ["st", "nd", "rd", "th"]
        .iter()
        .find_map(|s| t.strip_suffix(s))
        .unwrap_or(&t);
    if digits.is_empty() || digits.len() > 2 || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

fn year_number(tok: &str) -> Option<u16> {
    (tok.len() == 4 && tok.bytes().all(|b| b.is_ascii_digit()))
        .then(|| tok.parse().ok())
        .flatten()
}

/// Parses a calendar date written in a common format: ISO
/// (`2023-07-21`), month names (`July 21, 2023`, `21 Jul 2023`),
/// numeric with slashes (`07/21/2023`, month first unless the first field
/// exceeds 12) or dots (`21.07.2023`, day first).
pub fn parse_date(s: &str) -> Option<Date> {
    let s = s.trim();
    if let Some(d) = Date::parse_iso(s) {
        return Some(d);
    }
    let dotted = s.contains('.') && !s.chars().any(char::is_alphabetic);
    let toks: Vec<&str> = s
        .split(|c: char| c.is_whitespace() || matches!(c, ',' | '/' | '-') || (dotted && c == '.'))
        .filter(|t| !t.is_empty())
        .filter(|t| !is_weekday(t))
        .collect();
    if toks.len() != 3 {
        return None;
    }
    let (y, m, d) = if let Some(y) = year_number(toks[0]) {
        match month_number(toks[1]) {
            Some(m) => (y, m, day_number(toks[2])?),
            None => (y, day_number(toks[1])?, day_number(toks[2])?),
        }
    } else {
        let y = year_number(toks[2])?;
        match (month_number(toks[0]), month_number(toks[1])) {
            (Some(m), _) => (y, m, day_number(toks[1])?),
            (None, Some(m)) => (y, m, day_number(toks[0])?),
            (None, None) => {
                let a = day_number(toks[0])?;
                let b = day_number(toks[1])?;
                if dotted || a > 12 {
                    (y, b, a)
                } else {
                    (y, a, b)
                }
            }
        }
    };
    Date::new(y, m, d)
}

/// A number parsed from free text.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Number {
    Integer(i64),
    Real(f64),
}

impl Number {
    fn as_f64(self) -> f64 {
        match self {
            Number::Integer(i) => i as f64,
            Number::Real(r) => r,
        }
    }

    fn from_f64(v: f64) -> Option<Number> {
        if !v.is_finite() {
            return None;
        }
        let i = v as i64;
        Some(if i as f64 == v && v.abs() < 9.0e15 {
            Number::Integer(i)
        } else {
            Number::Real(v)
        })
    }
}

const MULTIPLIERS: [(&str, u32); 10] = [
    ("thousand", 3),
    ("k", 3),
    ("million", 6),
    ("mil", 6),
    ("mn", 6),
    ("m", 6),
    ("billion", 9),
    ("bn", 9),
    ("b", 9),
    ("trillion", 12),
];

/// Parses amounts such as `1,250`, `$10 million`, `15M`, `USD 2.5bn`
/// or `-3.75`.
pub fn parse_number(s: &str) -> Option<Number> {
    let mut t = s.trim().to_lowercase();
    for cur in ["usd", "eur", "gbp", "us$", "$", "€", "£", "¥"] {
        if let Some(rest) = t.strip_prefix(cur) {
            t = rest.trim_start().to_string();
        }
        if let Some(rest) = t.strip_suffix(cur) {
            t = rest.trim_end().to_string();
        }
    }
    let t = t.replace(',', "");
    let end = t
        .char_indices()
        .find(|&(i, c)| !(c.is_ascii_digit() || c == '.' || (i == 0 && (c == '-' || c == '+'))))
        .map_or(t.len(), |(i, _)| i);
    let (num, rest) = t.split_at(end);
    if num.is_empty() || num == "-" || num == "+" || !num.bytes().any(|b| b.is_ascii_digit()) {
        return None;
    }
    let rest = rest.trim();
    let exp = if rest.is_empty() {
        0
    } else {
        MULTIPLIERS
            .iter()
            .find(|(w, _)| *w == rest)
            .map(|(_, e)| *e)?
    };
    if exp == 0 && !num.contains('.') {
        return num.parse::<i64>().ok().map(Number::Integer);
    }
    // scale in decimal so that `256.1 million` is exact
    let v: f64 = format!("{}e{exp}", num.trim_end_matches('.'))
        .parse()
        .ok()?;
    Number::from_f64(v)
}

/// How a text column writes amounts, when all its values agree.
#[derive(Clone, Copy, Debug, PartialEq)]
enum TextStyle {
    Free,
    /// `15M`, `2.5B`, `300K`
    SuffixedAmount,
}

fn is_suffixed_amount(s: &str) -> bool {
    let Some(last) = s.chars().last() else {
        return false;
    };
    let body = &s[..s.len() - last.len_utf8()];
    matches!(last, 'K' | 'M' | 'B')
        && !body.is_empty()
        && body.bytes().all(|b| b.is_ascii_digit() || b == b'.')
        && body.bytes().filter(|&b| b == b'.').count() <= 1
        && body.as_bytes()[0].is_ascii_digit()
        && !body.ends_with('.')
}

fn column_style(table: &Table, ci: usize) -> TextStyle {
    let mut any = false;
    for row in table.rows() {
        match &row[ci] {
            Some(Literal::Text(s)) if is_suffixed_amount(s) => any = true,
            Some(_) => return TextStyle::Free,
            None => {}
        }
    }
    if any {
        TextStyle::SuffixedAmount
    } else {
        TextStyle::Free
    }
}

fn format_suffixed(v: f64) -> Option<String> {
    if !(v > 0.0) {
        return None;
    }
    let (unit, suffix) = if v >= 1e9 {
        (1e9, 'B')
    } else if v >= 1e6 {
        (1e6, 'M')
    } else if v >= 1e3 {
        (1e3, 'K')
    } else {
        return None;
    };
    let scaled = v / unit;
    // keep at most three decimals
    let milli = (scaled * 1000.0 + 0.5) as i64;
    let (whole, frac) = (milli / 1000, milli % 1000);
    let mut s = format!("{whole}");
    if frac != 0 {
        let f = format!("{frac:03}");
        s.push('.');
        s.push_str(f.trim_end_matches('0'));
    }
    s.push(suffix);
    Some(s)
}

/// Reformats one value for `column` of `table`. Returns `Err` with the
/// untouched value when it cannot be brought into shape.
pub fn normalize_value(value: &Value, column: &ColumnDef, table: &Table) -> Result<Value, Value> {
    let fail = || Err(value.clone());
    match (value, column.dtype) {
        (Value::Null, _) => Ok(Value::Null),
        (Value::Text(s), DataType::Date) => parse_date(s)
            .map(|d| Value::Text(d.to_string()))
            .ok_or_else(|| value.clone()),
        (Value::Text(s), DataType::Integer) => match parse_number(s) {
            Some(Number::Integer(i)) => Ok(Value::Integer(i)),
            _ => fail(),
        },
        (Value::Text(s), DataType::Real) => match parse_number(s) {
            Some(n) => Ok(Value::Real(n.as_f64())),
            None => fail(),
        },
        (Value::Integer(_), DataType::Integer) | (Value::Real(_), DataType::Real) => {
            Ok(value.clone())
        }
        (Value::Integer(i), DataType::Real) => Ok(Value::Real(*i as f64)),
        (Value::Real(r), DataType::Integer) => match Number::from_f64(*r) {
            Some(Number::Integer(i)) => Ok(Value::Integer(i)),
            _ => fail(),
        },
        (Value::Text(_) | Value::Integer(_) | Value::Real(_), DataType::Text) => {
            let ci = table.column_index(&column.name).expect("column of table");
            let text = match value {
                Value::Text(s) => s.trim().to_string(),
                Value::Integer(i) => i.to_string(),
                Value::Real(r) => Literal::real(*r).map(|l| l.canonical()).unwrap_or_default(),
                _ => unreachable!(),
            };
            if column_style(table, ci) == TextStyle::SuffixedAmount && !is_suffixed_amount(&text) {
                if let Some(s) = parse_number(&text).and_then(|n| format_suffixed(n.as_f64())) {
                    return Ok(Value::Text(s));
                }
            }
            // adopt the spelling already used in the column
            let lower = text.to_lowercase();
            for row in table.rows() {
                if let Some(Literal::Text(existing)) = &row[ci] {
                    if *existing != text && existing.to_lowercase() == lower {
                        return Ok(Value::Text(existing.clone()));
                    }
                }
            }
            Ok(Value::Text(text))
        }
        (Value::Key(_), _) => Ok(value.clone()),
        _ => fail(),
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct NormOutcome {
    pub values: Vec<Value>,
    pub warnings: Vec<String>,
}

/// Normalizes every field of every record entry that names a column of
/// `table`. Other fields and non-record entries pass through unchanged.
pub fn normalize_entries(entries: &[Value], table: &Table) -> NormOutcome {
    let mut out = NormOutcome::default();
    for e in entries {
        let Value::Record(fields) = e else {
            out.values.push(e.clone());
            continue;
        };
        let mut norm = BTreeMap::new();
        for (k, v) in fields {
            let nv = match table.column(k) {
                Some(col) => match normalize_value(v, col, table) {
                    Ok(nv) => nv,
                    Err(orig) => {
                        out.warnings.push(format!(
                            "{}.{}: could not normalize {} to {}",
                            table.name(),
                            k,
                            orig.canonical_json(),
                            col.dtype
                        ));
                        orig
                    }
                },
                None => v.clone(),
            };
            norm.insert(k.clone(), nv);
        }
        out.values.push(Value::Record(norm));
    }
    out
}
