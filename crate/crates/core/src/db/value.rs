use alloc::string::{String, ToString};
use core::cmp::Ordering;
use core::fmt;

use serde::{Deserialize, Serialize};

/// Column data types.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataType {
    Text,
    Integer,
    Real,
    Date,
}

impl DataType {
    pub const ALL: [DataType; 4] = [
        DataType::Text,
        DataType::Integer,
        DataType::Real,
        DataType::Date,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DataType::Text => "text",
            DataType::Integer => "integer",
            DataType::Real => "real",
            DataType::Date => "date",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "text" | "string" | "str" | "varchar" => Some(DataType::Text),
            "integer" | "int" | "bigint" => Some(DataType::Integer),
            "real" | "float" | "double" | "number" => Some(DataType::Real),
            "date" => Some(DataType::Date),
            _ => None,
        }
    }

    pub fn is_numeric(self) -> bool {
        matches!(self, DataType::Integer | DataType::Real)
    }
}

impl fmt::Display for DataType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A proleptic Gregorian calendar date, years 0..=9999.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Date {
    year: u16,
    month: u8,
    day: u8,
}

impl Date {
    pub fn new(year: u16, month: u8, day: u8) -> Option<Self> {
        if year > 9999 || !(1..=12).contains(&month) || day == 0 || day > days_in_month(year, month)
        {
            return None;
        }
        Some(Self { year, month, day })
    }

    /// Parses the `YYYY-MM-DD` form only.
    pub fn parse_iso(s: &str) -> Option<Self> {
        let b = s.as_bytes();
        if b.len() != 10 || b[4] != b'-' || b[7] != b'-' {
            return None;
        }
        let digits = |r: core::ops::Range<usize>| -> Option<u32> {
            let mut v = 0u32;
            for &c in &b[r] {
                if !c.is_ascii_digit() {
                    return None;
                }
                v = v * 10 + u32::from(c - b'0');
            }
            Some(v)
        };
        Date::new(
            digits(0..4)? as u16,
            digits(5..7)? as u8,
            digits(8..10)? as u8,
        )
    }

    pub fn year(self) -> u16 {
        self.year
    }

    pub fn month(self) -> u8 {
        self.month
    }

    pub fn day(self) -> u8 {
        self.day
    }

    /// Days since 0000-03-01; only used for ordering arithmetic.
    pub fn to_day_number(self) -> i64 {
        let (y, m) = if self.month <= 2 {
            (i64::from(self.year) - 1, i64::from(self.month) + 12)
        } else {
            (i64::from(self.year), i64::from(self.month))
        };
        365 * y + y.div_euclid(4) - y.div_euclid(100)
            + y.div_euclid(400)
            + (153 * (m - 3) + 2) / 5
            + i64::from(self.day)
            - 1
    }

    pub fn from_day_number(n: i64) -> Option<Self> {
        // civil-from-days on the 0000-03-01 epoch
        let era = n.div_euclid(146_097);
        let doe = n.rem_euclid(146_097);
        let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
        let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
        let mp = (5 * doy + 2) / 153;
        let day = doy - (153 * mp + 2) / 5 + 1;
        let month = if mp < 10 { mp + 3 } else { mp - 9 };
        let year = era * 400 + yoe + i64::from(month <= 2);
        if !(0..=9999).contains(&year) {
            return None;
        }
        Date::new(year as u16, month as u8, day as u8)
    }

    pub fn add_days(self, days: i64) -> Option<Self> {
        Date::from_day_number(self.to_day_number() + days)
    }
}

pub(crate) fn is_leap(year: u16) -> bool {
    (year.is_multiple_of(4) && !year.is_multiple_of(100)) || year.is_multiple_of(400)
}

pub(crate) fn days_in_month(year: u16, month: u8) -> u8 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 if is_leap(year) => 29,
        2 => 28,
        _ => 0,
    }
}

impl fmt::Display for Date {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}-{:02}", self.year, self.month, self.day)
    }
}

/// A non-NULL cell value in canonical form.
///
/// Text is stored trimmed, reals are finite with `-0.0` folded into `0.0`.
/// Use the constructors rather than the variants when building values from
/// untrusted input.
#[derive(Clone, Debug)]
pub enum Literal {
    Text(String),
    Integer(i64),
    Real(f64),
    Date(Date),
}

impl Literal {
    pub fn text(s: impl AsRef<str>) -> Self {
        Literal::Text(s.as_ref().trim().to_string())
    }

    pub fn real(v: f64) -> Option<Self> {
        if !v.is_finite() {
            return None;
        }
        Some(Literal::Real(if v == 0.0 { 0.0 } else { v }))
    }

    pub fn dtype(&self) -> DataType {
        match self {
            Literal::Text(_) => DataType::Text,
            Literal::Integer(_) => DataType::Integer,
            Literal::Real(_) => DataType::Real,
            Literal::Date(_) => DataType::Date,
        }
    }

    pub fn conforms(&self, dtype: DataType) -> bool {
        match self {
            Literal::Text(s) => dtype == DataType::Text && s.trim().len() == s.len(),
            Literal::Real(v) => dtype == DataType::Real && v.is_finite(),
            other => other.dtype() == dtype,
        }
    }

    /// Canonical textual form used by diffs and exact-match scoring.
    pub fn canonical(&self) -> String {
        self.to_string()
    }

    /// Strict parse of a canonical rendering into `dtype`.
    pub fn parse_as(s: &str, dtype: DataType) -> Option<Self> {
        let s = s.trim();
        match dtype {
            DataType::Text => Some(Literal::text(s)),
            DataType::Integer => s.parse::<i64>().ok().map(Literal::Integer),
            DataType::Real => s.parse::<f64>().ok().and_then(Literal::real),
            DataType::Date => Date::parse_iso(s).map(Literal::Date),
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Literal::Text(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_integer(&self) -> Option<i64> {
        match self {
            Literal::Integer(i) => Some(*i),
            _ => None,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Literal::Text(_) => 0,
            Literal::Integer(_) => 1,
            Literal::Real(_) => 2,
            Literal::Date(_) => 3,
        }
    }

    fn real_bits(v: f64) -> u64 {
        if v == 0.0 {
            0
        } else {
            v.to_bits()
        }
    }
}

impl PartialEq for Literal {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Literal::Text(a), Literal::Text(b)) => a == b,
            (Literal::Integer(a), Literal::Integer(b)) => a == b,
            (Literal::Real(a), Literal::Real(b)) => {
                Literal::real_bits(*a) == Literal::real_bits(*b)
            }
            (Literal::Date(a), Literal::Date(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Literal {}

impl PartialOrd for Literal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Literal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Literal::Text(a), Literal::Text(b)) => a.cmp(b),
            (Literal::Integer(a), Literal::Integer(b)) => a.cmp(b),
            (Literal::Real(a), Literal::Real(b)) => {
                let (a, b) = (
                    if *a == 0.0 { 0.0 } else { *a },
                    if *b == 0.0 { 0.0 } else { *b },
                );
                a.total_cmp(&b)
            }
            (Literal::Date(a), Literal::Date(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl core::hash::Hash for Literal {
    fn hash<H: core::hash::Hasher>(&self, state: &mut H) {
        self.rank().hash(state);
        match self {
            Literal::Text(s) => s.hash(state),
            Literal::Integer(i) => i.hash(state),
            Literal::Real(v) => Literal::real_bits(*v).hash(state),
            Literal::Date(d) => d.hash(state),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Text(s) => f.write_str(s),
            Literal::Integer(i) => write!(f, "{i}"),
            Literal::Real(v) => write!(f, "{}", if *v == 0.0 { 0.0 } else { *v }),
            Literal::Date(d) => write!(f, "{d}"),
        }
    }
}

impl From<i64> for Literal {
    fn from(v: i64) -> Self {
        Literal::Integer(v)
    }
}

impl From<&str> for Literal {
    fn from(v: &str) -> Self {
        Literal::text(v)
    }
}

impl From<Date> for Literal {
    fn from(v: Date) -> Self {
        Literal::Date(v)
    }
}

impl Serialize for Literal {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Literal::Text(s) => serializer.serialize_str(s),
            Literal::Integer(i) => serializer.serialize_i64(*i),
            Literal::Real(v) => serializer.serialize_f64(*v),
            Literal::Date(d) => serializer.collect_str(d),
        }
    }
}

/// Untyped deserialization: numbers become integers or reals, strings that
/// look like ISO dates stay text. Typed decoding against a column goes
/// through [`Literal::parse_as`].
impl<'de> Deserialize<'de> for Literal {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct V;
        impl serde::de::Visitor<'_> for V {
            type Value = Literal;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a string or number")
            }
            fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<Literal, E> {
                Ok(Literal::text(v))
            }
            fn visit_i64<E: serde::de::Error>(self, v: i64) -> Result<Literal, E> {
                Ok(Literal::Integer(v))
            }
            fn visit_u64<E: serde::de::Error>(self, v: u64) -> Result<Literal, E> {
                i64::try_from(v)
                    .map(Literal::Integer)
                    .map_err(|_| E::custom("integer out of range"))
            }
            fn visit_f64<E: serde::de::Error>(self, v: f64) -> Result<Literal, E> {
                Literal::real(v).ok_or_else(|| E::custom("non-finite real"))
            }
        }
        deserializer.deserialize_any(V)
    }
}
