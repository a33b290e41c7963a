use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::{self, Write};

use serde::de::{self, MapAccess, SeqAccess, Visitor};
use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::Kind;
use crate::db::{DataType, Literal};

/// Reference to a primary key that does not exist yet: row `row` of the
/// `proposal`-th emitted proposal. Resolved when proposals are committed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KeyRef {
    pub proposal: u32,
    pub row: u32,
}

/// Runtime value of the plan interpreter and of tool arguments/results.
///
/// In JSON, values map onto the natural JSON types; the database handle is
/// `{"$database": true}` and a pending key is `{"$key": [proposal, row]}`.
#[derive(Clone, Debug, PartialEq, Default)]
pub enum Value {
    #[default]
    Null,
    Text(String),
    Integer(i64),
    Real(f64),
    List(Vec<Value>),
    Record(BTreeMap<String, Value>),
    Database,
    Key(KeyRef),
}

impl Value {
    pub fn kind(&self) -> Kind {
        match self {
            Value::Null => Kind::Null,
            Value::Text(_) => Kind::Text,
            Value::Integer(_) => Kind::Integer,
            Value::Real(_) => Kind::Real,
            Value::List(_) => Kind::List,
            Value::Record(_) => Kind::Record,
            Value::Database => Kind::DatabaseHandle,
            // a pending key stands in for a key value
            Value::Key(_) => Kind::Integer,
        }
    }

    pub fn text(s: impl Into<String>) -> Self {
        Value::Text(s.into())
    }

    pub fn texts<S: AsRef<str>>(items: impl IntoIterator<Item = S>) -> Self {
        Value::List(
            items
                .into_iter()
                .map(|s| Value::Text(s.as_ref().to_string()))
                .collect(),
        )
    }

    pub fn record<K: Into<String>>(fields: impl IntoIterator<Item = (K, Value)>) -> Self {
        Value::Record(fields.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Value]> {
        match self {
            Value::List(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_record(&self) -> Option<&BTreeMap<String, Value>> {
        match self {
            Value::Record(m) => Some(m),
            _ => None,
        }
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.as_record().and_then(|m| m.get(key))
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    /// Converts a scalar to a literal of `dtype` without reformatting:
    /// text must already be in canonical form for dates and numbers.
    pub fn to_literal(&self, dtype: DataType) -> Option<Literal> {
        match (self, dtype) {
            (Value::Text(s), _) => Literal::parse_as(s, dtype),
            (Value::Integer(i), DataType::Integer) => Some(Literal::Integer(*i)),
            (Value::Integer(i), DataType::Real) => Literal::real(*i as f64),
            (Value::Integer(i), DataType::Text) => Some(Literal::text(i.to_string())),
            (Value::Real(r), DataType::Real) => Literal::real(*r),
            (Value::Real(r), DataType::Integer) => {
                let i = *r as i64;
                (i as f64 == *r).then_some(Literal::Integer(i))
            }
            (Value::Real(r), DataType::Text) => {
                Literal::real(*r).map(|l| Literal::text(l.canonical()))
            }
            _ => None,
        }
    }

    /// Deterministic compact JSON with record keys sorted.
    pub fn canonical_json(&self) -> String {
        let mut out = String::new();
        self.write_json(&mut out);
        out
    }

    fn write_json(&self, out: &mut String) {
        match self {
            Value::Null => out.push_str("null"),
            Value::Text(s) => write_json_string(out, s),
            Value::Integer(i) => {
                let _ = write!(out, "{i}");
            }
            Value::Real(r) if r.is_finite() => {
                let _ = write!(out, "{r:?}");
            }
            Value::Real(_) => out.push_str("null"),
            Value::List(items) => {
                out.push('[');
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    v.write_json(out);
                }
                out.push(']');
            }
            Value::Record(m) => {
                out.push('{');
                for (i, (k, v)) in m.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    write_json_string(out, k);
                    out.push(':');
                    v.write_json(out);
                }
                out.push('}');
            }
            Value::Database => out.push_str("{\"$database\":true}"),
            Value::Key(k) => {
                let _ = write!(out, "{{\"$key\":[{},{}]}}", k.proposal, k.row);
            }
        }
    }
}

pub(crate) fn write_json_string(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_json())
    }
}

impl From<&Literal> for Value {
    fn from(l: &Literal) -> Self {
        match l {
            Literal::Text(s) => Value::Text(s.clone()),
            Literal::Integer(i) => Value::Integer(*i),
            Literal::Real(r) => Value::Real(*r),
            Literal::Date(d) => Value::Text(d.to_string()),
        }
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.into())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Text(s)
    }
}

impl From<i64> for Value {
    fn from(i: i64) -> Self {
        Value::Integer(i)
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Null => s.serialize_unit(),
            Value::Text(t) => s.serialize_str(t),
            Value::Integer(i) => s.serialize_i64(*i),
            Value::Real(r) if r.is_finite() => s.serialize_f64(*r),
            Value::Real(_) => s.serialize_unit(),
            Value::List(items) => {
                let mut seq = s.serialize_seq(Some(items.len()))?;
                for v in items {
                    seq.serialize_element(v)?;
                }
                seq.end()
            }
            Value::Record(m) => {
                let mut map = s.serialize_map(Some(m.len()))?;
                for (k, v) in m {
                    map.serialize_entry(k, v)?;
                }
                map.end()
            }
            Value::Database => {
                let mut map = s.serialize_map(Some(1))?;
                map.serialize_entry("$database", &true)?;
                map.end()
            }
            Value::Key(k) => {
                let mut map = s.serialize_map(Some(1))?;
                map.serialize_entry("$key", &[k.proposal, k.row])?;
                map.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Value;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a JSON value")
            }

            fn visit_unit<E>(self) -> Result<Value, E> {
                Ok(Value::Null)
            }

            fn visit_none<E>(self) -> Result<Value, E> {
                Ok(Value::Null)
            }

            fn visit_some<D2: Deserializer<'de>>(self, d: D2) -> Result<Value, D2::Error> {
                Value::deserialize(d)
            }

            fn visit_bool<E>(self, b: bool) -> Result<Value, E> {
                Ok(Value::Text(if b { "true" } else { "false" }.into()))
            }

            fn visit_i64<E>(self, i: i64) -> Result<Value, E> {
                Ok(Value::Integer(i))
            }

            fn visit_u64<E: de::Error>(self, u: u64) -> Result<Value, E> {
                i64::try_from(u)
                    .map(Value::Integer)
                    .or(Ok(Value::Real(u as f64)))
            }

            fn visit_f64<E>(self, r: f64) -> Result<Value, E> {
                Ok(Value::Real(r))
            }

            fn visit_str<E>(self, s: &str) -> Result<Value, E> {
                Ok(Value::Text(s.into()))
            }

            fn visit_string<E>(self, s: String) -> Result<Value, E> {
                Ok(Value::Text(s))
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Value, A::Error> {
                let mut out = Vec::new();
                while let Some(v) = seq.next_element()? {
                    out.push(v);
                }
                Ok(Value::List(out))
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Value, A::Error> {
                let mut out = BTreeMap::new();
                while let Some((k, v)) = map.next_entry::<String, Value>()? {
                    out.insert(k, v);
                }
                if out.len() == 1 {
                    if out.contains_key("$database") {
                        return Ok(Value::Database);
                    }
                    if let Some(Value::List(pair)) = out.get("$key") {
                        if let [Value::Integer(p), Value::Integer(r)] = pair.as_slice() {
                            let (Ok(proposal), Ok(row)) = (u32::try_from(*p), u32::try_from(*r))
                            else {
                                return Err(de::Error::custom("pending key out of range"));
                            };
                            return Ok(Value::Key(KeyRef { proposal, row }));
                        }
                    }
                }
                Ok(Value::Record(out))
            }
        }
        d.deserialize_any(V)
    }
}
