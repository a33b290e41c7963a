//! Format mining: the common character-class shape of a column's values.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::{self, Write};

use serde::{Serialize, Serializer};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Segment {
    /// A run of ASCII digits.
    Digits { min: usize, max: usize },
    /// A run of letters.
    Alpha { min: usize, max: usize },
    /// A run of spaces.
    Space { min: usize, max: usize },
    /// One literal character.
    Literal(char),
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Class {
    Digit,
    Alpha,
    Space,
    Other(char),
}

fn class(c: char) -> Class {
    if c.is_ascii_digit() {
        Class::Digit
    } else if c.is_alphabetic() {
        Class::Alpha
    } else if c == ' ' {
        Class::Space
    } else {
        Class::Other(c)
    }
}

fn shape(s: &str) -> Vec<(Class, usize)> {
    let mut out: Vec<(Class, usize)> = Vec::new();
    for c in s.chars() {
        let k = class(c);
        match out.last_mut() {
            Some((last, n)) if *last == k && !matches!(k, Class::Other(_)) => *n += 1,
            _ => out.push((k, 1)),
        }
    }
    out
}

/// A sequence of segments every value of a column fits, e.g.
/// `[0-9]{4}-[0-9]{2}-[0-9]{2}` for ISO dates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    pub segments: Vec<Segment>,
}

impl Pattern {
    /// The tightest pattern matching every value, or `None` when the
    /// values do not share one shape (or there are none).
    pub fn mine<'a>(values: impl IntoIterator<Item = &'a str>) -> Option<Pattern> {
        let mut segs: Option<Vec<Segment>> = None;
        for v in values {
            let sh = shape(v);
            match &mut segs {
                None => {
                    segs = Some(
                        sh.iter()
                            .map(|&(k, n)| match k {
                                Class::Digit => Segment::Digits { min: n, max: n },
                                Class::Alpha => Segment::Alpha { min: n, max: n },
                                Class::Space => Segment::Space { min: n, max: n },
                                Class::Other(c) => Segment::Literal(c),
                            })
                            .collect(),
                    )
                }
                Some(cur) => {
                    if cur.len() != sh.len() {
                        return None;
                    }
                    for (seg, &(k, n)) in cur.iter_mut().zip(&sh) {
                        match (seg, k) {
                            (Segment::Digits { min, max }, Class::Digit)
                            | (Segment::Alpha { min, max }, Class::Alpha)
                            | (Segment::Space { min, max }, Class::Space) => {
                                *min = (*min).min(n);
                                *max = (*max).max(n);
                            }
                            (Segment::Literal(c), Class::Other(d)) if *c == d => {}
                            _ => return None,
                        }
                    }
                }
            }
        }
        segs.filter(|s| !s.is_empty())
            .map(|segments| Pattern { segments })
    }

    pub fn matches(&self, s: &str) -> bool {
        let sh = shape(s);
        sh.len() == self.segments.len()
            && self
                .segments
                .iter()
                .zip(&sh)
                .all(|(seg, &(k, n))| match (seg, k) {
                    (Segment::Digits { min, max }, Class::Digit)
                    | (Segment::Alpha { min, max }, Class::Alpha)
                    | (Segment::Space { min, max }, Class::Space) => (*min..=*max).contains(&n),
                    (Segment::Literal(c), Class::Other(d)) => *c == d,
                    _ => false,
                })
    }
}

fn write_count(f: &mut fmt::Formatter<'_>, min: usize, max: usize) -> fmt::Result {
    match (min, max) {
        (1, 1) => Ok(()),
        (a, b) if a == b => write!(f, "{{{a}}}"),
        (a, b) => write!(f, "{{{a},{b}}}"),
    }
}

/// Regular-expression syntax.
impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for seg in &self.segments {
            match *seg {
                Segment::Digits { min, max } => {
                    f.write_str("[0-9]")?;
                    write_count(f, min, max)?;
                }
                Segment::Alpha { min, max } => {
                    f.write_str("\\p{L}")?;
                    write_count(f, min, max)?;
                }
                Segment::Space { min, max } => {
                    f.write_str(" ")?;
                    write_count(f, min, max)?;
                }
                Segment::Literal(c) => {
                    if c.is_ascii_punctuation() {
                        f.write_char('\\')?;
                        f.write_char(c)?;
                    } else if c.is_control() || c.is_whitespace() {
                        write!(f, "\\x{{{:x}}}", c as u32)?;
                    } else {
                        f.write_char(c)?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl Serialize for Pattern {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut out = String::new();
        let _ = write!(out, "{self}");
        s.serialize_str(&out)
    }
}
