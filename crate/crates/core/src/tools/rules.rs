//! Offline extraction heuristics. Deterministic and dependency-free, they
//! favour precision: an entity is only reported when the text names its
//! type next to it.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{list_arg, text_arg, Args, ExtractionBackend, Tool, ToolContext, ToolError, Value};
use crate::text::{find_phrase, identifier_words, sentences};

const CONNECTORS: &[&str] = &[
    "of", "the", "and", "de", "del", "la", "le", "van", "von", "der", "du", "da", "for", "in",
    "on", "&",
];
const ARTICLES: &[&str] = &["a", "an", "the"];
const LINKING: &[&str] = &["is", "was", "are", "were", ":", "=", "of", "by", "to"];

#[derive(Clone, Debug, Default)]
pub struct RuleBackend;

impl ExtractionBackend for RuleBackend {
    fn name(&self) -> &str {
        "rules"
    }

    fn extract(&self, tool: Tool, args: &Args, _ctx: &ToolContext) -> Result<Value, ToolError> {
        let text = text_arg(tool, args, "text")?;
        match tool {
            Tool::Ner => Ok(Value::texts(ner(text, text_arg(tool, args, "type")?))),
            Tool::Re => Ok(Value::texts(relation(
                text,
                text_arg(tool, args, "head_e")?,
                text_arg(tool, args, "relation")?,
            ))),
            Tool::Ae => {
                let entity = text_arg(tool, args, "entity")?;
                let mut out = BTreeMap::new();
                for a in list_arg(tool, args, "attribute_list")? {
                    if let Value::Text(name) = a {
                        out.insert(
                            name.clone(),
                            attribute(text, entity, name).map_or(Value::Null, Value::Text),
                        );
                    }
                }
                Ok(Value::Record(out))
            }
            Tool::Classify => {
                let labels: Vec<&str> = list_arg(tool, args, "label_list")?
                    .iter()
                    .filter_map(Value::as_str)
                    .collect();
                classify(text, &labels)
                    .map(Value::text)
                    .ok_or_else(|| ToolError::InvalidArgument {
                        tool,
                        message: "label_list is empty".into(),
                    })
            }
            other => Err(ToolError::InvalidArgument {
                tool: other,
                message: "not an extraction tool".into(),
            }),
        }
    }
}

/// A word as it appears in running text, with its byte range.
#[derive(Clone, Copy, Debug)]
struct Word<'a> {
    text: &'a str,
    start: usize,
    end: usize,
}

fn words(s: &str) -> Vec<Word<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in s.char_indices() {
        let part = c.is_alphanumeric() || matches!(c, '\'' | '’' | '-' | '&');
        match (part, start) {
            (true, None) => start = Some(i),
            (false, Some(st)) => {
                out.push(Word {
                    text: &s[st..i],
                    start: st,
                    end: i,
                });
                start = None;
            }
            _ => {}
        }
    }
    if let Some(st) = start {
        out.push(Word {
            text: &s[st..],
            start: st,
            end: s.len(),
        });
    }
    out
}

fn is_capitalized(w: &str) -> bool {
    w.chars()
        .next()
        .is_some_and(|c| c.is_uppercase() || c.is_ascii_digit())
}

/// The run of capitalized words starting at byte `from`, allowing
/// lowercase connectors between capitalized words. A quoted title is
/// taken whole.
fn capitalized_span(text: &str, from: usize) -> Option<&str> {
    let rest = &text[from..];
    let trimmed = rest.trim_start();
    let offset = from + rest.len() - trimmed.len();
    if let Some(q) = trimmed
        .chars()
        .next()
        .filter(|c| matches!(c, '"' | '“' | '\''))
    {
        let close = match q {
            '“' => '”',
            c => c,
        };
        let inner = &trimmed[q.len_utf8()..];
        if let Some(end) = inner.find(close) {
            let t = inner[..end].trim();
            if !t.is_empty() && !t.contains('\n') {
                return Some(t);
            }
        }
    }
    let ws = words(&text[offset..]);
    let mut last_cap: Option<usize> = None;
    for (i, w) in ws.iter().enumerate() {
        // words must be separated only by single spaces (or an initial's dot)
        if i > 0 {
            let gap = &text[offset + ws[i - 1].end..offset + w.start];
            let initial_gap = gap == ". " && ws[i - 1].text.chars().count() == 1;
            if gap != " " && !initial_gap {
                break;
            }
        } else if w.start != 0 {
            return None;
        }
        if is_capitalized(w.text) {
            last_cap = Some(i);
        } else if !CONNECTORS.contains(&w.text) || last_cap.is_none() {
            break;
        }
    }
    let last = last_cap?;
    let (s, e) = (offset + ws[0].start, offset + ws[last].end);
    let mut span = &text[s..e];
    // a single initial before the span end keeps its period: "J. Smith"
    if span.ends_with(char::is_uppercase) && span.chars().count() == 1 {
        span = &text[s..(e + 1).min(text.len())];
    }
    Some(span)
}

fn push_unique(out: &mut Vec<String>, s: &str) {
    let s = s.trim();
    if !s.is_empty() && !out.iter().any(|o| o == s) {
        out.push(s.to_string());
    }
}

fn type_cues(ty: &str) -> Vec<String> {
    let base = identifier_words(ty).join(" ");
    if base.is_empty() {
        return Vec::new();
    }
    let mut cues = alloc::vec![base.clone()];
    if !base.ends_with('s') {
        cues.push(alloc::format!("{base}s"));
    }
    cues
}

/// Entities of type `ty`: capitalized spans right after a mention of the
/// type ("the movie Heat"), or followed by one ("Heat, a movie";
/// "Heat is a movie").
pub fn ner(text: &str, ty: &str) -> Vec<String> {
    let mut found: Vec<(usize, String)> = Vec::new();
    for cue in type_cues(ty) {
        for pos in find_phrase(text, &cue) {
            let after = pos + cue.len();
            if let Some(span) = capitalized_span(text, after) {
                if text[after..].starts_with([' ', '"', '“', '\'']) {
                    found.push((pos, span.to_string()));
                }
            }
            // "<Span>, a movie" / "<Span> is a movie"
            let before = text[..pos].trim_end();
            let ws = words(before);
            let n = ws.len();
            if n >= 2 && ARTICLES.contains(&ws[n - 1].text.to_lowercase().as_str()) {
                let prev = &before[..ws[n - 1].start].trim_end();
                let (head, ok) = if let Some(h) = prev.strip_suffix(',') {
                    (h, true)
                } else {
                    let pw = words(prev);
                    match pw.last() {
                        Some(w) if matches!(w.text, "is" | "was") => (&prev[..w.start], true),
                        _ => (*prev, false),
                    }
                };
                if ok {
                    if let Some(span) = trailing_capitalized(head.trim_end()) {
                        found.push((pos, span.to_string()));
                    }
                }
            }
        }
    }
    found.sort_by_key(|(p, _)| *p);
    let mut out = Vec::new();
    for (_, s) in found {
        push_unique(&mut out, &s);
    }
    out
}

/// The capitalized run ending at the end of `s`.
fn trailing_capitalized(s: &str) -> Option<&str> {
    let ws = words(s);
    let last = ws.last()?;
    if last.end != s.len() || !is_capitalized(last.text) {
        return None;
    }
    let mut first = ws.len() - 1;
    while first > 0 {
        let gap = &s[ws[first - 1].end..ws[first].start];
        if gap != " " {
            break;
        }
        let w = ws[first - 1].text;
        if is_capitalized(w)
            || (CONNECTORS.contains(&w) && first >= 2 && is_capitalized(ws[first - 2].text))
        {
            first -= 1;
        } else {
            break;
        }
    }
    // a sentence-initial article is not part of the name
    while first < ws.len() - 1 && ARTICLES.contains(&ws[first].text.to_lowercase().as_str()) {
        first += 1;
    }
    Some(&s[ws[first].start..])
}

/// Tails related to `head` by `relation`: in sentences naming the head,
/// capitalized spans following the relation words.
pub fn relation(text: &str, head: &str, relation: &str) -> Vec<String> {
    let cue = identifier_words(relation).join(" ");
    let mut out = Vec::new();
    if cue.is_empty() {
        return out;
    }
    for sent in sentences(text) {
        if find_phrase(sent, head).is_empty() {
            continue;
        }
        for pos in find_phrase(sent, &cue) {
            let mut at = pos + cue.len();
            loop {
                let rest = &sent[at..];
                let t = rest.trim_start();
                let skip = LINKING.iter().chain(ARTICLES).find(|w| {
                    t.to_lowercase().starts_with(*w)
                        && t.get(w.len()..)
                            .is_some_and(|r| !r.starts_with(char::is_alphanumeric))
                });
                match skip {
                    Some(w) => at += rest.len() - t.len() + w.len(),
                    None => break,
                }
            }
            if let Some(span) = capitalized_span(sent, at) {
                if span != head {
                    push_unique(&mut out, span);
                }
            }
        }
    }
    out
}

/// The value stated for `attr` ("The budget of Heat was $60 million"),
/// preferring sentences that name the entity.
pub fn attribute(text: &str, entity: &str, attr: &str) -> Option<String> {
    let cue = identifier_words(attr).join(" ");
    if cue.is_empty() {
        return None;
    }
    let sents = sentences(text);
    let about: Vec<&str> = sents
        .iter()
        .copied()
        .filter(|s| !find_phrase(s, entity).is_empty())
        .collect();
    for pool in [about, sents] {
        for sent in pool {
            for pos in find_phrase(sent, &cue) {
                let mut rest = sent[pos + cue.len()..].trim_start();
                let lower = rest.to_lowercase();
                if let Some(r) = lower.strip_prefix("of ") {
                    let r = r.trim_start();
                    if r.starts_with(&entity.to_lowercase()) {
                        let consumed = rest.len() - r.len() + entity.len();
                        rest = rest.get(consumed..).unwrap_or("").trim_start();
                    }
                }
                let lower = rest.to_lowercase();
                let Some(link) = LINKING.iter().find(|w| {
                    lower.starts_with(*w)
                        && rest
                            .get(w.len()..)
                            .is_some_and(|r| !r.starts_with(char::is_alphanumeric))
                }) else {
                    continue;
                };
                let value = rest.get(link.len()..).unwrap_or("").trim_start();
                let end = value_end(value);
                let v = value[..end].trim().trim_end_matches(['.', '!', '?']).trim();
                if !v.is_empty() {
                    return Some(v.to_string());
                }
            }
        }
    }
    None
}

/// End of a stated value: the first `;`, `(` or newline, or a comma not
/// followed by a number (so "July 21, 2023" stays whole).
fn value_end(value: &str) -> usize {
    for (i, c) in value.char_indices() {
        match c {
            ';' | '(' | '\n' => return i,
            ',' if !value[i + 1..]
                .trim_start()
                .starts_with(|d: char| d.is_ascii_digit()) =>
            {
                return i
            }
            _ => {}
        }
    }
    value.len()
}

/// The label mentioned most often; ties go to the label listed first, and
/// with no mention at all the first label is returned.
pub fn classify<'a>(text: &str, labels: &[&'a str]) -> Option<&'a str> {
    let first = *labels.first()?;
    let mut best = (first, 0usize);
    for &l in labels {
        let n = find_phrase(text, l).len();
        if n > best.1 {
            best = (l, n);
        }
    }
    Some(best.0)
}
