//! Small text helpers shared by the observer, tools and planner.

use alloc::string::String;
use alloc::vec::Vec;

/// Function words ignored by entity matching.
pub const STOPWORDS: &[&str] = &["a", "an", "and", "of", "the"];

/// Splits an identifier such as `PlaceOfBirth`, `release_date` or
/// `ActorID` into lowercase words.
pub fn identifier_words(name: &str) -> Vec<String> {
    let mut words = Vec::new();
    let mut cur = String::new();
    let chars: Vec<char> = name.chars().collect();
    for (i, &c) in chars.iter().enumerate() {
        if !c.is_alphanumeric() {
            if !cur.is_empty() {
                words.push(core::mem::take(&mut cur));
            }
            continue;
        }
        let boundary = i > 0 && !cur.is_empty() && {
            let p = chars[i - 1];
            let next_lower = chars.get(i + 1).is_some_and(|n| n.is_lowercase());
            (c.is_uppercase() && p.is_lowercase())
                || (c.is_uppercase() && p.is_uppercase() && next_lower)
                || (c.is_ascii_digit() != p.is_ascii_digit())
        };
        if boundary {
            words.push(core::mem::take(&mut cur));
        }
        cur.extend(c.to_lowercase());
    }
    if !cur.is_empty() {
        words.push(cur);
    }
    words
}

/// Lowercased alphanumeric tokens.
pub fn tokens(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| t.chars().flat_map(char::to_lowercase).collect())
        .collect()
}

/// Whitespace-separated word count.
pub fn word_count(text: &str) -> usize {
    text.split_whitespace().count()
}

/// Sentences split on `.`, `!`, `?` or newlines followed by whitespace.
/// Periods inside numbers and single-letter abbreviations do not split.
pub fn sentences(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut start = 0;
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let end_here = match b {
            b'\n' => true,
            b'!' | b'?' => bytes.get(i + 1).is_none_or(|n| n.is_ascii_whitespace()),
            b'.' => {
                let next_ws = bytes.get(i + 1).is_none_or(|n| n.is_ascii_whitespace());
                // "J. Smith" style initials stay together
                let initial = i >= 1
                    && bytes[i - 1].is_ascii_uppercase()
                    && (i < 2 || !bytes[i - 2].is_ascii_alphanumeric());
                next_ws && !initial
            }
            _ => false,
        };
        if end_here {
            let s = text[start..=i].trim();
            if !s.is_empty() {
                out.push(s);
            }
            start = i + 1;
        }
        i += 1;
    }
    let s = text[start..].trim();
    if !s.is_empty() {
        out.push(s);
    }
    out
}

/// Character-bigram Dice similarity in [0, 1].
pub fn bigram_dice(a: &str, b: &str) -> f64 {
    if a == b {
        return 1.0;
    }
    let grams = |s: &str| -> Vec<(char, char)> {
        let cs: Vec<char> = s.chars().collect();
        let mut g: Vec<(char, char)> = cs.windows(2).map(|w| (w[0], w[1])).collect();
        g.sort_unstable();
        g
    };
    let (ga, gb) = (grams(a), grams(b));
    if ga.is_empty() || gb.is_empty() {
        return 0.0;
    }
    // multiset intersection of two sorted lists
    let (mut i, mut j, mut common) = (0, 0, 0usize);
    while i < ga.len() && j < gb.len() {
        match ga[i].cmp(&gb[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    (2 * common) as f64 / (ga.len() + gb.len()) as f64
}

/// Case-insensitive search for `needle` as a whole word sequence in
/// `haystack`; returns byte offsets of each match.
pub fn find_phrase(haystack: &str, needle: &str) -> Vec<usize> {
    let mut out = Vec::new();
    let needle = needle.trim();
    if needle.is_empty() {
        return out;
    }
    let hay_lower: String = haystack.chars().flat_map(char::to_lowercase).collect();
    let needle_lower: String = needle.chars().flat_map(char::to_lowercase).collect();
    // lowercase mapping can change byte lengths; only trust it when it did not
    if hay_lower.len() != haystack.len() {
        return find_exact_words(haystack, needle);
    }
    let mut from = 0;
    while let Some(pos) = hay_lower[from..].find(&needle_lower) {
        let s = from + pos;
        let e = s + needle_lower.len();
        if is_word_boundary(haystack, s, e) {
            out.push(s);
        }
        from = s + needle_lower.len().max(1);
        while from < hay_lower.len() && !hay_lower.is_char_boundary(from) {
            from += 1;
        }
    }
    out
}

fn find_exact_words(haystack: &str, needle: &str) -> Vec<usize> {
    let mut out = Vec::new();
    let mut from = 0;
    while let Some(pos) = haystack[from..].find(needle) {
        let s = from + pos;
        if is_word_boundary(haystack, s, s + needle.len()) {
            out.push(s);
        }
        from = s + needle.len();
    }
    out
}

fn is_word_boundary(text: &str, start: usize, end: usize) -> bool {
    let before = text[..start]
        .chars()
        .next_back()
        .is_none_or(|c| !c.is_alphanumeric());
    let after = text[end..]
        .chars()
        .next()
        .is_none_or(|c| !c.is_alphanumeric());
    before && after
}

/// Edit distance over chars counting insertions, deletions, substitutions
/// and transpositions of adjacent characters.
pub fn edit_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let w = b.len() + 1;
    let mut d = alloc::vec![0usize; (a.len() + 1) * w];
    for i in 0..=a.len() {
        d[i * w] = i;
    }
    for j in 0..=b.len() {
        d[j] = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let cost = usize::from(a[i - 1] != b[j - 1]);
            let mut v = (d[(i - 1) * w + j] + 1)
                .min(d[i * w + j - 1] + 1)
                .min(d[(i - 1) * w + j - 1] + cost);
            if i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1] {
                v = v.min(d[(i - 2) * w + j - 2] + 1);
            }
            d[i * w + j] = v;
        }
    }
    d[a.len() * w + b.len()]
}

/// The candidate closest to `name` when it is a plausible misspelling.
pub fn closest<'a>(name: &str, candidates: impl IntoIterator<Item = &'a str>) -> Option<&'a str> {
    let lower: String = name.to_lowercase();
    candidates
        .into_iter()
        .map(|c| (edit_distance(&lower, &c.to_lowercase()), c))
        .filter(|(d, c)| *d <= (c.chars().count() / 3).max(1))
        .min_by_key(|(d, _)| *d)
        .map(|(_, c)| c)
}
