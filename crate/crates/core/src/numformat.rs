//! Number-expression normalisation.
//!
//! Each maximal number expression in an [`IndexStream`] is replaced by one
//! number temporary (6000, 6001, …) bound to a [`NumFormat`] record.
//!
//! Number words are recognised by index, not surface, so the same grammar
//! serves every lexicon: cardinals live at `4100 + value` (0–19 and the tens
//! 20–90), ordinals at `4200 + value`.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::{ElementKind, IndexStream, IndexedElement, Lexicon, WordIndex, NUMBER_TEMP_BASE};

pub const EACH: WordIndex = 4001;
pub const AND: WordIndex = 4002;
pub const DASH: WordIndex = 4003;
pub const COMMA: WordIndex = 4004;
pub const LAST: WordIndex = 4005;
pub const NEXT: WordIndex = 4007;
pub const CARDINAL_BASE: WordIndex = 4100;
pub const ORDINAL_BASE: WordIndex = 4200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NumKind {
    Cardinal,
    Ordinal,
    Range,
    Array,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NumFrame {
    Absolute,
    /// Signed offsets: −1 is the last item, +1 the item after the current one.
    Relative,
}

/// Value list of a [`NumFormat`]; serialises as a JSON array or the string `"ALL"`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum NumValues {
    All,
    List(Vec<i64>),
}

impl Serialize for NumValues {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            NumValues::All => s.serialize_str("ALL"),
            NumValues::List(v) => v.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for NumValues {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = NumValues;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer list or \"ALL\"")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<NumValues, E> {
                if v == "ALL" {
                    Ok(NumValues::All)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }
            fn visit_seq<A: de::SeqAccess<'de>>(self, mut seq: A) -> Result<NumValues, A::Error> {
                let mut out = Vec::new();
                while let Some(v) = seq.next_element()? {
                    out.push(v);
                }
                Ok(NumValues::List(out))
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NumFormat {
    pub kind: NumKind,
    pub values: NumValues,
    pub frame: NumFrame,
}

impl NumFormat {
    pub fn cardinal(v: i64) -> Self {
        NumFormat { kind: NumKind::Cardinal, values: NumValues::List(vec![v]), frame: NumFrame::Absolute }
    }

    pub fn ordinal(v: i64) -> Self {
        NumFormat { kind: NumKind::Ordinal, values: NumValues::List(vec![v]), frame: NumFrame::Absolute }
    }

    pub fn range(lo: i64, hi: i64) -> Self {
        NumFormat { kind: NumKind::Range, values: NumValues::List(vec![lo, hi]), frame: NumFrame::Absolute }
    }

    pub fn all() -> Self {
        NumFormat { kind: NumKind::Array, values: NumValues::All, frame: NumFrame::Absolute }
    }

    pub fn relative(mut self) -> Self {
        self.frame = NumFrame::Relative;
        self
    }
}

pub type NumberBindings = BTreeMap<WordIndex, NumFormat>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumFormatError {
    #[error("descending range {lo}-{hi} in {surface:?}")]
    MalformedRange { lo: i64, hi: i64, surface: String },
    #[error("{0:?} is not a numeral")]
    NotANumeral(String),
    #[error("more than 500 number expressions in one sentence")]
    TooManyNumbers,
}

impl NumFormatError {
    pub fn kind(&self) -> &'static str {
        match self {
            NumFormatError::MalformedRange { .. } => "MalformedRange",
            NumFormatError::NotANumeral(_) => "NotANumeral",
            NumFormatError::TooManyNumbers => "TooManyNumbers",
        }
    }
}

/// A parsed numeral: its value and whether it was written as an ordinal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Numeral {
    pub value: i64,
    pub ordinal: bool,
}

fn cardinal_word(index: WordIndex) -> Option<i64> {
    let v = index.checked_sub(CARDINAL_BASE)? as i64;
    (v < 20 || (v < 100 && v % 10 == 0)).then_some(v)
}

fn ordinal_word(index: WordIndex) -> Option<i64> {
    let v = index.checked_sub(ORDINAL_BASE)? as i64;
    (v < 20 || (v < 100 && v % 10 == 0)).then_some(v).filter(|&v| v > 0)
}

fn digits(surface: &str) -> Option<Numeral> {
    let n = surface.chars().take_while(|c| c.is_ascii_digit()).count();
    if n == 0 || n > 12 {
        return None;
    }
    let value = surface[..n].parse().ok()?;
    match surface[n..].to_ascii_lowercase().as_str() {
        "" => Some(Numeral { value, ordinal: false }),
        "st" | "nd" | "rd" | "th" => Some(Numeral { value, ordinal: true }),
        _ => None,
    }
}

/// Reads one numeral starting at `i`, returning it and the number of
/// elements consumed. Tens words absorb a following unit word.
fn numeral_at(elements: &[IndexedElement], i: usize) -> Option<(Numeral, usize)> {
    let e = elements.get(i)?;
    match (e.kind, e.index) {
        (ElementKind::UnknownSpan, _) => digits(&e.surface).map(|n| (n, 1)),
        (ElementKind::Word, Some(idx)) => {
            if let Some(v) = cardinal_word(idx) {
                if v >= 20 {
                    if let Some(next) = elements.get(i + 1).filter(|n| n.kind == ElementKind::Word) {
                        let nidx = next.index.unwrap_or(0);
                        if let Some(u) = cardinal_word(nidx).filter(|u| (1..10).contains(u)) {
                            return Some((Numeral { value: v + u, ordinal: false }, 2));
                        }
                        if let Some(u) = ordinal_word(nidx).filter(|u| (1..10).contains(u)) {
                            return Some((Numeral { value: v + u, ordinal: true }, 2));
                        }
                    }
                }
                Some((Numeral { value: v, ordinal: false }, 1))
            } else {
                ordinal_word(idx).map(|v| (Numeral { value: v, ordinal: true }, 1))
            }
        }
        _ => None,
    }
}

/// Parses a complete numeral from surface words (digits or number words).
pub fn parse_numeral(words: &[&str], lexicon: &Lexicon) -> Result<Numeral, NumFormatError> {
    let joined = words.join(" ");
    let elements: Vec<IndexedElement> = words
        .iter()
        .map(|w| match lexicon.lookup(w) {
            Some(idx) => IndexedElement::word(idx, *w),
            None => IndexedElement::unknown(*w),
        })
        .collect();
    match numeral_at(&elements, 0) {
        Some((n, used)) if used == elements.len() => Ok(n),
        _ => Err(NumFormatError::NotANumeral(joined)),
    }
}

fn word_index(e: Option<&IndexedElement>) -> Option<WordIndex> {
    e.filter(|e| e.kind == ElementKind::Word).and_then(|e| e.index)
}

enum Item {
    Single(Numeral),
    Span(i64, i64),
}

/// Tries to read a number expression at `i`; returns the format and the
/// number of elements consumed.
fn expression_at(elements: &[IndexedElement], i: usize) -> Result<Option<(NumFormat, usize)>, NumFormatError> {
    let head = word_index(elements.get(i));
    if head == Some(EACH) {
        return Ok(Some((NumFormat::all(), 1)));
    }
    if head == Some(LAST) || head == Some(NEXT) {
        let count = numeral_at(elements, i + 1).filter(|(n, _)| !n.ordinal && n.value > 0);
        let fmt = match (head, count) {
            (Some(LAST), Some((n, _))) if n.value > 1 => NumFormat::range(-n.value, -1).relative(),
            (Some(LAST), _) => NumFormat::ordinal(-1).relative(),
            (_, Some((n, _))) if n.value > 1 => NumFormat::range(1, n.value).relative(),
            _ => NumFormat::ordinal(1).relative(),
        };
        return Ok(Some((fmt, 1 + count.map_or(0, |(_, used)| used))));
    }

    let Some((first, mut pos)) = numeral_at(elements, i).map(|(n, used)| (n, i + used)) else {
        return Ok(None);
    };
    let surface_to = |end: usize| elements[i..end].iter().map(|e| e.surface.as_str()).collect::<Vec<_>>().join(" ");
    let mut items = Vec::new();
    let mut current = first;

    // "first N" reads as the range 1..N.
    if current.ordinal && current.value == 1 && word_index(elements.get(i)).is_some() {
        if let Some((n, used)) = numeral_at(elements, pos).filter(|(n, _)| !n.ordinal) {
            items.push(Item::Span(1, n.value));
            pos += used;
            return Ok(Some((finish(items, &surface_to(pos))?, pos - i)));
        }
    }

    loop {
        let mut item = Item::Single(current);
        if word_index(elements.get(pos)) == Some(DASH) {
            if let Some((hi, used)) = numeral_at(elements, pos + 1) {
                item = Item::Span(current.value, hi.value);
                pos += 1 + used;
            }
        }
        items.push(item);
        let sep = word_index(elements.get(pos));
        if sep == Some(COMMA) || sep == Some(AND) {
            if let Some((next, used)) = numeral_at(elements, pos + 1) {
                current = next;
                pos += 1 + used;
                continue;
            }
        }
        break;
    }
    Ok(Some((finish(items, &surface_to(pos))?, pos - i)))
}

fn finish(items: Vec<Item>, surface: &str) -> Result<NumFormat, NumFormatError> {
    for item in &items {
        if let Item::Span(lo, hi) = *item {
            if lo > hi {
                return Err(NumFormatError::MalformedRange { lo, hi, surface: surface.to_owned() });
            }
        }
    }
    if let [only] = items.as_slice() {
        return Ok(match *only {
            Item::Single(n) if n.ordinal => NumFormat::ordinal(n.value),
            Item::Single(n) => NumFormat::cardinal(n.value),
            Item::Span(lo, hi) => NumFormat::range(lo, hi),
        });
    }
    let mut values = Vec::new();
    for item in items {
        match item {
            Item::Single(n) => values.push(n.value),
            Item::Span(lo, hi) => values.extend(lo..=hi),
        }
    }
    Ok(NumFormat { kind: NumKind::Array, values: NumValues::List(values), frame: NumFrame::Absolute })
}

/// Replaces every maximal number expression by a number temporary.
///
/// Temporaries already present are kept and new ones continue their
/// numbering, so running this on its own output changes nothing.
pub fn parse_numbers(stream: &IndexStream) -> Result<(IndexStream, NumberBindings), NumFormatError> {
    let elements = &stream.elements;
    let mut next_temp =
        NUMBER_TEMP_BASE + elements.iter().filter(|e| e.kind == ElementKind::NumberTemp).count() as WordIndex;
    let mut out = Vec::with_capacity(elements.len());
    let mut bindings = NumberBindings::new();
    let mut i = 0;
    while i < elements.len() {
        match expression_at(elements, i)? {
            Some((fmt, used)) => {
                if next_temp > crate::lexicon::NUMBER_TEMP_MAX {
                    return Err(NumFormatError::TooManyNumbers);
                }
                let surface = elements[i..i + used].iter().map(|e| e.surface.as_str()).collect::<Vec<_>>().join(" ");
                out.push(IndexedElement::number(next_temp, surface));
                bindings.insert(next_temp, fmt);
                next_temp += 1;
                i += used;
            }
            None => {
                out.push(elements[i].clone());
                i += 1;
            }
        }
    }
    Ok((stream.with_elements(out), bindings))
}
