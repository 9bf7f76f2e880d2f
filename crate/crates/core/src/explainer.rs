//! Tags a canonical-order stream into frame parts and assembles frames.
//!
//! Parts are emitted as soon as their boundary is known: the action at once,
//! a condition when its preposition's signature is satisfied, an object when
//! it is read. [`Emission::End`] follows the last element.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::{ElementKind, Expectation, IndexStream, IndexedElement, Lexicon, PrepRole, WordClass, WordIndex};
use crate::numformat::{NumFormat, NumberBindings};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PartTag {
    Action,
    PrimaryObject,
    SecondaryObject,
    Condition(usize),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartExtra {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub numformat: Option<NumFormat>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub quotes: Vec<String>,
}

impl PartExtra {
    fn is_empty(&self) -> bool {
        self.numformat.is_none() && self.quotes.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedPart {
    pub tag: PartTag,
    pub indices: Vec<WordIndex>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub extra: Option<PartExtra>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Emission {
    Part(TaggedPart),
    /// A switch preposition: later bare objects bind to the secondary slot.
    Switch { index: WordIndex },
    End,
}

impl Emission {
    pub fn indices(&self) -> &[WordIndex] {
        match self {
            Emission::Part(p) => &p.indices,
            Emission::Switch { index } => std::slice::from_ref(index),
            Emission::End => &[],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExplainError {
    #[error("no action word at the start of the command")]
    NoActionFound,
    #[error("preposition {prep} at position {position} is missing {expected}")]
    DanglingPreposition { prep: WordIndex, position: usize, expected: String },
    #[error("second {slot} object at position {position} without a switch")]
    MultipleObjects { slot: String, position: usize },
    #[error("unrecognized word {surface:?} at position {position}")]
    UnrecognizedElement { surface: String, position: usize },
    #[error("unexpected {surface:?} at position {position}")]
    UnexpectedElement { surface: String, position: usize },
    #[error("incomplete frame: {0}")]
    IncompleteFrame(String),
}

impl ExplainError {
    pub fn kind(&self) -> &'static str {
        match self {
            ExplainError::NoActionFound => "NoActionFound",
            ExplainError::DanglingPreposition { .. } => "DanglingPreposition",
            ExplainError::MultipleObjects { .. } => "MultipleObjects",
            ExplainError::UnrecognizedElement { .. } => "UnrecognizedElement",
            ExplainError::UnexpectedElement { .. } => "UnexpectedElement",
            ExplainError::IncompleteFrame(_) => "IncompleteFrame",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ObjectRef {
    pub index: WordIndex,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub quote: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FrameCondition {
    pub prep: WordIndex,
    pub indices: Vec<WordIndex>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub numformat: Option<NumFormat>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub quotes: Option<Vec<String>>,
}

/// The language-free command handed to the executor.
///
/// `language_id` records where the frame came from; it is neither
/// serialised nor compared.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CommandFrame {
    pub action: WordIndex,
    pub primary: ObjectRef,
    pub secondary: Option<ObjectRef>,
    pub conditions: Vec<FrameCondition>,
    #[serde(skip)]
    pub language_id: String,
}

impl PartialEq for CommandFrame {
    fn eq(&self, other: &Self) -> bool {
        self.action == other.action
            && self.primary == other.primary
            && self.secondary == other.secondary
            && self.conditions == other.conditions
    }
}

impl Eq for CommandFrame {}

fn is_object(e: &IndexedElement, lexicon: &Lexicon) -> bool {
    match e.kind {
        ElementKind::QuotationTemp => true,
        ElementKind::Word => class_of(e, lexicon).is_some_and(WordClass::is_object),
        _ => false,
    }
}

fn class_of(e: &IndexedElement, lexicon: &Lexicon) -> Option<WordClass> {
    e.index.and_then(|i| lexicon.entry(i)).map(|entry| entry.class)
}

fn expectation_name(x: Expectation) -> &'static str {
    match x {
        Expectation::NumFormat => "NUMFORMAT",
        Expectation::UnitNoun => "UNIT_NOUN",
        Expectation::Quote => "QUOTE",
        Expectation::QuoteList => "QUOTE_LIST",
        Expectation::Noun => "NOUN",
    }
}

/// Tags `stream`, handing each emission to `sink` as soon as it is known.
///
/// On error the sink has seen a prefix of the emissions and no `End`.
pub fn tag_into(
    stream: &IndexStream,
    numbers: &NumberBindings,
    lexicon: &Lexicon,
    mut sink: impl FnMut(Emission),
) -> Result<(), ExplainError> {
    let elements = &stream.elements;
    let first = elements.first().ok_or(ExplainError::NoActionFound)?;
    if first.kind != ElementKind::Word || class_of(first, lexicon) != Some(WordClass::Action) {
        if let Some((position, e)) = stream.unknown_spans().next().filter(|(p, _)| *p == 0) {
            return Err(ExplainError::UnrecognizedElement { surface: e.surface.clone(), position });
        }
        return Err(ExplainError::NoActionFound);
    }
    sink(Emission::Part(TaggedPart { tag: PartTag::Action, indices: vec![first.index.unwrap_or_default()], extra: None }));

    let quote_text = |e: &IndexedElement| e.index.and_then(|i| stream.quotations.get(&i)).cloned().unwrap_or_default();
    let mut conditions = 0;
    let mut switched = false;
    let mut primary = false;
    let mut secondary = false;
    let mut pos = 1;
    while pos < elements.len() {
        let e = &elements[pos];
        let unexpected = || ExplainError::UnexpectedElement { surface: e.surface.clone(), position: pos };
        if e.kind == ElementKind::UnknownSpan {
            return Err(ExplainError::UnrecognizedElement { surface: e.surface.clone(), position: pos });
        }
        if is_object(e, lexicon) {
            let extra = (e.kind == ElementKind::QuotationTemp)
                .then(|| PartExtra { numformat: None, quotes: vec![quote_text(e)] });
            let tag = if !switched {
                if primary {
                    return Err(ExplainError::MultipleObjects { slot: "primary".into(), position: pos });
                }
                primary = true;
                PartTag::PrimaryObject
            } else {
                if secondary {
                    return Err(ExplainError::MultipleObjects { slot: "secondary".into(), position: pos });
                }
                secondary = true;
                PartTag::SecondaryObject
            };
            sink(Emission::Part(TaggedPart { tag, indices: vec![e.index.unwrap_or_default()], extra }));
            pos += 1;
            continue;
        }
        let entry = e.index.filter(|_| e.kind == ElementKind::Word).and_then(|i| lexicon.entry(i));
        let Some(sig) = entry.and_then(|entry| entry.signature.as_ref()) else {
            return Err(unexpected());
        };
        let prep = e.index.unwrap_or_default();
        if sig.role == PrepRole::Switch {
            if switched || !primary {
                return Err(unexpected());
            }
            switched = true;
            sink(Emission::Switch { index: prep });
            pos += 1;
            continue;
        }

        let start = pos;
        let mut extra = PartExtra::default();
        pos += 1;
        for &expect in &sig.elements {
            let dangling = || ExplainError::DanglingPreposition {
                prep,
                position: start,
                expected: expectation_name(expect).to_owned(),
            };
            let arg = elements.get(pos);
            let ok = match (expect, arg) {
                (Expectation::NumFormat, Some(a)) => a.kind == ElementKind::NumberTemp,
                (Expectation::UnitNoun | Expectation::Noun, Some(a)) => {
                    a.kind == ElementKind::Word && class_of(a, lexicon).is_some_and(WordClass::is_object)
                }
                (Expectation::Quote | Expectation::QuoteList, Some(a)) => a.kind == ElementKind::QuotationTemp,
                (_, None) => false,
            };
            if !ok {
                return Err(dangling());
            }
            let a = &elements[pos];
            match expect {
                Expectation::NumFormat => extra.numformat = a.index.and_then(|i| numbers.get(&i)).cloned(),
                Expectation::Quote => extra.quotes.push(quote_text(a)),
                Expectation::QuoteList => {
                    while let Some(q) = elements.get(pos).filter(|q| q.kind == ElementKind::QuotationTemp) {
                        extra.quotes.push(quote_text(q));
                        pos += 1;
                    }
                    continue;
                }
                _ => {}
            }
            pos += 1;
        }
        let indices = elements[start..pos].iter().map(|x| x.index.unwrap_or_default()).collect();
        let extra = (!extra.is_empty()).then_some(extra);
        sink(Emission::Part(TaggedPart { tag: PartTag::Condition(conditions), indices, extra }));
        conditions += 1;
    }
    if switched && !secondary {
        return Err(ExplainError::DanglingPreposition {
            prep: elements.iter().rev().find_map(|e| e.index).unwrap_or_default(),
            position: elements.len(),
            expected: "secondary object".into(),
        });
    }
    sink(Emission::End);
    Ok(())
}

pub fn tag(stream: &IndexStream, numbers: &NumberBindings, lexicon: &Lexicon) -> Result<Vec<Emission>, ExplainError> {
    let mut out = Vec::new();
    tag_into(stream, numbers, lexicon, |e| out.push(e))?;
    Ok(out)
}

/// Assembles a frame from emissions as they arrive.
#[derive(Debug, Default)]
pub struct FrameBuilder {
    language_id: String,
    action: Option<WordIndex>,
    primary: Option<ObjectRef>,
    secondary: Option<ObjectRef>,
    conditions: BTreeMap<usize, FrameCondition>,
    done: bool,
}

impl FrameBuilder {
    pub fn new(language_id: impl Into<String>) -> Self {
        FrameBuilder { language_id: language_id.into(), ..Default::default() }
    }

    /// Feeds one emission; returns the frame once `End` arrives.
    pub fn push(&mut self, emission: Emission) -> Result<Option<CommandFrame>, ExplainError> {
        let incomplete = |why: &str| ExplainError::IncompleteFrame(why.to_owned());
        if self.done {
            return Err(incomplete("emission after End"));
        }
        match emission {
            Emission::Part(part) => {
                let object = |p: &TaggedPart| ObjectRef {
                    index: p.indices[0],
                    quote: p.extra.as_ref().and_then(|x| x.quotes.first().cloned()),
                };
                match part.tag {
                    PartTag::Action => self.action = Some(part.indices[0]),
                    PartTag::PrimaryObject => self.primary = Some(object(&part)),
                    PartTag::SecondaryObject => self.secondary = Some(object(&part)),
                    PartTag::Condition(k) => {
                        let extra = part.extra.unwrap_or_default();
                        self.conditions.insert(
                            k,
                            FrameCondition {
                                prep: part.indices[0],
                                indices: part.indices,
                                numformat: extra.numformat,
                                quotes: (!extra.quotes.is_empty()).then_some(extra.quotes),
                            },
                        );
                    }
                }
                Ok(None)
            }
            Emission::Switch { .. } => Ok(None),
            Emission::End => {
                self.done = true;
                let action = self.action.ok_or_else(|| incomplete("no action"))?;
                let primary = self.primary.take().ok_or_else(|| incomplete("no primary object"))?;
                Ok(Some(CommandFrame {
                    action,
                    primary,
                    secondary: self.secondary.take(),
                    conditions: std::mem::take(&mut self.conditions).into_values().collect(),
                    language_id: self.language_id.clone(),
                }))
            }
        }
    }
}

pub fn build_frame(emissions: &[Emission], language_id: &str) -> Result<CommandFrame, ExplainError> {
    let mut builder = FrameBuilder::new(language_id);
    for e in emissions {
        if let Some(frame) = builder.push(e.clone())? {
            return Ok(frame);
        }
    }
    Err(ExplainError::IncompleteFrame("no End message".into()))
}
