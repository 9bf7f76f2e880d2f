//! Extension packs: extra dictionary entries, specific rules and an adapter.

use std::collections::{BTreeMap, BTreeSet};

use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Deserialize, Serialize, Serializer};
use serde_json::Value;
use thiserror::Error;

use crate::executor::AdapterRegistry;
use crate::lexicon::{EntryRecord, EntryScope, Lexicon, LexiconError, WordEntry, WordIndex};
use crate::rewrite::{compile_rule_in, RewriteRule, RuleError, RuleScope, TempClasses};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuitMeta {
    pub id: String,
    pub name: String,
    pub version: String,
    pub language_id: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Suit {
    pub meta: SuitMeta,
    pub entries: Vec<EntryRecord>,
    pub rules: Vec<String>,
    #[serde(default)]
    pub temp_classes: BTreeMap<String, Vec<WordIndex>>,
    pub adapter_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SuitError {
    #[error("suit parse error at line {line}, column {column}: {message}")]
    ParseError { line: usize, column: usize, message: String },
    #[error("suit entry {index} collides with a loaded entry: {detail}")]
    IndexCollision { index: WordIndex, detail: String },
    #[error("invalid suit entry: {0}")]
    InvalidEntry(LexiconError),
    #[error("suit rule does not compile: {0}")]
    RuleCompileError(RuleError),
    #[error("suit names unknown adapter {0:?}")]
    UnknownAdapter(String),
    #[error("suit language {suit:?} does not match lexicon language {lexicon:?}")]
    LanguageMismatch { suit: String, lexicon: String },
    #[error("a suit with id {0:?} is already merged")]
    AlreadyMerged(String),
}

impl SuitError {
    pub fn kind(&self) -> &'static str {
        match self {
            SuitError::ParseError { .. } => "ParseError",
            SuitError::IndexCollision { .. } => "IndexCollision",
            SuitError::InvalidEntry(_) => "InvalidEntry",
            SuitError::RuleCompileError(_) => "RuleCompileError",
            SuitError::UnknownAdapter(_) => "UnknownAdapter",
            SuitError::LanguageMismatch { .. } => "LanguageMismatch",
            SuitError::AlreadyMerged(_) => "AlreadyMerged",
        }
    }
}

impl Suit {
    pub fn scope(&self) -> EntryScope {
        EntryScope::Suit(self.meta.id.clone())
    }

    pub fn rule_scope(&self) -> RuleScope {
        RuleScope::Specific(self.meta.id.clone())
    }

    pub fn word_entries(&self) -> Vec<WordEntry> {
        self.entries.iter().cloned().map(|r| r.into_entry(self.scope())).collect()
    }

    pub fn classes(&self) -> TempClasses {
        self.temp_classes.iter().map(|(k, v)| (k.clone(), v.iter().copied().collect::<BTreeSet<_>>())).collect()
    }

    /// Base lexicon plus this suit's entries.
    pub fn extend_lexicon(&self, base: &Lexicon) -> Result<Lexicon, SuitError> {
        base.with_entries(self.word_entries()).map_err(|e| match e {
            LexiconError::DuplicateIndex(index) => SuitError::IndexCollision { index, detail: e.to_string() },
            LexiconError::ConflictingSurface { requested, .. } => {
                SuitError::IndexCollision { index: requested, detail: e.to_string() }
            }
            other => SuitError::InvalidEntry(other),
        })
    }

    /// Compiles the suit's rules against `lexicon` (which must include the suit).
    pub fn compile_rules(&self, lexicon: &Lexicon) -> Result<Vec<RewriteRule>, SuitError> {
        self.rules
            .iter()
            .enumerate()
            .map(|(i, text)| compile_rule_in(text, lexicon, &self.classes(), self.rule_scope(), i as i64))
            .collect::<Result<_, _>>()
            .map_err(SuitError::RuleCompileError)
    }

    /// Checks the suit against a base lexicon and the adapter registry.
    pub fn validate(&self, base: &Lexicon, registry: &AdapterRegistry) -> Result<(), SuitError> {
        if self.meta.language_id != base.language_id() {
            return Err(SuitError::LanguageMismatch {
                suit: self.meta.language_id.clone(),
                lexicon: base.language_id().to_owned(),
            });
        }
        let lexicon = self.extend_lexicon(base)?;
        self.compile_rules(&lexicon)?;
        if !registry.contains(&self.adapter_id) {
            return Err(SuitError::UnknownAdapter(self.adapter_id.clone()));
        }
        Ok(())
    }
}

/// Parses and validates a suit file.
pub fn load_suit(bytes: &[u8], base: &Lexicon, registry: &AdapterRegistry) -> Result<Suit, SuitError> {
    let suit = parse_suit(bytes)?;
    suit.validate(base, registry)?;
    Ok(suit)
}

/// Parses a suit file without validating it.
pub fn parse_suit(bytes: &[u8]) -> Result<Suit, SuitError> {
    serde_json::from_slice(bytes).map_err(|e| SuitError::ParseError {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

struct Canonical<'a>(&'a Value);

impl Serialize for Canonical<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            Value::Object(map) => {
                let mut keys: Vec<&String> = map.keys().collect();
                keys.sort();
                let mut out = s.serialize_map(Some(keys.len()))?;
                for k in keys {
                    out.serialize_entry(k, &Canonical(&map[k]))?;
                }
                out.end()
            }
            Value::Array(items) => {
                let mut out = s.serialize_seq(Some(items.len()))?;
                for item in items {
                    out.serialize_element(&Canonical(item))?;
                }
                out.end()
            }
            other => other.serialize(s),
        }
    }
}

/// Canonical file bytes: keys sorted at every level, two-space indent,
/// trailing newline.
pub fn export_suit(suit: &Suit) -> Vec<u8> {
    let value = serde_json::to_value(suit).expect("suits serialise");
    let mut out = serde_json::to_vec_pretty(&Canonical(&value)).expect("values serialise");
    out.push(b'\n');
    out
}
