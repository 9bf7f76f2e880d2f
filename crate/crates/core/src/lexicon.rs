//! Keyword dictionary, quotation extraction, segmentation and indexing.
//!
//! A [`Lexicon`] maps surface forms to integer indices. Synonyms share one
//! index, and the index band encodes the lexical class:
//!
//! | band        | class                                  |
//! |-------------|----------------------------------------|
//! | 1000–1999   | actions                                |
//! | 2000–2999   | nouns and units                        |
//! | 3000–3999   | prepositions (condition and switch)    |
//! | 4000–4999   | quantifiers, number words, function words |
//! | 5000–5499   | quotation temporaries (never in a lexicon) |
//! | 6000–6499   | number temporaries (never in a lexicon)    |
//!
//! Snapshots are immutable: every mutation returns a new [`Lexicon`].

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Integer index of a dictionary entry or temporary.
pub type WordIndex = u32;

pub const QUOTE_TEMP_BASE: WordIndex = 5000;
pub const QUOTE_TEMP_MAX: WordIndex = 5499;
pub const NUMBER_TEMP_BASE: WordIndex = 6000;
pub const NUMBER_TEMP_MAX: WordIndex = 6499;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum WordClass {
    Action,
    Noun,
    Unit,
    Preposition,
    SwitchPreposition,
    Quantifier,
    NumberWord,
    /// Relative pronouns, conjunctions, articles, punctuation and internal markers.
    Function,
}

impl WordClass {
    pub fn band(self) -> RangeInclusive<WordIndex> {
        match self {
            WordClass::Action => 1000..=1999,
            WordClass::Noun | WordClass::Unit => 2000..=2999,
            WordClass::Preposition | WordClass::SwitchPreposition => 3000..=3999,
            WordClass::Quantifier | WordClass::NumberWord | WordClass::Function => 4000..=4999,
        }
    }

    pub fn is_object(self) -> bool {
        matches!(self, WordClass::Noun | WordClass::Unit)
    }
}

/// One argument a condition preposition expects.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Expectation {
    /// A number temporary.
    #[serde(rename = "NUMFORMAT")]
    NumFormat,
    /// A noun or unit naming what the number counts.
    #[serde(rename = "UNIT_NOUN")]
    UnitNoun,
    /// Exactly one quotation temporary.
    #[serde(rename = "QUOTE")]
    Quote,
    /// One or more quotation temporaries, consumed greedily. Must be last.
    #[serde(rename = "QUOTE_LIST")]
    QuoteList,
    #[serde(rename = "NOUN")]
    Noun,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PrepRole {
    Condition,
    Switch,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrepSignature {
    pub elements: Vec<Expectation>,
    pub role: PrepRole,
}

impl PrepSignature {
    pub fn switch() -> Self {
        PrepSignature { elements: Vec::new(), role: PrepRole::Switch }
    }
}

/// Where an entry came from.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EntryScope {
    Global,
    Suit(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordEntry {
    pub index: WordIndex,
    pub class: WordClass,
    pub forms: Vec<String>,
    pub pos_tag: String,
    pub signature: Option<PrepSignature>,
    pub scope: EntryScope,
}

impl WordEntry {
    pub fn representative(&self) -> &str {
        &self.forms[0]
    }

    fn validate(&self) -> Result<(), LexiconError> {
        if self.forms.is_empty() || self.forms.iter().any(|f| f.trim().is_empty()) {
            return Err(LexiconError::EmptyForms(self.index));
        }
        if !self.class.band().contains(&self.index) {
            return Err(LexiconError::IndexOutOfBand { index: self.index, class: self.class });
        }
        let bad = |reason: &str| LexiconError::BadSignature { index: self.index, reason: reason.to_owned() };
        match (self.class, &self.signature) {
            (WordClass::Preposition, None) => return Err(bad("condition preposition needs a signature")),
            (WordClass::Preposition, Some(sig)) => {
                if sig.role != PrepRole::Condition {
                    return Err(bad("condition preposition must have role Condition"));
                }
                if sig.elements.is_empty() {
                    return Err(bad("condition signature is empty"));
                }
                if let Some(pos) = sig.elements.iter().position(|e| *e == Expectation::QuoteList) {
                    if pos + 1 != sig.elements.len() {
                        return Err(bad("QUOTE_LIST must be the final element"));
                    }
                }
            }
            (WordClass::SwitchPreposition, Some(sig)) => {
                if sig.role != PrepRole::Switch || !sig.elements.is_empty() {
                    return Err(bad("switch preposition must have role Switch and no elements"));
                }
            }
            (WordClass::SwitchPreposition, None) => {}
            (_, Some(_)) => return Err(bad("only prepositions carry signatures")),
            (_, None) => {}
        }
        Ok(())
    }
}

/// On-disk shape of one entry, shared by lexicon and suit files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryRecord {
    pub index: WordIndex,
    pub class: WordClass,
    pub forms: Vec<String>,
    pub pos: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signature: Option<PrepSignature>,
}

impl EntryRecord {
    pub fn into_entry(self, scope: EntryScope) -> WordEntry {
        let signature = match (self.class, self.signature) {
            (WordClass::SwitchPreposition, None) => Some(PrepSignature::switch()),
            (_, sig) => sig,
        };
        WordEntry { index: self.index, class: self.class, forms: self.forms, pos_tag: self.pos, signature, scope }
    }
}

impl From<&WordEntry> for EntryRecord {
    fn from(e: &WordEntry) -> Self {
        EntryRecord {
            index: e.index,
            class: e.class,
            forms: e.forms.clone(),
            pos: e.pos_tag.clone(),
            signature: e.signature.clone(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LexiconFile {
    language_id: String,
    entries: Vec<EntryRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexiconError {
    #[error("lexicon parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("entry {0} has no usable surface forms")]
    EmptyForms(WordIndex),
    #[error("index {index} lies outside the band for {class:?}")]
    IndexOutOfBand { index: WordIndex, class: WordClass },
    #[error("index {0} is defined twice")]
    DuplicateIndex(WordIndex),
    #[error("surface {surface:?} already maps to {existing}, cannot map it to {requested}")]
    ConflictingSurface { surface: String, existing: WordIndex, requested: WordIndex },
    #[error("no entry with index {0}")]
    UnknownIndex(WordIndex),
    #[error("entry {index}: {reason}")]
    BadSignature { index: WordIndex, reason: String },
}

impl LexiconError {
    pub fn kind(&self) -> &'static str {
        match self {
            LexiconError::Parse { .. } => "ParseError",
            LexiconError::EmptyForms(_) => "EmptyForms",
            LexiconError::IndexOutOfBand { .. } => "IndexOutOfBand",
            LexiconError::DuplicateIndex(_) => "DuplicateIndex",
            LexiconError::ConflictingSurface { .. } => "ConflictingSurface",
            LexiconError::UnknownIndex(_) => "UnknownIndex",
            LexiconError::BadSignature { .. } => "BadSignature",
        }
    }
}

impl From<serde_json::Error> for LexiconError {
    fn from(e: serde_json::Error) -> Self {
        LexiconError::Parse { line: e.line(), column: e.column(), message: e.to_string() }
    }
}

/// Lookup key for a surface form.
pub fn normalize_form(surface: &str) -> String {
    surface.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

/// An immutable dictionary snapshot.
#[derive(Clone, Debug)]
pub struct Lexicon {
    language_id: String,
    entries: BTreeMap<WordIndex, WordEntry>,
    forms: HashMap<String, WordIndex>,
    max_form_words: usize,
    max_form_chars: usize,
}

impl PartialEq for Lexicon {
    fn eq(&self, other: &Self) -> bool {
        self.language_id == other.language_id && self.entries == other.entries
    }
}

impl Lexicon {
    pub fn new(language_id: impl Into<String>, entries: Vec<WordEntry>) -> Result<Self, LexiconError> {
        let mut lex = Lexicon {
            language_id: language_id.into(),
            entries: BTreeMap::new(),
            forms: HashMap::new(),
            max_form_words: 1,
            max_form_chars: 1,
        };
        for entry in entries {
            lex.insert(entry)?;
        }
        Ok(lex)
    }

    pub fn from_json(text: &str) -> Result<Self, LexiconError> {
        let file: LexiconFile = serde_json::from_str(text)?;
        let entries = file.entries.into_iter().map(|r| r.into_entry(EntryScope::Global)).collect();
        Lexicon::new(file.language_id, entries)
    }

    pub fn to_json(&self) -> String {
        let file = LexiconFile {
            language_id: self.language_id.clone(),
            entries: self.entries.values().map(EntryRecord::from).collect(),
        };
        serde_json::to_string_pretty(&file).expect("lexicon serializes")
    }

    fn insert(&mut self, entry: WordEntry) -> Result<(), LexiconError> {
        entry.validate()?;
        if self.entries.contains_key(&entry.index) {
            return Err(LexiconError::DuplicateIndex(entry.index));
        }
        for form in &entry.forms {
            let key = normalize_form(form);
            match self.forms.get(&key) {
                Some(&existing) if existing != entry.index => {
                    return Err(LexiconError::ConflictingSurface {
                        surface: form.clone(),
                        existing,
                        requested: entry.index,
                    })
                }
                _ => {}
            }
        }
        for form in &entry.forms {
            let key = normalize_form(form);
            self.max_form_words = self.max_form_words.max(key.split(' ').count());
            self.max_form_chars = self.max_form_chars.max(key.chars().count());
            self.forms.insert(key, entry.index);
        }
        self.entries.insert(entry.index, entry);
        Ok(())
    }

    pub fn language_id(&self) -> &str {
        &self.language_id
    }

    pub fn entry(&self, index: WordIndex) -> Option<&WordEntry> {
        self.entries.get(&index)
    }

    pub fn entries(&self) -> impl Iterator<Item = &WordEntry> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn lookup(&self, surface: &str) -> Option<WordIndex> {
        self.forms.get(&normalize_form(surface)).copied()
    }

    pub fn is_form(&self, surface: &str) -> bool {
        self.lookup(surface).is_some()
    }

    /// Representative surface of an index, used for messages.
    pub fn name_of(&self, index: WordIndex) -> String {
        self.entry(index).map(|e| e.representative().to_owned()).unwrap_or_else(|| format!("@{index}"))
    }

    pub fn max_form_words(&self) -> usize {
        self.max_form_words
    }

    /// Returns a new snapshot in which `surface` is a form of entry `index`.
    pub fn add_synonym(&self, index: WordIndex, surface: &str) -> Result<Lexicon, LexiconError> {
        let surface = surface.trim();
        if surface.is_empty() {
            return Err(LexiconError::EmptyForms(index));
        }
        if !self.entries.contains_key(&index) {
            return Err(LexiconError::UnknownIndex(index));
        }
        match self.lookup(surface) {
            Some(existing) if existing == index => return Ok(self.clone()),
            Some(existing) => {
                return Err(LexiconError::ConflictingSurface {
                    surface: surface.to_owned(),
                    existing,
                    requested: index,
                })
            }
            None => {}
        }
        let mut next = self.clone();
        let entry = next.entries.get_mut(&index).expect("checked above");
        entry.forms.push(surface.to_owned());
        let key = normalize_form(surface);
        next.max_form_words = next.max_form_words.max(key.split(' ').count());
        next.max_form_chars = next.max_form_chars.max(key.chars().count());
        next.forms.insert(key, index);
        Ok(next)
    }

    /// Union with additional entries (e.g. from a suit).
    pub fn with_entries(&self, entries: impl IntoIterator<Item = WordEntry>) -> Result<Lexicon, LexiconError> {
        let mut next = self.clone();
        for e in entries {
            next.insert(e)?;
        }
        Ok(next)
    }

    /// Drops every entry contributed by `scope`.
    pub fn without_scope(&self, scope: &EntryScope) -> Lexicon {
        let kept = self.entries.values().filter(|e| &e.scope != scope).cloned().collect();
        Lexicon::new(self.language_id.clone(), kept).expect("subset of a valid lexicon is valid")
    }
}

// ---------------------------------------------------------------------------
// Quotations

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuoteError {
    #[error("unbalanced quote {delimiter:?} at character {position}")]
    UnbalancedQuote { position: usize, delimiter: char },
}

impl QuoteError {
    pub fn kind(&self) -> &'static str {
        "UnbalancedQuote"
    }
}

/// Text with quotations replaced by ordinal placeholders.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MaskedText {
    pub text: String,
    pub quotes: Vec<String>,
}

pub fn placeholder(ordinal: usize) -> String {
    format!("⟨Q{ordinal}⟩")
}

/// Parses a placeholder at the start of `s`, returning (ordinal, byte length).
fn parse_placeholder(s: &str) -> Option<(usize, usize)> {
    let rest = s.strip_prefix('⟨')?.strip_prefix('Q')?;
    let digits: String = rest.chars().take_while(|c| c.is_ascii_digit()).collect();
    if digits.is_empty() {
        return None;
    }
    let after = &rest[digits.len()..];
    after.strip_prefix('⟩')?;
    let len = '⟨'.len_utf8() + 1 + digits.len() + '⟩'.len_utf8();
    Some((digits.parse().ok()?, len))
}

fn closing_for(open: char) -> Option<char> {
    match open {
        '"' => Some('"'),
        '“' => Some('”'),
        '\'' => Some('\''),
        _ => None,
    }
}

/// Removes quoted spans, replacing each by a placeholder carrying its ordinal.
///
/// Straight quotes are symmetric, so their role is decided by the flanking
/// characters: a straight quote can only close when the next character is not
/// an ASCII letter or digit. A single quote only opens when the previous
/// character is not an ASCII letter or digit, so apostrophes inside words are
/// left alone.
pub fn extract_quotations(text: &str) -> Result<MaskedText, QuoteError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len());
    let mut quotes = Vec::new();
    let mut open: Option<(usize, char)> = None;
    let mut current = String::new();

    let word_char = |i: Option<usize>| i.and_then(|i| chars.get(i)).is_some_and(|c| c.is_ascii_alphanumeric());

    for (i, &c) in chars.iter().enumerate() {
        let prev_is_word = i > 0 && word_char(Some(i - 1));
        let next_is_word = word_char(Some(i + 1));
        match open {
            Some((_, opener)) => {
                let closer = closing_for(opener).expect("opener has a closer");
                if c == closer {
                    let symmetric = opener == closer;
                    if !symmetric || !next_is_word {
                        quotes.push(std::mem::take(&mut current));
                        out.push_str(&placeholder(quotes.len() - 1));
                        open = None;
                        continue;
                    }
                    // A straight quote glued to a following word reads as an
                    // opener, which cannot nest.
                    if opener == '"' || !prev_is_word {
                        return Err(QuoteError::UnbalancedQuote { position: i, delimiter: c });
                    }
                    current.push(c);
                } else {
                    current.push(c);
                }
            }
            None => {
                let opens = match c {
                    '"' | '“' => true,
                    '\'' => !prev_is_word,
                    _ => false,
                };
                if opens {
                    open = Some((i, c));
                } else {
                    out.push(c);
                }
            }
        }
    }
    if let Some((start, opener)) = open {
        return Err(QuoteError::UnbalancedQuote { position: start, delimiter: opener });
    }
    Ok(MaskedText { text: out, quotes })
}

// ---------------------------------------------------------------------------
// Segmentation

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Token {
    Text(String),
    Quote(usize),
}

impl Token {
    pub fn surface(&self) -> String {
        match self {
            Token::Text(s) => s.clone(),
            Token::Quote(k) => placeholder(*k),
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.surface())
    }
}

/// Scripts written without spaces between words.
pub fn is_unsegmented_char(c: char) -> bool {
    matches!(c as u32,
        0x0E00..=0x0E7F      // Thai
        | 0x3000..=0x303F    // CJK symbols and punctuation
        | 0x3040..=0x30FF    // kana
        | 0x3400..=0x4DBF
        | 0x4E00..=0x9FFF
        | 0xF900..=0xFAFF
        | 0xFF00..=0xFFEF    // full-width forms
        | 0x20000..=0x2FA1F)
}

fn is_ordinal_numeral(s: &str) -> bool {
    let digits = s.chars().take_while(|c| c.is_ascii_digit()).count();
    digits > 0 && matches!(s[digits..].to_ascii_lowercase().as_str(), "st" | "nd" | "rd" | "th")
}

/// Splits a chunk of Latin-script text into letter runs, digit runs and
/// single punctuation characters.
fn split_latin(piece: &str, out: &mut Vec<Token>) {
    if is_ordinal_numeral(piece) {
        out.push(Token::Text(piece.to_owned()));
        return;
    }
    #[derive(PartialEq, Clone, Copy)]
    enum Kind {
        Letter,
        Digit,
    }
    let mut run = String::new();
    let mut run_kind = None;
    let flush = |run: &mut String, out: &mut Vec<Token>| {
        if !run.is_empty() {
            out.push(Token::Text(std::mem::take(run)));
        }
    };
    for c in piece.chars() {
        let kind = if c.is_ascii_digit() {
            Some(Kind::Digit)
        } else if c.is_alphanumeric() || c == '\'' {
            Some(Kind::Letter)
        } else {
            None
        };
        match kind {
            Some(k) if run_kind == Some(k) || run.is_empty() => {
                run.push(c);
                run_kind = Some(k);
            }
            Some(k) => {
                flush(&mut run, out);
                run.push(c);
                run_kind = Some(k);
            }
            None => {
                flush(&mut run, out);
                run_kind = None;
                out.push(Token::Text(c.to_string()));
            }
        }
    }
    flush(&mut run, out);
}

/// Forward maximum matching over text written without spaces.
///
/// ASCII digit runs are atomic tokens. A maximal run of characters at which
/// no dictionary form starts becomes a single token.
pub fn forward_maximum_match(piece: &str, lexicon: &Lexicon) -> Vec<String> {
    let chars: Vec<char> = piece.chars().collect();
    let mut out = Vec::new();
    let mut unknown = String::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i].is_ascii_digit() {
            if !unknown.is_empty() {
                out.push(std::mem::take(&mut unknown));
            }
            let end = (i..chars.len()).find(|&j| !chars[j].is_ascii_digit()).unwrap_or(chars.len());
            out.push(chars[i..end].iter().collect());
            i = end;
            continue;
        }
        let longest = (1..=lexicon.max_form_chars.min(chars.len() - i))
            .rev()
            .find(|&len| lexicon.is_form(&chars[i..i + len].iter().collect::<String>()));
        match longest {
            Some(len) => {
                if !unknown.is_empty() {
                    out.push(std::mem::take(&mut unknown));
                }
                out.push(chars[i..i + len].iter().collect());
                i += len;
            }
            None => {
                unknown.push(chars[i]);
                i += 1;
            }
        }
    }
    if !unknown.is_empty() {
        out.push(unknown);
    }
    out
}

/// Splits masked text into tokens.
///
/// Whitespace-separated chunks are split further at placeholder, digit and
/// punctuation boundaries (unless the chunk is itself a dictionary form);
/// chunks in unsegmented scripts go through forward maximum matching; finally
/// adjacent tokens that jointly form a multi-word dictionary form are merged,
/// longest match first.
pub fn segment(masked: &str, lexicon: &Lexicon) -> Vec<Token> {
    let mut raw = Vec::new();
    for chunk in masked.split_whitespace() {
        let mut rest = chunk;
        while !rest.is_empty() {
            if let Some((ordinal, len)) = parse_placeholder(rest) {
                raw.push(Token::Quote(ordinal));
                rest = &rest[len..];
                continue;
            }
            let end = rest.char_indices().skip(1).map(|(p, _)| p).find(|&p| parse_placeholder(&rest[p..]).is_some());
            let (piece, tail) = rest.split_at(end.unwrap_or(rest.len()));
            if lexicon.is_form(piece) {
                raw.push(Token::Text(piece.to_owned()));
            } else if piece.chars().any(is_unsegmented_char) {
                raw.extend(forward_maximum_match(piece, lexicon).into_iter().map(Token::Text));
            } else {
                split_latin(piece, &mut raw);
            }
            rest = tail;
        }
    }
    merge_multiword(raw, lexicon)
}

fn merge_multiword(raw: Vec<Token>, lexicon: &Lexicon) -> Vec<Token> {
    let max = lexicon.max_form_words();
    if max <= 1 {
        return raw;
    }
    let mut out = Vec::with_capacity(raw.len());
    let mut i = 0;
    while i < raw.len() {
        let mut merged = None;
        for n in (2..=max.min(raw.len() - i)).rev() {
            let window = &raw[i..i + n];
            if window.iter().any(|t| matches!(t, Token::Quote(_))) {
                continue;
            }
            let joined = window.iter().map(Token::surface).collect::<Vec<_>>().join(" ");
            if lexicon.is_form(&joined) {
                merged = Some((joined, n));
                break;
            }
        }
        match merged {
            Some((joined, n)) => {
                out.push(Token::Text(joined));
                i += n;
            }
            None => {
                out.push(raw[i].clone());
                i += 1;
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Indexing

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ElementKind {
    Word,
    QuotationTemp,
    NumberTemp,
    UnknownSpan,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexedElement {
    pub kind: ElementKind,
    pub index: Option<WordIndex>,
    pub surface: String,
}

impl IndexedElement {
    pub fn word(index: WordIndex, surface: impl Into<String>) -> Self {
        IndexedElement { kind: ElementKind::Word, index: Some(index), surface: surface.into() }
    }

    pub fn quotation(index: WordIndex, surface: impl Into<String>) -> Self {
        IndexedElement { kind: ElementKind::QuotationTemp, index: Some(index), surface: surface.into() }
    }

    pub fn number(index: WordIndex, surface: impl Into<String>) -> Self {
        IndexedElement { kind: ElementKind::NumberTemp, index: Some(index), surface: surface.into() }
    }

    pub fn unknown(surface: impl Into<String>) -> Self {
        IndexedElement { kind: ElementKind::UnknownSpan, index: None, surface: surface.into() }
    }

    pub fn is_word(&self, index: WordIndex) -> bool {
        self.kind == ElementKind::Word && self.index == Some(index)
    }
}

/// The sentence as integer-indexed elements plus the quotation texts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexStream {
    pub elements: Vec<IndexedElement>,
    pub quotations: BTreeMap<WordIndex, String>,
    pub language_id: String,
}

impl IndexStream {
    /// The index sequence, or `None` if any element is an unknown span.
    pub fn index_list(&self) -> Option<Vec<WordIndex>> {
        self.elements.iter().map(|e| e.index).collect()
    }

    pub fn unknown_spans(&self) -> impl Iterator<Item = (usize, &IndexedElement)> {
        self.elements.iter().enumerate().filter(|(_, e)| e.kind == ElementKind::UnknownSpan)
    }

    pub fn with_elements(&self, elements: Vec<IndexedElement>) -> IndexStream {
        IndexStream { elements, quotations: self.quotations.clone(), language_id: self.language_id.clone() }
    }
}

pub fn index_tokens(tokens: &[Token], quotes: &[String], lexicon: &Lexicon) -> IndexStream {
    let mut quotations = BTreeMap::new();
    let elements = tokens
        .iter()
        .map(|t| match t {
            Token::Quote(k) => {
                let index = QUOTE_TEMP_BASE + *k as WordIndex;
                quotations.insert(index, quotes.get(*k).cloned().unwrap_or_default());
                IndexedElement::quotation(index, t.surface())
            }
            Token::Text(s) => match lexicon.lookup(s) {
                Some(index) => IndexedElement::word(index, s.clone()),
                None => IndexedElement::unknown(s.clone()),
            },
        })
        .collect();
    IndexStream { elements, quotations, language_id: lexicon.language_id().to_owned() }
}

/// Output of the whole syntactic layer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SyntacticOutput {
    pub masked: MaskedText,
    pub tokens: Vec<Token>,
    pub stream: IndexStream,
}

pub fn analyze(text: &str, lexicon: &Lexicon) -> Result<SyntacticOutput, QuoteError> {
    let masked = extract_quotations(text)?;
    let tokens = segment(&masked.text, lexicon);
    let stream = index_tokens(&tokens, &masked.quotes, lexicon);
    Ok(SyntacticOutput { masked, tokens, stream })
}
