//! Failure recovery: implicit quotation, ranked suggestions, learned
//! synonyms and special expressions.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::explainer::CommandFrame;
use crate::lexicon::{normalize_form, ElementKind, IndexStream, Lexicon, WordClass, WordEntry, WordIndex};
use crate::par::{self, Strategy};

pub const DEFAULT_K: usize = 5;

/// Levenshtein distance over chars.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let b: Vec<char> = b.chars().collect();
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.chars().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let next = (row[j + 1] + 1).min(row[j] + 1).min(diag + usize::from(ca != *cb));
            diag = row[j + 1];
            row[j + 1] = next;
        }
    }
    row[b.len()]
}

/// Edit distance divided by the longer length, in `[0, 1]`.
pub fn edit_score(a: &str, b: &str) -> f64 {
    let longest = a.chars().count().max(b.chars().count());
    if longest == 0 {
        0.0
    } else {
        levenshtein(a, b) as f64 / longest as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct ThesaurusFile {
    max_hops: u32,
    edges: Vec<(WordIndex, WordIndex, f64)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ThesaurusError {
    #[error("thesaurus parse error: {0}")]
    Parse(String),
    #[error("edge {0}-{1} has a non-positive weight")]
    BadWeight(WordIndex, WordIndex),
}

/// Undirected weighted graph over dictionary indices.
#[derive(Clone, Debug, PartialEq)]
pub struct Thesaurus {
    max_hops: u32,
    adjacency: BTreeMap<WordIndex, Vec<(WordIndex, f64)>>,
}

#[derive(PartialEq)]
struct Frontier(f64, WordIndex);

impl Eq for Frontier {}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl Thesaurus {
    pub fn new(max_hops: u32, edges: &[(WordIndex, WordIndex, f64)]) -> Result<Self, ThesaurusError> {
        let mut adjacency: BTreeMap<WordIndex, Vec<(WordIndex, f64)>> = BTreeMap::new();
        for &(a, b, w) in edges {
            if w.is_nan() || w <= 0.0 {
                return Err(ThesaurusError::BadWeight(a, b));
            }
            adjacency.entry(a).or_default().push((b, w));
            adjacency.entry(b).or_default().push((a, w));
        }
        Ok(Thesaurus { max_hops, adjacency })
    }

    pub fn from_json(text: &str) -> Result<Self, ThesaurusError> {
        let f: ThesaurusFile = serde_json::from_str(text).map_err(|e| ThesaurusError::Parse(e.to_string()))?;
        Self::new(f.max_hops, &f.edges)
    }

    pub fn max_hops(&self) -> u32 {
        self.max_hops
    }

    /// Shortest weighted path length, if within `max_hops`.
    pub fn distance(&self, a: WordIndex, b: WordIndex) -> Option<f64> {
        if a == b {
            return Some(0.0);
        }
        let mut best: BTreeMap<WordIndex, f64> = BTreeMap::from([(a, 0.0)]);
        let mut heap = BinaryHeap::from([Frontier(0.0, a)]);
        while let Some(Frontier(d, node)) = heap.pop() {
            if node == b {
                return (d <= self.max_hops as f64).then_some(d);
            }
            if d > best[&node] {
                continue;
            }
            for &(next, w) in self.adjacency.get(&node).into_iter().flatten() {
                let nd = d + w;
                if best.get(&next).is_none_or(|&old| nd < old) {
                    best.insert(next, nd);
                    heap.push(Frontier(nd, next));
                }
            }
        }
        None
    }

    /// Path length scaled into `[0, 1)`.
    pub fn score(&self, a: WordIndex, b: WordIndex) -> Option<f64> {
        self.distance(a, b).map(|d| d / (self.max_hops as f64 + 1.0))
    }
}

/// Distance between a surface word and a dictionary entry.
pub fn word_distance(surface: &str, entry: &WordEntry, lexicon: &Lexicon, thesaurus: &Thesaurus) -> f64 {
    let surface = normalize_form(surface);
    if entry.forms.iter().any(|f| normalize_form(f) == surface) {
        return 0.0;
    }
    let edit = entry.forms.iter().map(|f| edit_score(&surface, &normalize_form(f))).fold(1.0, f64::min);
    match lexicon.lookup(&surface).and_then(|a| thesaurus.score(a, entry.index)) {
        Some(hops) => edit.min(hops),
        None => edit,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Suggestion {
    pub index: WordIndex,
    pub form: String,
    pub score: f64,
}

/// Entries that may be offered as suggestions.
pub fn is_candidate(entry: &WordEntry) -> bool {
    matches!(
        entry.class,
        WordClass::Action | WordClass::Noun | WordClass::Unit | WordClass::Preposition | WordClass::SwitchPreposition
    )
}

/// The `k` nearest entries, ascending by score then index.
pub fn suggest(
    surface: &str,
    lexicon: &Lexicon,
    thesaurus: &Thesaurus,
    k: usize,
    strategy: Strategy,
) -> Vec<Suggestion> {
    let entries: Vec<&WordEntry> = lexicon.entries().filter(|e| is_candidate(e)).collect();
    let mut scored = par::map(strategy, &entries, |e| Suggestion {
        index: e.index,
        form: e.representative().to_owned(),
        score: word_distance(surface, e, lexicon, thesaurus),
    });
    scored.sort_by(|a, b| a.score.total_cmp(&b.score).then(a.index.cmp(&b.index)));
    scored.truncate(k);
    scored
}

/// Rebuilds a sentence with every maximal run of unknown tokens quoted.
///
/// Returns `None` when the stream has no unknown tokens.
pub fn quote_unknown_runs(stream: &IndexStream) -> Option<String> {
    stream.unknown_spans().next()?;
    let wrap = |text: &str| {
        if !text.contains('"') {
            format!("\"{text}\"")
        } else {
            format!("“{text}”")
        }
    };
    let mut parts: Vec<String> = Vec::new();
    let mut run: Vec<&str> = Vec::new();
    for e in &stream.elements {
        if e.kind == ElementKind::UnknownSpan {
            run.push(&e.surface);
            continue;
        }
        if !run.is_empty() {
            parts.push(wrap(&run.join(" ")));
            run.clear();
        }
        match e.kind {
            ElementKind::QuotationTemp => {
                let text = e.index.and_then(|i| stream.quotations.get(&i)).map_or("", String::as_str);
                parts.push(wrap(text));
            }
            _ => parts.push(e.surface.clone()),
        }
    }
    if !run.is_empty() {
        parts.push(wrap(&run.join(" ")));
    }
    Some(parts.join(" "))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LearnedSynonym {
    pub surface: String,
    pub index: WordIndex,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecialExpression {
    pub original: String,
    pub rephrase: String,
    pub frame: CommandFrame,
    pub count: u32,
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("cannot read or write learner store: {0}")]
    Io(#[from] std::io::Error),
    #[error("learner store is malformed: {0}")]
    Parse(#[from] serde_json::Error),
}

/// What the learner remembers between sessions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LearnerStore {
    pub synonyms: Vec<LearnedSynonym>,
    pub special: Vec<SpecialExpression>,
}

impl LearnerStore {
    /// Loads a store; a missing file is an empty store.
    pub fn load(path: &Path) -> Result<Self, StoreError> {
        match fs::read_to_string(path) {
            Ok(text) => Ok(serde_json::from_str(&text)?),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Self::default()),
            Err(e) => Err(e.into()),
        }
    }

    pub fn save(&self, path: &Path) -> Result<(), StoreError> {
        let text = serde_json::to_string_pretty(self)? + "\n";
        fs::write(path, text)?;
        Ok(())
    }

    pub fn add_synonym(&mut self, surface: &str, index: WordIndex) {
        let surface = normalize_form(surface);
        if !self.synonyms.iter().any(|s| s.surface == surface) {
            self.synonyms.push(LearnedSynonym { surface, index });
        }
    }

    /// Adds the pairing or bumps its count.
    pub fn record_special_expression(&mut self, original: &str, rephrase: &str, frame: &CommandFrame) {
        if original == rephrase {
            return;
        }
        match self.special.iter_mut().find(|s| s.original == original) {
            Some(s) => {
                s.count += 1;
                s.rephrase = rephrase.to_owned();
                s.frame = frame.clone();
            }
            None => self.special.push(SpecialExpression {
                original: original.to_owned(),
                rephrase: rephrase.to_owned(),
                frame: frame.clone(),
                count: 1,
            }),
        }
    }

    pub fn special_for(&self, original: &str) -> Option<&SpecialExpression> {
        self.special.iter().find(|s| s.original == original)
    }

    /// Applies the learned synonyms that fit `lexicon`; the rest are kept
    /// for lexicons that do have their index.
    pub fn apply_synonyms(&self, lexicon: &Lexicon) -> Lexicon {
        self.synonyms
            .iter()
            .fold(lexicon.clone(), |lex, s| lex.add_synonym(s.index, &s.surface).unwrap_or(lex))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demo;
    use crate::lexicon::analyze;

    #[test]
    fn levenshtein_basics() {
        assert_eq!(levenshtein("replcae", "replace"), 2);
        assert_eq!(levenshtein("", "abc"), 3);
        assert_eq!(levenshtein("kitten", "sitting"), 3);
        assert_eq!(edit_score("", ""), 0.0);
    }

    #[test]
    fn forms_score_zero() {
        let lex = demo::english_lexicon();
        let th = demo::thesaurus();
        assert_eq!(word_distance("delete", lex.entry(1001).unwrap(), &lex, &th), 0.0);
        assert_eq!(word_distance("Remove", lex.entry(1001).unwrap(), &lex, &th), 0.0);
    }

    #[test]
    fn thesaurus_neighbours_are_close() {
        let lex = demo::english_lexicon();
        let th = demo::thesaurus();
        assert_eq!(th.distance(1001, 1030), Some(2.0));
        assert_eq!(th.distance(2015, 1001), None);
        let d = word_distance("paragraph", lex.entry(2015).unwrap(), &lex, &th);
        assert!((d - 0.25).abs() < 1e-12, "{d}");
    }

    #[test]
    fn suggestions_are_sorted_and_bounded() {
        let lex = demo::english_lexicon();
        let s = suggest("replcae", &lex, &demo::thesaurus(), DEFAULT_K, Strategy::Sequential);
        assert_eq!(s.len(), DEFAULT_K);
        assert_eq!(s[0].index, 1011);
        assert!(s.windows(2).all(|w| (w[0].score, w[0].index) <= (w[1].score, w[1].index)));
    }

    #[test]
    fn unknown_runs_become_quotations() {
        let lex = demo::english_lexicon();
        let stream = analyze(r#"replace green apple with "peach""#, &lex).unwrap().stream;
        assert_eq!(quote_unknown_runs(&stream).unwrap(), r#"replace "green apple" with "peach""#);
        let known = analyze("delete carriage returns", &lex).unwrap().stream;
        assert_eq!(quote_unknown_runs(&known), None);
    }

    #[test]
    fn special_expressions_count_up() {
        let lex = demo::english_lexicon();
        let frame = crate::pipeline::parse_frame(r#"delete "x""#, &lex, &demo::general_rules()).unwrap();
        let mut store = LearnerStore::default();
        store.record_special_expression("zap x", r#"delete "x""#, &frame);
        store.record_special_expression("zap x", r#"delete "x""#, &frame);
        store.record_special_expression("kill x", r#"delete "x""#, &frame);
        assert_eq!(store.special.len(), 2);
        assert_eq!(store.special_for("zap x").unwrap().count, 2);
        store.record_special_expression("same", "same", &frame);
        assert!(store.special_for("same").is_none());
    }
}
