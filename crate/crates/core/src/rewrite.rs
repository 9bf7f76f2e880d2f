//! Wildcard rewrite rules over index streams.
//!
//! Rule text is `[name:] LHS -> RHS`. LHS tokens are surface words or
//! `@<index>` literals and the wildcards
//!
//! * `?N` one element,
//! * `*N` zero or more elements, lazily,
//! * `#N:<class>` one temporary of a class (`QUOTE`, `NUM`, or a declared class),
//! * `!N:<pos>` one word whose entry carries that part-of-speech tag.
//!
//! RHS tokens are literals and slot references `$N`. A `;` starts a comment.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::{ElementKind, IndexStream, IndexedElement, Lexicon, WordIndex};

pub const MAX_PASSES: usize = 100;

pub type Slot = u32;

/// Extra temporary classes: class id to the indices it admits.
pub type TempClasses = BTreeMap<String, BTreeSet<WordIndex>>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PatternElem {
    Literal(WordIndex),
    AnyOne(Slot),
    Star(Slot),
    TempClass { slot: Slot, class: String },
    Pos { slot: Slot, tag: String },
}

impl PatternElem {
    fn slot(&self) -> Option<Slot> {
        match self {
            PatternElem::Literal(_) => None,
            PatternElem::AnyOne(s) | PatternElem::Star(s) => Some(*s),
            PatternElem::TempClass { slot, .. } | PatternElem::Pos { slot, .. } => Some(*slot),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RhsElem {
    Literal(WordIndex),
    SlotRef(Slot),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RuleScope {
    General,
    Specific(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewriteRule {
    pub name: String,
    pub lhs: Vec<PatternElem>,
    pub rhs: Vec<RhsElem>,
    pub scope: RuleScope,
    pub priority: i64,
}

impl RewriteRule {
    fn order_key(&self) -> (&RuleScope, i64, &str) {
        (&self.scope, self.priority, &self.name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("rule syntax error in {rule:?}: {message}")]
    Syntax { rule: String, message: String },
    #[error("word {word:?} in rule {rule:?} is not in the lexicon")]
    UnknownWordInRule { rule: String, word: String },
    #[error("slot {slot} bound twice in rule {rule:?}")]
    DuplicateSlot { rule: String, slot: Slot },
    #[error("${slot} in rule {rule:?} is not bound on the left-hand side")]
    UnboundSlotRef { rule: String, slot: Slot },
    #[error("${slot} used more than once in rule {rule:?}")]
    RepeatedSlotRef { rule: String, slot: Slot },
    #[error("unknown temporary class {class:?} in rule {rule:?}")]
    UnknownTempClass { rule: String, class: String },
    #[error("rule {rule:?} has an empty left-hand side")]
    EmptyPattern { rule: String },
}

impl RuleError {
    pub fn kind(&self) -> &'static str {
        match self {
            RuleError::Syntax { .. } => "Syntax",
            RuleError::UnknownWordInRule { .. } => "UnknownWordInRule",
            RuleError::DuplicateSlot { .. } => "DuplicateSlot",
            RuleError::UnboundSlotRef { .. } => "UnboundSlotRef",
            RuleError::RepeatedSlotRef { .. } => "RepeatedSlotRef",
            RuleError::UnknownTempClass { .. } => "UnknownTempClass",
            RuleError::EmptyPattern { .. } => "EmptyPattern",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("no fixpoint after {passes} passes; last rule fired: {last_rule}")]
    FixpointExceeded { passes: usize, last_rule: String },
}

impl RewriteError {
    pub fn kind(&self) -> &'static str {
        "FixpointExceeded"
    }
}

const BUILTIN_CLASSES: [&str; 2] = ["QUOTE", "NUM"];

fn parse_slot(token: &str, rule: &str) -> Result<Slot, RuleError> {
    token.parse().map_err(|_| RuleError::Syntax { rule: rule.to_owned(), message: format!("bad slot number in {token:?}") })
}

fn literal(token: &str, rule: &str, lexicon: &Lexicon) -> Result<WordIndex, RuleError> {
    if let Some(n) = token.strip_prefix('@') {
        return n
            .parse()
            .map_err(|_| RuleError::Syntax { rule: rule.to_owned(), message: format!("bad index literal {token:?}") });
    }
    lexicon
        .lookup(token)
        .ok_or_else(|| RuleError::UnknownWordInRule { rule: rule.to_owned(), word: token.to_owned() })
}

/// Compiles one rule with built-in temporary classes only, in the general scope.
pub fn compile_rule(text: &str, lexicon: &Lexicon) -> Result<RewriteRule, RuleError> {
    compile_rule_in(text, lexicon, &TempClasses::new(), RuleScope::General, 0)
}

pub fn compile_rule_in(
    text: &str,
    lexicon: &Lexicon,
    classes: &TempClasses,
    scope: RuleScope,
    priority: i64,
) -> Result<RewriteRule, RuleError> {
    let text = text.split(';').next().unwrap_or_default().trim();
    let syntax = |message: &str| RuleError::Syntax { rule: text.to_owned(), message: message.to_owned() };
    let (label, body) = match text.split_once(char::is_whitespace) {
        Some((head, rest)) if head.len() > 1 && head.ends_with(':') => (Some(&head[..head.len() - 1]), rest.trim()),
        _ => (None, text),
    };
    let (lhs_text, rhs_text) = body.split_once("->").ok_or_else(|| syntax("missing `->`"))?;
    if rhs_text.contains("->") {
        return Err(syntax("more than one `->`"));
    }

    let mut lhs = Vec::new();
    let mut bound = BTreeSet::new();
    for token in lhs_text.split_whitespace() {
        let elem = if let Some(n) = token.strip_prefix('?') {
            PatternElem::AnyOne(parse_slot(n, text)?)
        } else if let Some(n) = token.strip_prefix('*') {
            PatternElem::Star(parse_slot(n, text)?)
        } else if let Some(rest) = token.strip_prefix('#') {
            let (n, class) = rest.split_once(':').ok_or_else(|| syntax("`#N` needs a class, as in `#1:QUOTE`"))?;
            if !BUILTIN_CLASSES.contains(&class) && !classes.contains_key(class) {
                return Err(RuleError::UnknownTempClass { rule: text.to_owned(), class: class.to_owned() });
            }
            PatternElem::TempClass { slot: parse_slot(n, text)?, class: class.to_owned() }
        } else if let Some(rest) = token.strip_prefix('!') {
            let (n, tag) = rest.split_once(':').ok_or_else(|| syntax("`!N` needs a tag, as in `!1:Action`"))?;
            PatternElem::Pos { slot: parse_slot(n, text)?, tag: tag.to_owned() }
        } else {
            PatternElem::Literal(literal(token, text, lexicon)?)
        };
        if let Some(slot) = elem.slot() {
            if !bound.insert(slot) {
                return Err(RuleError::DuplicateSlot { rule: text.to_owned(), slot });
            }
        }
        lhs.push(elem);
    }

    let mut rhs = Vec::new();
    let mut used = BTreeSet::new();
    for token in rhs_text.split_whitespace() {
        if let Some(n) = token.strip_prefix('$') {
            let slot = parse_slot(n, text)?;
            if !bound.contains(&slot) {
                return Err(RuleError::UnboundSlotRef { rule: text.to_owned(), slot });
            }
            if !used.insert(slot) {
                return Err(RuleError::RepeatedSlotRef { rule: text.to_owned(), slot });
            }
            rhs.push(RhsElem::SlotRef(slot));
        } else {
            rhs.push(RhsElem::Literal(literal(token, text, lexicon)?));
        }
    }
    if lhs.is_empty() {
        return Err(RuleError::EmptyPattern { rule: text.to_owned() });
    }

    let name = label.map(str::to_owned).unwrap_or_else(|| body.split_whitespace().collect::<Vec<_>>().join(" "));
    Ok(RewriteRule { name, lhs, rhs, scope, priority })
}

/// Compiles a rule file; priority is the rule's position in the file.
pub fn compile_rules(
    source: &str,
    lexicon: &Lexicon,
    classes: &TempClasses,
    scope: RuleScope,
) -> Result<Vec<RewriteRule>, RuleError> {
    source
        .lines()
        .map(|l| l.split(';').next().unwrap_or_default().trim())
        .filter(|l| !l.is_empty())
        .enumerate()
        .map(|(i, l)| compile_rule_in(l, lexicon, classes, scope.clone(), i as i64))
        .collect()
}

/// Rules in firing order plus the temporary classes they may use.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleSet {
    rules: Vec<RewriteRule>,
    classes: TempClasses,
}

impl RuleSet {
    pub fn new(rules: Vec<RewriteRule>) -> Self {
        Self::with_classes(rules, TempClasses::new())
    }

    pub fn with_classes(mut rules: Vec<RewriteRule>, classes: TempClasses) -> Self {
        rules.sort_by(|a, b| a.order_key().cmp(&b.order_key()));
        RuleSet { rules, classes }
    }

    pub fn rules(&self) -> &[RewriteRule] {
        &self.rules
    }

    pub fn classes(&self) -> &TempClasses {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn extended(&self, rules: Vec<RewriteRule>, classes: &TempClasses) -> RuleSet {
        let mut all = self.rules.clone();
        all.extend(rules);
        let mut merged = self.classes.clone();
        for (k, v) in classes {
            merged.entry(k.clone()).or_default().extend(v);
        }
        RuleSet::with_classes(all, merged)
    }

    pub fn without_scope(&self, scope: &RuleScope, classes: TempClasses) -> RuleSet {
        let rules = self.rules.iter().filter(|r| &r.scope != scope).cloned().collect();
        RuleSet::with_classes(rules, classes)
    }

    /// The general rules alone.
    pub fn general(&self) -> RuleSet {
        let rules = self.rules.iter().filter(|r| r.scope == RuleScope::General).cloned().collect();
        RuleSet::with_classes(rules, self.classes.clone())
    }
}

/// A successful match: the span it covers and what each slot bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Match {
    pub start: usize,
    pub end: usize,
    pub bindings: BTreeMap<Slot, Vec<IndexedElement>>,
}

struct Matcher<'a> {
    elements: &'a [IndexedElement],
    lexicon: &'a Lexicon,
    classes: &'a TempClasses,
}

impl Matcher<'_> {
    fn single(&self, elem: &PatternElem, e: &IndexedElement) -> bool {
        match elem {
            PatternElem::Literal(idx) => e.kind == ElementKind::Word && e.index == Some(*idx),
            PatternElem::AnyOne(_) => true,
            PatternElem::Star(_) => unreachable!("stars are matched by extent"),
            PatternElem::TempClass { class, .. } => match class.as_str() {
                "QUOTE" => e.kind == ElementKind::QuotationTemp,
                "NUM" => e.kind == ElementKind::NumberTemp,
                other => e.index.is_some_and(|i| self.classes.get(other).is_some_and(|set| set.contains(&i))),
            },
            PatternElem::Pos { tag, .. } => {
                e.kind == ElementKind::Word
                    && e.index.and_then(|i| self.lexicon.entry(i)).is_some_and(|entry| &entry.pos_tag == tag)
            }
        }
    }

    /// Backtracking match of `pattern` at `pos`; returns the end position.
    fn run(&self, pattern: &[PatternElem], pos: usize, spans: &mut Vec<(Slot, usize, usize)>) -> Option<usize> {
        let Some((first, rest)) = pattern.split_first() else {
            return Some(pos);
        };
        if let PatternElem::Star(slot) = first {
            for end in pos..=self.elements.len() {
                spans.push((*slot, pos, end));
                if let Some(done) = self.run(rest, end, spans) {
                    return Some(done);
                }
                spans.pop();
            }
            return None;
        }
        let e = self.elements.get(pos)?;
        if !self.single(first, e) {
            return None;
        }
        if let Some(slot) = first.slot() {
            spans.push((slot, pos, pos + 1));
        }
        let done = self.run(rest, pos + 1, spans);
        if done.is_none() && first.slot().is_some() {
            spans.pop();
        }
        done
    }
}

pub fn match_at(rule: &RewriteRule, stream: &IndexStream, position: usize, lexicon: &Lexicon) -> Option<Match> {
    match_elements(rule, &stream.elements, position, lexicon, &TempClasses::new())
}

fn match_elements(
    rule: &RewriteRule,
    elements: &[IndexedElement],
    position: usize,
    lexicon: &Lexicon,
    classes: &TempClasses,
) -> Option<Match> {
    if position > elements.len() {
        return None;
    }
    let matcher = Matcher { elements, lexicon, classes };
    let mut spans = Vec::new();
    let end = matcher.run(&rule.lhs, position, &mut spans)?;
    let bindings = spans.into_iter().map(|(slot, s, e)| (slot, elements[s..e].to_vec())).collect();
    Some(Match { start: position, end, bindings })
}

fn instantiate(rule: &RewriteRule, m: &Match, lexicon: &Lexicon) -> Vec<IndexedElement> {
    let mut out = Vec::new();
    for r in &rule.rhs {
        match r {
            RhsElem::SlotRef(slot) => out.extend(m.bindings[slot].iter().cloned()),
            RhsElem::Literal(idx) => {
                let surface = lexicon.entry(*idx).map(|e| e.representative().to_owned()).unwrap_or_else(|| format!("@{idx}"));
                out.push(IndexedElement::word(*idx, surface));
            }
        }
    }
    out
}

/// One rule application.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Firing {
    pub rule: String,
    pub pass: usize,
    pub position: usize,
    /// Indices of the matched span; `null` marks an unknown span.
    pub before: Vec<Option<WordIndex>>,
    pub after: Vec<Option<WordIndex>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RewriteOutput {
    pub stream: IndexStream,
    pub trace: Vec<Firing>,
    pub passes: usize,
}

fn indices(elements: &[IndexedElement]) -> Vec<Option<WordIndex>> {
    elements.iter().map(|e| e.index).collect()
}

/// Rewrites to a fixpoint.
///
/// Each pass scans positions left to right and, at each position, tries
/// the rules in order. The first match that changes the stream is applied
/// and the next pass starts from the beginning.
pub fn apply_rules(rules: &RuleSet, stream: &IndexStream, lexicon: &Lexicon) -> Result<RewriteOutput, RewriteError> {
    let mut elements = stream.elements.clone();
    let mut trace = Vec::new();
    for pass in 1..=MAX_PASSES {
        let fired = 'scan: {
            for position in 0..=elements.len() {
                for rule in &rules.rules {
                    let Some(m) = match_elements(rule, &elements, position, lexicon, &rules.classes) else {
                        continue;
                    };
                    let replacement = instantiate(rule, &m, lexicon);
                    if replacement == elements[m.start..m.end] {
                        continue;
                    }
                    trace.push(Firing {
                        rule: rule.name.clone(),
                        pass,
                        position,
                        before: indices(&elements[m.start..m.end]),
                        after: indices(&replacement),
                    });
                    elements.splice(m.start..m.end, replacement);
                    break 'scan true;
                }
            }
            false
        };
        if !fired {
            return Ok(RewriteOutput { stream: stream.with_elements(elements), trace, passes: pass });
        }
    }
    let last_rule = trace.last().map(|f| f.rule.clone()).unwrap_or_default();
    Err(RewriteError::FixpointExceeded { passes: MAX_PASSES, last_rule })
}
