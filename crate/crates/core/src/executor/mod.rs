//! Maps frames onto adapter capabilities and runs them against app state.

pub mod editor;
pub mod shapes;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::explainer::{CommandFrame, ObjectRef};
use crate::lexicon::{Lexicon, WordIndex, QUOTE_TEMP_BASE, QUOTE_TEMP_MAX};
use crate::numformat::{NumFormat, NumFrame, NumKind, NumValues};

pub use editor::{EditorState, Style, StyleSpan};
pub use shapes::{SceneObject, SceneState};

/// Concept every quotation maps to.
pub const TEXT_CONCEPT: &str = "text";

/// How an adapter verifies a condition preposition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConditionKind {
    /// Restricts the command to numbered items of a unit (lines, paragraphs).
    Scope,
    /// Items must contain every quoted string.
    ContainsAll,
    /// Names the target concept of a transformation.
    Target,
    /// Supplies a named numeric parameter.
    Param(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StateKind {
    Editor,
    Scene,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdapterDescriptor {
    pub id: String,
    pub state: StateKind,
    /// (action index, primary concept) to handler id.
    pub capabilities: BTreeMap<(WordIndex, String), String>,
    /// Object index to concept name.
    pub concepts: BTreeMap<WordIndex, String>,
    pub conditions: BTreeMap<WordIndex, ConditionKind>,
}

/// Application state owned by a session.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AppState {
    Editor(EditorState),
    Scene(SceneState),
}

impl AppState {
    pub fn empty(kind: StateKind) -> Self {
        match kind {
            StateKind::Editor => AppState::Editor(EditorState::default()),
            StateKind::Scene => AppState::Scene(SceneState::default()),
        }
    }

    /// Number of addressable items of `unit`, if the state has that unit.
    pub fn extent(&self, unit: &str) -> Option<usize> {
        match self {
            AppState::Editor(doc) => doc.extent(unit),
            AppState::Scene(scene) => (unit == "object").then_some(scene.objects.len()),
        }
    }

    /// Zero-based item the relative frame counts from.
    pub fn cursor(&self) -> usize {
        match self {
            AppState::Editor(doc) => doc.selection.map_or(0, |(start, _)| start),
            AppState::Scene(_) => 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolvedObject {
    pub index: WordIndex,
    pub concept: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub text: Option<String>,
}

/// A scope condition resolved to zero-based item numbers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scope {
    pub unit: String,
    pub items: BTreeSet<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Arguments {
    pub action: WordIndex,
    pub primary: ResolvedObject,
    pub secondary: Option<ResolvedObject>,
    /// Conjunction of all scope conditions; `None` means every item.
    pub scope: Option<Scope>,
    pub must_contain: Vec<String>,
    pub target: Option<String>,
    pub params: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolvedOperation {
    pub adapter: String,
    pub handler: String,
    pub args: Arguments,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolveError {
    #[error("no adapter concept for {name:?} ({index})")]
    UnmappedObject { index: WordIndex, name: String },
    #[error("adapter cannot apply action {action} to {concept:?}")]
    UnsupportedAction { action: WordIndex, concept: String },
    #[error("condition {prep} cannot be verified: {reason}")]
    UnverifiableCondition { prep: WordIndex, reason: String },
    #[error("{unit} {requested} out of bounds (1..={extent})")]
    RangeOutOfBounds { unit: String, requested: i64, extent: usize },
}

impl ResolveError {
    pub fn kind(&self) -> &'static str {
        match self {
            ResolveError::UnmappedObject { .. } => "UnmappedObject",
            ResolveError::UnsupportedAction { .. } => "UnsupportedAction",
            ResolveError::UnverifiableCondition { .. } => "UnverifiableCondition",
            ResolveError::RangeOutOfBounds { .. } => "RangeOutOfBounds",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExecError {
    #[error("target state error: {0}")]
    TargetStateError(String),
    #[error("missing argument: {0}")]
    MissingArgument(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown adapter or handler: {0}")]
    UnknownHandler(String),
}

impl ExecError {
    pub fn kind(&self) -> &'static str {
        match self {
            ExecError::TargetStateError(_) => "TargetStateError",
            ExecError::MissingArgument(_) => "MissingArgument",
            ExecError::InvalidParameter(_) => "InvalidParameter",
            ExecError::UnknownHandler(_) => "UnknownHandler",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistryError {
    #[error("adapter {0:?} is already registered")]
    DuplicateAdapterId(String),
    #[error("capability names handler {handler:?}, which adapter {adapter:?} does not provide")]
    DanglingHandler { adapter: String, handler: String },
}

impl RegistryError {
    pub fn kind(&self) -> &'static str {
        match self {
            RegistryError::DuplicateAdapterId(_) => "DuplicateAdapterId",
            RegistryError::DanglingHandler { .. } => "DanglingHandler",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorInfo {
    pub kind: String,
    pub detail: String,
}

impl ErrorInfo {
    pub fn new(kind: &str, detail: impl fmt::Display) -> Self {
        ErrorInfo { kind: kind.to_owned(), detail: detail.to_string() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecutionResult {
    pub ok: bool,
    pub handler: String,
    pub affected: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<ErrorInfo>,
}

/// An operation an adapter can perform.
pub trait Handler: Send + Sync {
    /// Applies the operation; returns the number of affected items.
    fn run(&self, args: &Arguments, state: &mut AppState) -> Result<usize, ExecError>;
}

impl<F> Handler for F
where
    F: Fn(&Arguments, &mut AppState) -> Result<usize, ExecError> + Send + Sync,
{
    fn run(&self, args: &Arguments, state: &mut AppState) -> Result<usize, ExecError> {
        self(args, state)
    }
}

pub type HandlerMap = BTreeMap<String, Arc<dyn Handler>>;

#[derive(Clone)]
pub struct Adapter {
    pub descriptor: AdapterDescriptor,
    handlers: HandlerMap,
}

impl fmt::Debug for Adapter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Adapter")
            .field("descriptor", &self.descriptor)
            .field("handlers", &self.handlers.keys().collect::<Vec<_>>())
            .finish()
    }
}

impl Adapter {
    pub fn initial_state(&self) -> AppState {
        AppState::empty(self.descriptor.state)
    }
}

/// Adapters by id. Immutable once built; registration returns a new registry.
#[derive(Clone, Debug, Default)]
pub struct AdapterRegistry {
    adapters: BTreeMap<String, Adapter>,
}

impl PartialEq for AdapterRegistry {
    fn eq(&self, other: &Self) -> bool {
        self.adapters.len() == other.adapters.len()
            && self.adapters.iter().zip(&other.adapters).all(|((a, x), (b, y))| {
                a == b && x.descriptor == y.descriptor && x.handlers.keys().eq(y.handlers.keys())
            })
    }
}

impl AdapterRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register_adapter(&self, descriptor: AdapterDescriptor, handlers: HandlerMap) -> Result<Self, RegistryError> {
        if self.adapters.contains_key(&descriptor.id) {
            return Err(RegistryError::DuplicateAdapterId(descriptor.id));
        }
        if let Some(handler) = descriptor.capabilities.values().find(|h| !handlers.contains_key(*h)) {
            return Err(RegistryError::DanglingHandler { adapter: descriptor.id.clone(), handler: handler.clone() });
        }
        let mut next = self.clone();
        next.adapters.insert(descriptor.id.clone(), Adapter { descriptor, handlers });
        Ok(next)
    }

    pub fn get(&self, id: &str) -> Option<&Adapter> {
        self.adapters.get(id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.adapters.contains_key(id)
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.adapters.keys().map(String::as_str)
    }
}

fn is_quotation(index: WordIndex) -> bool {
    (QUOTE_TEMP_BASE..=QUOTE_TEMP_MAX).contains(&index)
}

fn object_concept(obj: &ObjectRef, d: &AdapterDescriptor, lexicon: &Lexicon) -> Result<ResolvedObject, ResolveError> {
    if is_quotation(obj.index) {
        return Ok(ResolvedObject { index: obj.index, concept: TEXT_CONCEPT.into(), text: obj.quote.clone() });
    }
    concept_of(obj.index, d, lexicon).map(|concept| ResolvedObject { index: obj.index, concept, text: None })
}

fn concept_of(index: WordIndex, d: &AdapterDescriptor, lexicon: &Lexicon) -> Result<String, ResolveError> {
    d.concepts
        .get(&index)
        .cloned()
        .ok_or_else(|| ResolveError::UnmappedObject { index, name: lexicon.name_of(index) })
}

/// Resolves a number format to zero-based items within `extent`.
pub fn resolve_items(nf: &NumFormat, extent: usize, cursor: usize, unit: &str) -> Result<BTreeSet<usize>, ResolveError> {
    let out_of_bounds = |requested: i64| ResolveError::RangeOutOfBounds { unit: unit.to_owned(), requested, extent };
    let values = match &nf.values {
        NumValues::All => return Ok((0..extent).collect()),
        NumValues::List(v) => v.clone(),
    };
    let wanted: Vec<i64> = match (nf.kind, nf.frame) {
        (NumKind::Range, _) if values.len() == 2 => (values[0]..=values[1]).collect(),
        _ => values,
    };
    let mut items = BTreeSet::new();
    for v in wanted {
        let zero_based = match nf.frame {
            NumFrame::Absolute => v - 1,
            NumFrame::Relative if v < 0 => extent as i64 + v,
            NumFrame::Relative => cursor as i64 + v,
        };
        if zero_based < 0 || zero_based >= extent as i64 {
            return Err(out_of_bounds(if nf.frame == NumFrame::Absolute { v } else { zero_based + 1 }));
        }
        items.insert(zero_based as usize);
    }
    Ok(items)
}

/// Checks a frame against an adapter and a state snapshot.
///
/// Order of checks: primary concept, capability, secondary concept, then
/// each condition in frame order.
pub fn resolve(
    frame: &CommandFrame,
    adapter: &Adapter,
    state: &AppState,
    lexicon: &Lexicon,
) -> Result<ResolvedOperation, ResolveError> {
    let d = &adapter.descriptor;
    let primary = object_concept(&frame.primary, d, lexicon)?;
    let handler = d
        .capabilities
        .get(&(frame.action, primary.concept.clone()))
        .cloned()
        .ok_or_else(|| ResolveError::UnsupportedAction { action: frame.action, concept: primary.concept.clone() })?;
    let secondary = frame.secondary.as_ref().map(|s| object_concept(s, d, lexicon)).transpose()?;

    let mut args = Arguments {
        action: frame.action,
        primary,
        secondary,
        scope: None,
        must_contain: Vec::new(),
        target: None,
        params: BTreeMap::new(),
    };
    for cond in &frame.conditions {
        let prep = cond.prep;
        let unverifiable = |reason: &str| ResolveError::UnverifiableCondition { prep, reason: reason.to_owned() };
        let kind = d.conditions.get(&prep).ok_or_else(|| unverifiable("preposition not in the adapter's vocabulary"))?;
        match kind {
            ConditionKind::Scope => {
                let nf = cond.numformat.as_ref().ok_or_else(|| unverifiable("no number"))?;
                let unit_index = *cond.indices.last().ok_or_else(|| unverifiable("no unit"))?;
                let unit = concept_of(unit_index, d, lexicon)?;
                let extent = state.extent(&unit).ok_or_else(|| unverifiable(&format!("state has no {unit} unit")))?;
                let items = resolve_items(nf, extent, state.cursor(), &unit)?;
                args.scope = Some(match args.scope.take() {
                    None => Scope { unit, items },
                    Some(prev) if prev.unit == unit => {
                        Scope { unit, items: prev.items.intersection(&items).copied().collect() }
                    }
                    Some(_) => return Err(unverifiable("scopes over different units")),
                });
            }
            ConditionKind::ContainsAll => {
                args.must_contain.extend(cond.quotes.iter().flatten().cloned());
            }
            ConditionKind::Target => {
                let noun = *cond.indices.get(1).ok_or_else(|| unverifiable("no target"))?;
                args.target = Some(concept_of(noun, d, lexicon)?);
            }
            ConditionKind::Param(name) => {
                let value = match cond.numformat.as_ref() {
                    Some(NumFormat { kind: NumKind::Cardinal, values: NumValues::List(v), frame: NumFrame::Absolute }) => v[0],
                    _ => return Err(unverifiable("parameter needs a plain number")),
                };
                args.params.insert(name.clone(), value as f64);
            }
        }
    }
    Ok(ResolvedOperation { adapter: d.id.clone(), handler, args })
}

/// Runs a resolved operation. The state is replaced only on success.
pub fn execute(op: &ResolvedOperation, registry: &AdapterRegistry, state: &mut AppState) -> ExecutionResult {
    let outcome = registry
        .get(&op.adapter)
        .and_then(|a| a.handlers.get(&op.handler))
        .ok_or_else(|| ExecError::UnknownHandler(format!("{}/{}", op.adapter, op.handler)))
        .and_then(|h| {
            let mut scratch = state.clone();
            let affected = h.run(&op.args, &mut scratch)?;
            *state = scratch;
            Ok(affected)
        });
    match outcome {
        Ok(affected) => ExecutionResult { ok: true, handler: op.handler.clone(), affected, error: None },
        Err(e) => ExecutionResult {
            ok: false,
            handler: op.handler.clone(),
            affected: 0,
            error: Some(ErrorInfo::new(e.kind(), &e)),
        },
    }
}

/// The built-in editor and shapes adapters.
pub fn builtin_registry() -> AdapterRegistry {
    AdapterRegistry::new()
        .register_adapter(editor::descriptor(), editor::handlers())
        .and_then(|r| r.register_adapter(shapes::descriptor(), shapes::handlers()))
        .expect("built-in adapters are consistent")
}
