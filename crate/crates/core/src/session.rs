//! One user's view of the engine: config snapshot, adapter state, learner
//! store and the recovery dialogue, with a trace for every command.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::config::{merge_suit, EngineConfig};
use crate::executor::{self, AppState, EditorState, ErrorInfo, ExecutionResult};
use crate::explainer::CommandFrame;
use crate::learner::{self, LearnerStore, StoreError, Suggestion, DEFAULT_K};
use crate::lexicon::{self, ElementKind, Lexicon, LexiconError, QuoteError, WordIndex};
use crate::par::Strategy;
use crate::pipeline::{run_kernel, KernelError, KernelRun, StageError, StageRecord};
use crate::suit::{parse_suit, Suit, SuitError};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WordSuggestions {
    pub surface: String,
    pub candidates: Vec<Suggestion>,
}

/// One step of the recovery cascade.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "stage")]
pub enum LearnerStage {
    /// Re-run with unknown words quoted. `text` is absent when there was
    /// nothing to quote.
    RetryAsQuotation {
        #[serde(skip_serializing_if = "Option::is_none", default)]
        text: Option<String>,
        ok: bool,
        stages: Vec<StageRecord>,
    },
    SuggestWords { suggestions: Vec<WordSuggestions> },
    AskRephrase { original: String },
    /// A rephrase succeeded and was paired with the failed original.
    CaptureSpecialExpression { original: String, rephrase: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status")]
pub enum Outcome {
    Executed { frame: CommandFrame, result: ExecutionResult },
    ExecutionFailed { frame: CommandFrame, result: ExecutionResult },
    AwaitingSelection { suggestions: Vec<WordSuggestions> },
    AwaitingRephrase { original: String },
    Failed { error: StageError },
}

impl Outcome {
    pub fn frame(&self) -> Option<&CommandFrame> {
        match self {
            Outcome::Executed { frame, .. } | Outcome::ExecutionFailed { frame, .. } => Some(frame),
            _ => None,
        }
    }

    pub fn status(&self) -> &'static str {
        match self {
            Outcome::Executed { .. } => "Executed",
            Outcome::ExecutionFailed { .. } => "ExecutionFailed",
            Outcome::AwaitingSelection { .. } => "AwaitingSelection",
            Outcome::AwaitingRephrase { .. } => "AwaitingRephrase",
            Outcome::Failed { .. } => "Failed",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineTrace {
    pub input: String,
    pub stages: Vec<StageRecord>,
    pub learner: Vec<LearnerStage>,
    pub outcome: Outcome,
}

impl PipelineTrace {
    /// True when the command went through without any recovery step.
    pub fn learner_free(&self) -> bool {
        self.learner.is_empty() && matches!(self.outcome, Outcome::Executed { .. })
    }
}

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("no adapter {0:?}")]
    UnknownAdapter(String),
    #[error("no suggestions are awaiting a selection")]
    NoPendingSelection,
    #[error("{index} was not suggested for {surface:?}")]
    NotSuggested { surface: String, index: WordIndex },
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error(transparent)]
    Suit(#[from] SuitError),
    #[error(transparent)]
    Store(#[from] StoreError),
}

impl SessionError {
    pub fn kind(&self) -> &'static str {
        match self {
            SessionError::UnknownAdapter(_) => "UnknownAdapter",
            SessionError::NoPendingSelection => "NoPendingSelection",
            SessionError::NotSuggested { .. } => "NotSuggested",
            SessionError::Lexicon(e) => e.kind(),
            SessionError::Suit(e) => e.kind(),
            SessionError::Store(_) => "StoreError",
        }
    }
}

#[derive(Clone, Debug)]
struct PendingSelection {
    trace: PipelineTrace,
    suggestions: Vec<WordSuggestions>,
}

#[derive(Clone, Debug)]
pub struct Session {
    config: Arc<EngineConfig>,
    lexicon: Lexicon,
    adapter_id: String,
    states: BTreeMap<String, AppState>,
    store: LearnerStore,
    store_path: Option<PathBuf>,
    selection: Option<PendingSelection>,
    rephrase_for: Option<String>,
    k: usize,
    strategy: Strategy,
}

impl Session {
    pub fn new(config: Arc<EngineConfig>, adapter_id: &str) -> Result<Self, SessionError> {
        let mut session = Session {
            lexicon: config.lexicon.clone(),
            config,
            adapter_id: String::new(),
            states: BTreeMap::new(),
            store: LearnerStore::default(),
            store_path: None,
            selection: None,
            rephrase_for: None,
            k: DEFAULT_K,
            strategy: Strategy::default(),
        };
        session.set_adapter(adapter_id)?;
        Ok(session)
    }

    /// Loads the learner store at `path` (missing means empty) and keeps
    /// writing it after every change.
    pub fn with_store(mut self, path: impl Into<PathBuf>) -> Result<Self, SessionError> {
        let path = path.into();
        self.store = LearnerStore::load(&path)?;
        self.store_path = Some(path);
        self.lexicon = self.store.apply_synonyms(&self.config.lexicon);
        Ok(self)
    }

    pub fn with_suggestion_count(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn config(&self) -> &Arc<EngineConfig> {
        &self.config
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn store(&self) -> &LearnerStore {
        &self.store
    }

    pub fn adapter_id(&self) -> &str {
        &self.adapter_id
    }

    pub fn state(&self) -> &AppState {
        &self.states[&self.adapter_id]
    }

    pub fn set_state(&mut self, state: AppState) {
        self.states.insert(self.adapter_id.clone(), state);
    }

    pub fn set_document(&mut self, doc: EditorState) {
        self.set_state(AppState::Editor(doc));
    }

    pub fn pending_suggestions(&self) -> Option<&[WordSuggestions]> {
        self.selection.as_ref().map(|p| p.suggestions.as_slice())
    }

    pub fn awaiting_rephrase(&self) -> Option<&str> {
        self.rephrase_for.as_deref()
    }

    pub fn set_adapter(&mut self, id: &str) -> Result<(), SessionError> {
        let adapter = self.config.registry.get(id).ok_or_else(|| SessionError::UnknownAdapter(id.to_owned()))?;
        self.states.entry(id.to_owned()).or_insert_with(|| adapter.initial_state());
        self.adapter_id = id.to_owned();
        Ok(())
    }

    /// Replaces the configuration snapshot, keeping learned synonyms.
    pub fn set_config(&mut self, config: Arc<EngineConfig>) {
        self.lexicon = self.store.apply_synonyms(&config.lexicon);
        self.config = config;
    }

    /// Merges a suit into this session's configuration and switches to its adapter.
    pub fn load_suit(&mut self, suit: &Suit) -> Result<(), SessionError> {
        let merged = merge_suit(&self.config, suit)?;
        self.set_config(Arc::new(merged));
        self.set_adapter(&suit.adapter_id)
    }

    pub fn load_suit_file(&mut self, path: &Path) -> Result<Suit, SessionError> {
        let bytes = std::fs::read(path).map_err(StoreError::from)?;
        let suit = parse_suit(&bytes)?;
        self.load_suit(&suit)?;
        Ok(suit)
    }

    pub fn flush(&self) -> Result<(), SessionError> {
        if let Some(path) = &self.store_path {
            self.store.save(path)?;
        }
        Ok(())
    }

    /// Runs a command through the whole pipeline. Errors end up in the trace.
    pub fn process_command(&mut self, text: &str) -> PipelineTrace {
        self.selection = None;
        let mut trace = PipelineTrace {
            input: text.to_owned(),
            stages: Vec::new(),
            learner: Vec::new(),
            outcome: Outcome::Failed { error: StageError { kind: String::new(), detail: String::new() } },
        };
        if text.trim().is_empty() {
            let record = StageRecord::failed("input", "EmptyInput", "the command is empty");
            trace.outcome = Outcome::Failed { error: record.error.clone().expect("failed record") };
            trace.stages.push(record);
            return trace;
        }

        if let Some(special) = self.store.special_for(text).cloned() {
            trace.stages.push(StageRecord::ok(
                "special-expression",
                json!({"original": special.original, "rephrase": special.rephrase, "frame": special.frame}),
            ));
            trace.outcome = self.execute_frame(special.frame, &mut trace.stages);
            self.capture_rephrase(&mut trace);
            return trace;
        }

        let (run, result) = run_kernel(text, &self.lexicon, &self.config.rules);
        trace.stages = run.stages.clone();
        match result {
            Ok(frame) => trace.outcome = self.execute_frame(frame, &mut trace.stages),
            Err(error) => self.recover(&mut trace, &run, &error),
        }
        self.capture_rephrase(&mut trace);
        trace
    }

    fn execute_frame(&mut self, frame: CommandFrame, stages: &mut Vec<StageRecord>) -> Outcome {
        let config = Arc::clone(&self.config);
        let adapter = config.registry.get(&self.adapter_id).expect("session adapter is registered");
        let state = self.states.get_mut(&self.adapter_id).expect("session state exists");
        let op = match executor::resolve(&frame, adapter, state, &self.lexicon) {
            Ok(op) => op,
            Err(e) => {
                stages.push(StageRecord::failed("resolution", e.kind(), &e));
                let result = ExecutionResult {
                    ok: false,
                    handler: String::new(),
                    affected: 0,
                    error: Some(ErrorInfo::new(e.kind(), &e)),
                };
                return Outcome::ExecutionFailed { frame, result };
            }
        };
        stages.push(StageRecord::ok("resolution", json!(op)));
        let result = executor::execute(&op, &config.registry, state);
        match &result.error {
            None => {
                stages.push(StageRecord::ok("execution", json!(result)));
                Outcome::Executed { frame, result }
            }
            Some(err) => {
                stages.push(StageRecord::failed("execution", &err.kind, &err.detail));
                Outcome::ExecutionFailed { frame, result }
            }
        }
    }

    /// Text for the implicit-quotation retry, if the cascade has one.
    fn retry_text(text: &str, run: &KernelRun, error: &KernelError, lexicon: &Lexicon) -> Option<String> {
        if let KernelError::Quote(QuoteError::UnbalancedQuote { position, .. }) = error {
            let stripped: String =
                text.chars().enumerate().filter(|(i, _)| i != position).map(|(_, c)| c).collect();
            let analyzed = lexicon::analyze(&stripped, lexicon).ok()?;
            return Some(learner::quote_unknown_runs(&analyzed.stream).unwrap_or(stripped));
        }
        run.indexed.as_ref().and_then(learner::quote_unknown_runs)
    }

    fn recover(&mut self, trace: &mut PipelineTrace, run: &KernelRun, error: &KernelError) {
        let text = trace.input.clone();

        let retry = Self::retry_text(&text, run, error, &self.lexicon);
        if let Some(retry_text) = &retry {
            let (retry_run, result) = run_kernel(retry_text, &self.lexicon, &self.config.rules);
            let mut stages = retry_run.stages;
            if let Ok(frame) = result {
                trace.outcome = self.execute_frame(frame, &mut stages);
                trace.learner.push(LearnerStage::RetryAsQuotation { text: retry, ok: true, stages });
                return;
            }
            trace.learner.push(LearnerStage::RetryAsQuotation { text: retry, ok: false, stages });
        } else {
            trace.learner.push(LearnerStage::RetryAsQuotation { text: None, ok: false, stages: Vec::new() });
        }

        let mut unknown: Vec<String> = Vec::new();
        let spans = run.indexed.iter().flat_map(|s| s.elements.iter()).filter(|e| e.kind == ElementKind::UnknownSpan);
        for e in spans {
            if !unknown.contains(&e.surface) {
                unknown.push(e.surface.clone());
            }
        }
        let suggestions: Vec<WordSuggestions> = unknown
            .into_iter()
            .map(|surface| WordSuggestions {
                candidates: learner::suggest(&surface, &self.lexicon, &self.config.thesaurus, self.k, self.strategy),
                surface,
            })
            .collect();
        trace.learner.push(LearnerStage::SuggestWords { suggestions: suggestions.clone() });

        if suggestions.iter().any(|s| !s.candidates.is_empty()) {
            trace.outcome = Outcome::AwaitingSelection { suggestions: suggestions.clone() };
            self.selection = Some(PendingSelection { trace: trace.clone(), suggestions });
        } else {
            trace.learner.push(LearnerStage::AskRephrase { original: text.clone() });
            trace.outcome = Outcome::AwaitingRephrase { original: text.clone() };
            self.rephrase_for = Some(text);
        }
    }

    fn capture_rephrase(&mut self, trace: &mut PipelineTrace) {
        let Outcome::Executed { frame, .. } = &trace.outcome else {
            return;
        };
        let Some(original) = self.rephrase_for.take() else {
            return;
        };
        if original == trace.input {
            return;
        }
        self.store.record_special_expression(&original, &trace.input, frame);
        trace.learner.push(LearnerStage::CaptureSpecialExpression { original, rephrase: trace.input.clone() });
        if let Err(e) = self.flush() {
            trace.stages.push(StageRecord::failed("learner-store", "StoreError", e));
        }
    }

    /// Accepts a suggested meaning for an unknown word, records it and
    /// re-runs the command that produced the suggestions.
    pub fn accept_suggestion(&mut self, surface: &str, index: WordIndex) -> Result<PipelineTrace, SessionError> {
        let pending = self.selection.as_ref().ok_or(SessionError::NoPendingSelection)?;
        let offered = pending
            .suggestions
            .iter()
            .any(|w| w.surface == surface && w.candidates.iter().any(|c| c.index == index));
        if !offered {
            return Err(SessionError::NotSuggested { surface: surface.to_owned(), index });
        }
        self.lexicon = self.lexicon.add_synonym(index, surface)?;
        self.store.add_synonym(surface, index);
        let original = pending.trace.input.clone();
        self.selection = None;
        self.flush()?;
        Ok(self.process_command(&original))
    }

    /// Rejects every suggestion; the next successful command is remembered
    /// as a rephrase of the failed one.
    pub fn reject(&mut self) -> Result<PipelineTrace, SessionError> {
        let pending = self.selection.take().ok_or(SessionError::NoPendingSelection)?;
        let mut trace = pending.trace;
        let original = trace.input.clone();
        trace.learner.push(LearnerStage::AskRephrase { original: original.clone() });
        trace.outcome = Outcome::AwaitingRephrase { original: original.clone() };
        self.rephrase_for = Some(original);
        Ok(trace)
    }
}
