//! The language-facing half of the pipeline: text to command frame.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::explainer::{self, CommandFrame, Emission, ExplainError, FrameBuilder};
use crate::lexicon::{self, IndexStream, Lexicon, QuoteError};
use crate::numformat::{self, NumFormatError, NumberBindings};
use crate::rewrite::{self, RewriteError, RuleSet};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageError {
    pub kind: String,
    pub detail: String,
}

/// One pipeline stage as it appears in a trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub output: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<StageError>,
}

impl StageRecord {
    pub fn ok(stage: &str, output: Value) -> Self {
        StageRecord { stage: stage.to_owned(), output: Some(output), error: None }
    }

    pub fn failed(stage: &str, kind: &str, detail: impl ToString) -> Self {
        StageRecord {
            stage: stage.to_owned(),
            output: None,
            error: Some(StageError { kind: kind.to_owned(), detail: detail.to_string() }),
        }
    }

    pub fn is_error(&self) -> bool {
        self.error.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error(transparent)]
    Quote(#[from] QuoteError),
    #[error(transparent)]
    NumFormat(#[from] NumFormatError),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Explain(#[from] ExplainError),
}

impl KernelError {
    pub fn kind(&self) -> &'static str {
        match self {
            KernelError::Quote(e) => e.kind(),
            KernelError::NumFormat(e) => e.kind(),
            KernelError::Rewrite(e) => e.kind(),
            KernelError::Explain(e) => e.kind(),
        }
    }

    pub fn stage(&self) -> &'static str {
        match self {
            KernelError::Quote(_) => "quotations",
            KernelError::NumFormat(_) => "numformat",
            KernelError::Rewrite(_) => "rewrite",
            KernelError::Explain(_) => "explainer",
        }
    }
}

/// What the kernel produced, however far it got.
#[derive(Clone, Debug, Default)]
pub struct KernelRun {
    pub stages: Vec<StageRecord>,
    /// The stream straight after dictionary lookup.
    pub indexed: Option<IndexStream>,
    pub numbers: NumberBindings,
    pub frame: Option<CommandFrame>,
}

fn stream_json(stream: &IndexStream) -> Value {
    json!(stream.elements.iter().map(|e| e.index.map_or_else(|| json!(e.surface), |i| json!(i))).collect::<Vec<_>>())
}

/// Runs text through quotation extraction, segmentation, indexing,
/// number normalisation, rewriting and tagging, recording each stage.
///
/// The frame is assembled from emissions as they stream out of the tagger.
pub fn run_kernel(text: &str, lexicon: &Lexicon, rules: &RuleSet) -> (KernelRun, Result<CommandFrame, KernelError>) {
    let mut run = KernelRun::default();
    let result = kernel_steps(text, lexicon, rules, &mut run);
    if let Err(e) = &result {
        run.stages.push(StageRecord::failed(e.stage(), e.kind(), e));
    }
    (run, result)
}

fn kernel_steps(text: &str, lexicon: &Lexicon, rules: &RuleSet, run: &mut KernelRun) -> Result<CommandFrame, KernelError> {
    let masked = lexicon::extract_quotations(text)?;
    run.stages.push(StageRecord::ok("quotations", json!({"masked": masked.text, "quotes": masked.quotes})));

    let tokens = lexicon::segment(&masked.text, lexicon);
    run.stages.push(StageRecord::ok("segmentation", json!(tokens.iter().map(|t| t.surface()).collect::<Vec<_>>())));

    let indexed = lexicon::index_tokens(&tokens, &masked.quotes, lexicon);
    run.stages.push(StageRecord::ok("indexing", stream_json(&indexed)));
    run.indexed = Some(indexed.clone());

    let (numbered, numbers) = numformat::parse_numbers(&indexed)?;
    run.stages.push(StageRecord::ok(
        "numformat",
        json!({"stream": stream_json(&numbered), "bindings": numbers}),
    ));
    run.numbers = numbers.clone();

    let rewritten = rewrite::apply_rules(rules, &numbered, lexicon)?;
    run.stages.push(StageRecord::ok(
        "rewrite",
        json!({"firings": rewritten.trace, "passes": rewritten.passes, "stream": stream_json(&rewritten.stream)}),
    ));

    let mut builder = FrameBuilder::new(lexicon.language_id());
    let mut emissions: Vec<Emission> = Vec::new();
    let mut frame = None;
    let mut build_error = None;
    explainer::tag_into(&rewritten.stream, &numbers, lexicon, |e| {
        emissions.push(e.clone());
        match builder.push(e) {
            Ok(Some(f)) => frame = Some(f),
            Ok(None) => {}
            Err(err) => build_error = Some(err),
        }
    })?;
    run.stages.push(StageRecord::ok("explainer", json!(emissions)));
    if let Some(err) = build_error {
        return Err(err.into());
    }
    let frame = frame.ok_or_else(|| ExplainError::IncompleteFrame("no End message".into()))?;
    run.stages.push(StageRecord::ok("frame", json!(frame)));
    run.frame = Some(frame.clone());
    Ok(frame)
}

/// Parses text to a frame without recording stages.
pub fn parse_frame(text: &str, lexicon: &Lexicon, rules: &RuleSet) -> Result<CommandFrame, KernelError> {
    let masked = lexicon::extract_quotations(text)?;
    let tokens = lexicon::segment(&masked.text, lexicon);
    let indexed = lexicon::index_tokens(&tokens, &masked.quotes, lexicon);
    let (numbered, numbers) = numformat::parse_numbers(&indexed)?;
    let rewritten = rewrite::apply_rules(rules, &numbered, lexicon)?;
    let emissions = explainer::tag(&rewritten.stream, &numbers, lexicon)?;
    Ok(explainer::build_frame(&emissions, lexicon.language_id())?)
}
