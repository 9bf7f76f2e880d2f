use std::fmt::Write;

use nlcmd_core::executor::ExecutionResult;
use nlcmd_core::executor::ErrorInfo;
use nlcmd_core::session::{LearnerStage, Outcome, WordSuggestions};
use nlcmd_core::PipelineTrace;

/// Suggestions numbered from 1 across all unknown words.
pub fn numbered(suggestions: &[WordSuggestions]) -> Vec<(usize, &str, u32, &str, f64)> {
    suggestions
        .iter()
        .flat_map(|w| w.candidates.iter().map(move |c| (w.surface.as_str(), c)))
        .enumerate()
        .map(|(i, (surface, c))| (i + 1, surface, c.index, c.form.as_str(), c.score))
        .collect()
}

/// One-paragraph summary of a trace for terminal output.
pub fn compact(trace: &PipelineTrace) -> String {
    let mut out = String::new();
    for stage in &trace.learner {
        match stage {
            LearnerStage::RetryAsQuotation { text: Some(text), ok: true, .. } => {
                let _ = writeln!(out, "read as: {text}");
            }
            LearnerStage::CaptureSpecialExpression { original, .. } => {
                let _ = writeln!(out, "remembered as the meaning of: {original}");
            }
            _ => {}
        }
    }
    if trace.stages.first().is_some_and(|s| s.stage == "special-expression") {
        let _ = writeln!(out, "recalled a remembered expression");
    }
    match &trace.outcome {
        Outcome::Executed { result, .. } => {
            let _ = write!(out, "ok: {} affected {}", result.handler, result.affected);
        }
        Outcome::ExecutionFailed { result, .. } => {
            let (kind, detail) = result.error.as_ref().map_or(("Unknown", ""), |e| (e.kind.as_str(), e.detail.as_str()));
            let _ = write!(out, "error {kind}: {detail}");
        }
        Outcome::AwaitingSelection { suggestions } => {
            let _ = writeln!(out, "some words are not in the dictionary; reply with a number, or :reject");
            for (n, surface, index, form, score) in numbered(suggestions) {
                let _ = writeln!(out, "  {n}. {surface} -> {form} ({index}) score {score:.3}");
            }
            out.pop();
        }
        Outcome::AwaitingRephrase { original } => {
            let _ = write!(out, "could not understand {original:?}; please rephrase");
        }
        Outcome::Failed { error } => {
            let _ = write!(out, "error {}: {}", error.kind, error.detail);
        }
    }
    out
}

/// The execution result a trace amounts to. Traces that never reached an
/// adapter report their last error with an empty handler.
pub fn execution_result(trace: &PipelineTrace) -> ExecutionResult {
    let failure = |kind: &str, detail: String| ExecutionResult {
        ok: false,
        handler: String::new(),
        affected: 0,
        error: Some(ErrorInfo { kind: kind.to_owned(), detail }),
    };
    match &trace.outcome {
        Outcome::Executed { result, .. } | Outcome::ExecutionFailed { result, .. } => result.clone(),
        Outcome::AwaitingSelection { suggestions } => failure(
            "UnknownWords",
            suggestions.iter().map(|w| w.surface.as_str()).collect::<Vec<_>>().join(", "),
        ),
        Outcome::AwaitingRephrase { original } => failure("AskRephrase", original.clone()),
        Outcome::Failed { error } => failure(&error.kind, error.detail.clone()),
    }
}
