//! Many commands at once, parsed on the data-parallel path when it pays off.

use crate::explainer::CommandFrame;
use crate::lexicon::Lexicon;
use crate::par::{self, Strategy};
use crate::pipeline::{parse_frame, KernelError};
use crate::rewrite::RuleSet;

pub type FrameResult = Result<CommandFrame, KernelError>;

/// Parses every text; output order follows input order.
pub fn parse_frames<S: AsRef<str> + Sync>(texts: &[S], lexicon: &Lexicon, rules: &RuleSet, strategy: Strategy) -> Vec<FrameResult> {
    par::map(strategy, texts, |t| parse_frame(t.as_ref(), lexicon, rules))
}

/// Like [`parse_frames`] but never falls back to the sequential path for small inputs.
pub fn parse_frames_forced<S: AsRef<str> + Sync>(
    texts: &[S],
    lexicon: &Lexicon,
    rules: &RuleSet,
    strategy: Strategy,
) -> Vec<FrameResult> {
    par::map_forced(strategy, texts, |t| parse_frame(t.as_ref(), lexicon, rules))
}
