//! A rule-based engine that turns imperative sentences into command frames
//! and runs them against in-process application adapters.
//!
//! Pipeline: [`lexicon`] (quotations, segmentation, indexing) →
//! [`numformat`] → [`rewrite`] → [`explainer`] → [`executor`], with
//! [`learner`] recovering from failures and [`suit`] packs extending the
//! vocabulary. [`session`] ties the stages together and records traces.

pub mod batch;
pub mod config;
pub mod demo;
pub mod executor;
pub mod explainer;
pub mod learner;
pub mod lexicon;
pub mod numformat;
pub mod par;
pub mod pipeline;
pub mod rewrite;
pub mod session;
pub mod suit;

pub use config::{merge_suit, unload_suit, EngineConfig};
pub use explainer::CommandFrame;
pub use lexicon::Lexicon;
pub use session::{Outcome, PipelineTrace, Session};
