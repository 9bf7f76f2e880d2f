//! Shell around `nlcmd-core`: engine setup from files, an interactive
//! loop, one-shot commands and an HTTP service.

pub mod render;
pub mod repl;
pub mod service;
pub mod setup;
