use std::path::{Path, PathBuf};
use std::sync::Arc;

use thiserror::Error;

use nlcmd_core::executor::EditorState;
use nlcmd_core::lexicon::{Lexicon, LexiconError};
use nlcmd_core::session::SessionError;
use nlcmd_core::suit::{parse_suit, Suit, SuitError};
use nlcmd_core::{demo, merge_suit, EngineConfig, Session};

#[derive(Debug, Error)]
pub enum SetupError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("lexicon {path}: {source}")]
    Lexicon { path: PathBuf, source: LexiconError },
    #[error("suit {path}: {source}")]
    Suit { path: PathBuf, source: SuitError },
    #[error(transparent)]
    Session(#[from] SessionError),
}

/// Files and choices that shape an engine and its first session.
#[derive(Clone, Debug, Default)]
pub struct EngineOptions {
    pub lexicon: Option<PathBuf>,
    pub suits: Vec<PathBuf>,
    pub adapter: Option<String>,
    pub store: Option<PathBuf>,
    pub document: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String, SetupError> {
    std::fs::read_to_string(path).map_err(|source| SetupError::Read { path: path.to_owned(), source })
}

impl EngineOptions {
    /// Base configuration plus every requested suit, in order.
    pub fn config(&self) -> Result<(EngineConfig, Vec<Suit>), SetupError> {
        let lexicon = match &self.lexicon {
            Some(path) => Lexicon::from_json(&read(path)?)
                .map_err(|source| SetupError::Lexicon { path: path.clone(), source })?,
            None => demo::english_lexicon(),
        };
        let mut config = demo::config_for(lexicon);
        let mut suits = Vec::new();
        for path in &self.suits {
            let wrap = |source| SetupError::Suit { path: path.clone(), source };
            let suit = parse_suit(read(path)?.as_bytes()).map_err(wrap)?;
            config = merge_suit(&config, &suit).map_err(wrap)?;
            suits.push(suit);
        }
        Ok((config, suits))
    }

    pub fn initial_document(&self) -> Result<EditorState, SetupError> {
        match &self.document {
            Some(path) => Ok(EditorState::from_text(&read(path)?)),
            None => Ok(demo::sample_document()),
        }
    }

    /// Adapter named on the command line, else the last suit's, else the editor.
    pub fn adapter_id(&self, suits: &[Suit]) -> String {
        self.adapter
            .clone()
            .or_else(|| suits.last().map(|s| s.adapter_id.clone()))
            .unwrap_or_else(|| "editor".to_owned())
    }

    pub fn session(&self) -> Result<Session, SetupError> {
        let (config, suits) = self.config()?;
        session_for(Arc::new(config), &self.adapter_id(&suits), self.initial_document()?, self.store.as_deref())
    }
}

/// A session on `adapter` with the editor holding `document`.
pub fn session_for(
    config: Arc<EngineConfig>,
    adapter: &str,
    document: EditorState,
    store: Option<&Path>,
) -> Result<Session, SetupError> {
    let mut session = Session::new(config, "editor")?;
    session.set_document(document);
    session.set_adapter(adapter)?;
    if let Some(path) = store {
        session = session.with_store(path)?;
    }
    Ok(session)
}
