//! JSON-over-HTTP access to sessions and suits, with a server-sent event
//! stream per session.

use std::collections::{BTreeMap, HashMap};
use std::convert::Infallible;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::sse::{Event, KeepAlive, Sse};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use futures::Stream;
use serde::Deserialize;
use serde_json::{json, Value};
use tokio::sync::broadcast;
use tower_http::services::ServeDir;

use nlcmd_core::executor::EditorState;
use nlcmd_core::lexicon::WordIndex;
use nlcmd_core::session::SessionError;
use nlcmd_core::suit::{export_suit, parse_suit, Suit, SuitMeta};
use nlcmd_core::{demo, EngineConfig, PipelineTrace, Session};

use crate::setup::session_for;

const EVENT_BUFFER: usize = 64;

#[derive(Clone, Debug)]
pub struct ApiError {
    status: StatusCode,
    kind: String,
    detail: String,
}

impl ApiError {
    fn new(status: StatusCode, kind: &str, detail: impl ToString) -> Self {
        ApiError { status, kind: kind.to_owned(), detail: detail.to_string() }
    }

    fn no_session(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "UnknownSession", format!("no session {id:?}"))
    }

    fn bad_body(e: impl ToString) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "BadRequest", e)
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        let status = match &e {
            SessionError::NoPendingSelection | SessionError::Lexicon(_) => StatusCode::CONFLICT,
            SessionError::NotSuggested { .. } | SessionError::UnknownAdapter(_) => StatusCode::UNPROCESSABLE_ENTITY,
            SessionError::Suit(_) => StatusCode::UNPROCESSABLE_ENTITY,
            SessionError::Store(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError::new(status, e.kind(), e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({"kind": self.kind, "detail": self.detail}))).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

#[derive(Clone, Debug)]
struct Update {
    name: &'static str,
    data: String,
}

struct Slot {
    session: tokio::sync::Mutex<Session>,
    events: broadcast::Sender<Update>,
}

/// Shared server state.
pub struct Service {
    config: Arc<EngineConfig>,
    adapter: String,
    document: EditorState,
    store: Option<PathBuf>,
    sessions: Mutex<HashMap<String, Arc<Slot>>>,
    suits: RwLock<BTreeMap<String, Suit>>,
    next_id: AtomicU64,
}

impl Service {
    /// A service whose new sessions start on `adapter` with `document`.
    /// The shipped shapes suit and `suits` are offered for download.
    pub fn new(config: Arc<EngineConfig>, adapter: &str, document: EditorState, suits: Vec<Suit>) -> Self {
        let shipped = parse_suit(demo::SHAPES_SUIT.as_bytes()).expect("shipped suit parses");
        let suits = std::iter::once(shipped).chain(suits).map(|s| (s.meta.id.clone(), s)).collect();
        Service {
            config,
            adapter: adapter.to_owned(),
            document,
            store: None,
            sessions: Mutex::new(HashMap::new()),
            suits: RwLock::new(suits),
            next_id: AtomicU64::new(1),
        }
    }

    /// Every session reads and writes the learner store at `path`.
    pub fn with_store(mut self, path: PathBuf) -> Self {
        self.store = Some(path);
        self
    }

    pub fn router(self: Arc<Self>, static_dir: Option<PathBuf>) -> Router {
        let api = Router::new()
            .route("/api/session", post(create_session))
            .route("/api/session/{id}/command", post(command))
            .route("/api/session/{id}/selection", post(selection))
            .route("/api/session/{id}/rejection", post(rejection))
            .route("/api/session/{id}/suit", post(session_suit))
            .route("/api/session/{id}/state", get(state))
            .route("/api/suits", get(list_suits).post(upload_suit))
            .route("/api/suits/{id}", get(download_suit))
            .route("/api/events/{id}", get(events))
            .with_state(self);
        match static_dir {
            Some(dir) => api.fallback_service(ServeDir::new(dir)),
            None => api,
        }
    }

    fn slot(&self, id: &str) -> ApiResult<Arc<Slot>> {
        self.sessions.lock().expect("session map lock").get(id).cloned().ok_or_else(|| ApiError::no_session(id))
    }
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(ApiError::bad_body)
}

fn publish(slot: &Slot, trace: &PipelineTrace, session: &Session) {
    let trace = serde_json::to_string(trace).expect("traces serialise");
    let state = serde_json::to_string(session.state()).expect("states serialise");
    let _ = slot.events.send(Update { name: "trace", data: trace });
    let _ = slot.events.send(Update { name: "state", data: state });
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct NewSession {
    adapter: Option<String>,
}

async fn create_session(State(svc): State<Arc<Service>>, body: Bytes) -> ApiResult<(StatusCode, Json<Value>)> {
    let req: NewSession = if body.iter().all(u8::is_ascii_whitespace) { NewSession::default() } else { parse_body(&body)? };
    let adapter = req.adapter.unwrap_or_else(|| svc.adapter.clone());
    let session = session_for(Arc::clone(&svc.config), &adapter, svc.document.clone(), svc.store.as_deref())
        .map_err(|e| match e {
            crate::setup::SetupError::Session(e) => ApiError::from(e),
            other => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "SetupError", other),
        })?;
    let id = format!("s{}", svc.next_id.fetch_add(1, Ordering::Relaxed));
    let slot = Slot { session: tokio::sync::Mutex::new(session), events: broadcast::channel(EVENT_BUFFER).0 };
    svc.sessions.lock().expect("session map lock").insert(id.clone(), Arc::new(slot));
    Ok((StatusCode::CREATED, Json(json!({"id": id}))))
}

#[derive(Deserialize)]
struct CommandBody {
    text: String,
}

async fn command(State(svc): State<Arc<Service>>, Path(id): Path<String>, body: Bytes) -> ApiResult<Json<PipelineTrace>> {
    let req: CommandBody = parse_body(&body)?;
    let slot = svc.slot(&id)?;
    let mut session = slot.session.lock().await;
    let trace = session.process_command(&req.text);
    publish(&slot, &trace, &session);
    Ok(Json(trace))
}

#[derive(Deserialize)]
struct SelectionBody {
    surface: String,
    index: WordIndex,
}

async fn selection(State(svc): State<Arc<Service>>, Path(id): Path<String>, body: Bytes) -> ApiResult<Json<PipelineTrace>> {
    let req: SelectionBody = parse_body(&body)?;
    let slot = svc.slot(&id)?;
    let mut session = slot.session.lock().await;
    let trace = session.accept_suggestion(&req.surface, req.index)?;
    publish(&slot, &trace, &session);
    Ok(Json(trace))
}

async fn rejection(State(svc): State<Arc<Service>>, Path(id): Path<String>) -> ApiResult<Json<PipelineTrace>> {
    let slot = svc.slot(&id)?;
    let mut session = slot.session.lock().await;
    let trace = session.reject()?;
    publish(&slot, &trace, &session);
    Ok(Json(trace))
}

#[derive(Deserialize)]
struct SuitRef {
    id: String,
}

async fn session_suit(State(svc): State<Arc<Service>>, Path(id): Path<String>, body: Bytes) -> ApiResult<Json<Value>> {
    let req: SuitRef = parse_body(&body)?;
    let suit = svc.suits.read().expect("suit lock").get(&req.id).cloned().ok_or_else(|| {
        ApiError::new(StatusCode::NOT_FOUND, "UnknownSuit", format!("no suit {:?}", req.id))
    })?;
    let slot = svc.slot(&id)?;
    let mut session = slot.session.lock().await;
    session.load_suit(&suit)?;
    let _ = slot.events.send(Update {
        name: "state",
        data: serde_json::to_string(session.state()).expect("states serialise"),
    });
    Ok(Json(json!({"adapter": session.adapter_id()})))
}

async fn state(State(svc): State<Arc<Service>>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let slot = svc.slot(&id)?;
    let session = slot.session.lock().await;
    Ok(Json(serde_json::to_value(session.state()).expect("states serialise")))
}

async fn list_suits(State(svc): State<Arc<Service>>) -> Json<Vec<SuitMeta>> {
    Json(svc.suits.read().expect("suit lock").values().map(|s| s.meta.clone()).collect())
}

async fn upload_suit(State(svc): State<Arc<Service>>, body: Bytes) -> ApiResult<(StatusCode, Json<SuitMeta>)> {
    let unprocessable = |e: nlcmd_core::suit::SuitError| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.kind(), e);
    let suit = parse_suit(&body).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e.kind(), e))?;
    suit.validate(&svc.config.lexicon, &svc.config.registry).map_err(unprocessable)?;
    let mut suits = svc.suits.write().expect("suit lock");
    if suits.contains_key(&suit.meta.id) {
        return Err(ApiError::new(StatusCode::CONFLICT, "DuplicateSuit", format!("suit {:?} exists", suit.meta.id)));
    }
    let meta = suit.meta.clone();
    suits.insert(meta.id.clone(), suit);
    Ok((StatusCode::CREATED, Json(meta)))
}

async fn download_suit(State(svc): State<Arc<Service>>, Path(id): Path<String>) -> ApiResult<Response> {
    let suits = svc.suits.read().expect("suit lock");
    let suit = suits.get(&id).ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "UnknownSuit", format!("no suit {id:?}")))?;
    Ok(([(header::CONTENT_TYPE, "application/json")], export_suit(suit)).into_response())
}

async fn events(
    State(svc): State<Arc<Service>>,
    Path(id): Path<String>,
) -> ApiResult<Sse<impl Stream<Item = Result<Event, Infallible>>>> {
    let rx = svc.slot(&id)?.events.subscribe();
    let stream = futures::stream::unfold(rx, |mut rx| async move {
        loop {
            match rx.recv().await {
                Ok(update) => return Some((Ok(Event::default().event(update.name).data(update.data)), rx)),
                Err(broadcast::error::RecvError::Lagged(_)) => continue,
                Err(broadcast::error::RecvError::Closed) => return None,
            }
        }
    });
    Ok(Sse::new(stream).keep_alive(KeepAlive::default()))
}
