//! HTTP+JSON service for live sessions. Payloads are documented in `docs/api.md`.
//!
//! Writes to one session are serialized by its lock; machine replies and overlays run
//! on the blocking pool so other sessions keep being served.

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use mcmullen_core::rng;
use mcmullen_core::session::{OverlayKind, Session, SessionError, SessionSpec, Snapshot};
use mcmullen_core::Move;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    rule: Option<String>,
    message: String,
    witness: Option<Vec<f64>>,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            rule: None,
            message: message.into(),
            witness: None,
        }
    }

    fn not_found(id: &str) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, "not-found", format!("no session '{id}'"))
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        match e {
            SessionError::Invalid(e) => ApiError::new(StatusCode::BAD_REQUEST, "invalid-argument", e.to_string()),
            SessionError::Conflict { rule, message } => ApiError {
                rule: Some(rule),
                ..ApiError::new(StatusCode::CONFLICT, "conflict", message)
            },
            SessionError::Illegal(v) => ApiError {
                status: StatusCode::UNPROCESSABLE_ENTITY,
                code: "illegal-move",
                rule: Some(v.rule),
                message: v.message,
                witness: v.witness,
            },
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({
            "code": self.code,
            "rule": self.rule,
            "witness": self.witness,
            "message": self.message,
        });
        (self.status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

/// Parse a request body, naming the offending field on failure.
fn parse<T: serde::de::DeserializeOwned>(bytes: &Bytes) -> ApiResult<T> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        ApiError {
            rule: Some(path.clone()),
            ..ApiError::new(
                StatusCode::BAD_REQUEST,
                "malformed-json",
                format!("at '{path}': {}", e.inner()),
            )
        }
    })
}

pub struct AppState {
    sessions: Mutex<HashMap<String, Arc<Mutex<Session>>>>,
    data_dir: Option<PathBuf>,
    counter: AtomicU64,
    nonce: u64,
    budget: Duration,
}

impl AppState {
    /// Service state; existing snapshots in `data_dir` are loaded.
    pub fn new(data_dir: Option<PathBuf>, nonce: u64) -> std::io::Result<Self> {
        let mut sessions = HashMap::new();
        if let Some(dir) = &data_dir {
            std::fs::create_dir_all(dir)?;
            for entry in std::fs::read_dir(dir)? {
                let path = entry?.path();
                if path.extension().and_then(|e| e.to_str()) != Some("json") {
                    continue;
                }
                let text = std::fs::read_to_string(&path)?;
                let restored = serde_json::from_str::<Snapshot>(&text)
                    .map_err(|e| e.to_string())
                    .and_then(|s| Session::restore(s).map_err(|e| e.to_string()));
                match restored {
                    Ok(s) => {
                        sessions.insert(s.id().to_string(), Arc::new(Mutex::new(s)));
                    }
                    Err(e) => eprintln!("skipping snapshot {}: {e}", path.display()),
                }
            }
        }
        Ok(AppState {
            sessions: Mutex::new(sessions),
            data_dir,
            counter: AtomicU64::new(0),
            nonce,
            budget: mcmullen_core::session::MACHINE_BUDGET,
        })
    }

    pub fn with_budget(mut self, budget: Duration) -> Self {
        self.budget = budget;
        self
    }

    fn session(&self, id: &str) -> ApiResult<Arc<Mutex<Session>>> {
        self.sessions
            .lock()
            .expect("session table")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found(id))
    }

    fn persist(&self, s: &Session) {
        if let Some(dir) = &self.data_dir {
            let path = dir.join(format!("{}.json", s.id()));
            let text = serde_json::to_string_pretty(&s.snapshot()).expect("snapshots serialize");
            // Write then rename so a crash never leaves half a snapshot.
            let tmp = path.with_extension("json.tmp");
            if let Err(e) = std::fs::write(&tmp, text).and_then(|_| std::fs::rename(&tmp, &path)) {
                eprintln!("snapshot of {} failed: {e}", s.id());
            }
        }
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/:id", get(get_state))
        .route("/sessions/:id/moves", post(submit))
        .route("/sessions/:id/preview", post(preview))
        .route("/sessions/:id/undo", post(undo))
        .route("/sessions/:id/overlays", get(overlays))
        .with_state(state)
}

/// Run `f` on the session under its lock, on the blocking pool.
async fn with_session<T: Send + 'static>(
    app: &Arc<AppState>,
    id: &str,
    f: impl FnOnce(&AppState, &mut Session) -> ApiResult<T> + Send + 'static,
) -> ApiResult<T> {
    let session = app.session(id)?;
    let app = Arc::clone(app);
    tokio::task::spawn_blocking(move || {
        let mut s = session.lock().expect("session lock");
        f(&app, &mut s)
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?
}

async fn create(State(app): State<Arc<AppState>>, body: Bytes) -> ApiResult<impl IntoResponse> {
    let spec: SessionSpec = parse(&body)?;
    let n = app.counter.fetch_add(1, Ordering::Relaxed);
    let id = format!("{:016x}", rng::child_seed(app.nonce, n));
    let budget = app.budget;
    let app2 = Arc::clone(&app);
    let session = tokio::task::spawn_blocking(move || Session::create(id, spec).map(|s| s.with_budget(budget)))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))??;
    app2.persist(&session);
    let summary = session.summary();
    app2.sessions
        .lock()
        .expect("session table")
        .insert(summary.id.clone(), Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(summary)))
}

#[derive(Deserialize)]
struct SinceQuery {
    since: Option<u64>,
}

async fn get_state(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<SinceQuery>,
) -> ApiResult<impl IntoResponse> {
    let delta = with_session(&app, &id, move |_, s| match q.since {
        Some(since) => Ok(s.delta(since)?),
        None => Ok(s.full()),
    })
    .await?;
    Ok(Json(delta))
}

async fn submit(State(app): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> ApiResult<impl IntoResponse> {
    let mv: Move = parse(&body)?;
    let r = with_session(&app, &id, move |app, s| {
        let r = s.submit(mv)?;
        app.persist(s);
        Ok(r)
    })
    .await?;
    Ok(Json(r))
}

async fn preview(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<impl IntoResponse> {
    let mv: Move = parse(&body)?;
    let v = with_session(&app, &id, move |_, s| Ok(s.preview(&mv))).await?;
    Ok(Json(v))
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct UndoRequest {
    pub to_revision: u64,
}

async fn undo(State(app): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> ApiResult<impl IntoResponse> {
    let req: UndoRequest = parse(&body)?;
    let d = with_session(&app, &id, move |app, s| {
        let d = s.undo(req.to_revision)?;
        app.persist(s);
        Ok(d)
    })
    .await?;
    Ok(Json(d))
}

#[derive(Deserialize)]
struct KindsQuery {
    kinds: Option<String>,
}

async fn overlays(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<KindsQuery>,
) -> ApiResult<impl IntoResponse> {
    let kinds = q.kinds.unwrap_or_else(|| "goodCopies,cones,ranks".into());
    let kinds: Vec<OverlayKind> = kinds
        .split(',')
        .filter(|k| !k.is_empty())
        .map(OverlayKind::parse)
        .collect::<Result<_, _>>()
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "invalid-argument", e.to_string()))?;
    let o = with_session(&app, &id, move |_, s| Ok(s.overlays(&kinds)?)).await?;
    Ok(Json(o))
}

/// Bind and serve until the process is stopped.
pub async fn serve(addr: &str, data_dir: Option<PathBuf>) -> std::io::Result<()> {
    let nonce = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_nanos() as u64)
        .unwrap_or(0);
    let app = Arc::new(AppState::new(data_dir, nonce)?);
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("serving on http://{}", listener.local_addr()?);
    axum::serve(listener, router(app)).await
}
