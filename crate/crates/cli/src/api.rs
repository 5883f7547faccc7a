//! JSON-over-HTTP service: game sessions plus stateless analysis.

use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;

use misere_core::exploit::{path_tables, TableMode, TableRow};
use misere_core::session::{NewSession, SessionError, SessionStore, SessionView};
use misere_core::simulate::StrategySpec;
use misere_core::{exploit, optimal, parse_tree};

#[derive(Clone)]
pub struct AppState {
    pub store: Arc<SessionStore>,
}

pub fn router(store: Arc<SessionStore>) -> Router {
    Router::new()
        .route("/api/session", post(create_session))
        .route("/api/session/{id}", get(get_session))
        .route("/api/session/{id}/guess", post(guess))
        .route("/api/analyze", get(analyze))
        .route("/api/tables", get(tables))
        .with_state(AppState { store })
}

/// 4xx response carrying a machine-readable code.
#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn bad_request(code: &'static str, message: impl ToString) -> ApiError {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            code,
            message: message.to_string(),
        }
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        let status = match e {
            SessionError::UnknownSession(_) => StatusCode::NOT_FOUND,
            SessionError::NotYourTurn | SessionError::SessionFinished => StatusCode::CONFLICT,
            _ => StatusCode::BAD_REQUEST,
        };
        ApiError {
            status,
            code: e.code(),
            message: e.to_string(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({ "error": { "code": self.code, "message": self.message } });
        (self.status, Json(body)).into_response()
    }
}

/// Runs CPU-bound work off the async executor.
async fn blocking<T, F>(f: F) -> Result<T, ApiError>
where
    T: Send + 'static,
    F: FnOnce() -> Result<T, ApiError> + Send + 'static,
{
    tokio::task::spawn_blocking(f).await.map_err(|e| ApiError {
        status: StatusCode::INTERNAL_SERVER_ERROR,
        code: "internal",
        message: e.to_string(),
    })?
}

fn default_engine() -> StrategySpec {
    StrategySpec::Optimal
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Deserialize)]
pub struct CreateRequest {
    pub tree: String,
    #[serde(default = "default_engine")]
    pub engine: StrategySpec,
    #[serde(default = "default_true")]
    pub human_first: bool,
    pub seed: Option<u64>,
    #[serde(default)]
    pub hints: bool,
}

#[derive(Debug, Serialize)]
pub struct CreateResponse {
    pub id: String,
    pub state: SessionView,
}

async fn create_session(
    State(app): State<AppState>,
    Json(req): Json<CreateRequest>,
) -> Result<Json<CreateResponse>, ApiError> {
    blocking(move || {
        let new = NewSession {
            tree: req.tree,
            engine: req.engine,
            human_first: req.human_first,
            seed: req.seed,
        };
        let state = app.store.create(&new, req.hints)?;
        Ok(Json(CreateResponse {
            id: state.id.clone(),
            state,
        }))
    })
    .await
}

#[derive(Debug, Deserialize)]
pub struct HintQuery {
    #[serde(default)]
    pub hints: bool,
}

async fn get_session(
    State(app): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<HintQuery>,
) -> Result<Response, ApiError> {
    blocking(move || Ok(Json(app.store.view(&id, q.hints)?).into_response())).await
}

#[derive(Debug, Deserialize)]
pub struct GuessRequest {
    pub vertex: usize,
    #[serde(default)]
    pub hints: bool,
}

async fn guess(
    State(app): State<AppState>,
    Path(id): Path<String>,
    Json(req): Json<GuessRequest>,
) -> Result<Response, ApiError> {
    blocking(move || Ok(Json(app.store.guess(&id, req.vertex, req.hints)?).into_response())).await
}

#[derive(Debug, Deserialize)]
pub struct AnalyzeQuery {
    pub tree: String,
    pub mode: Option<String>,
}

async fn analyze(Query(q): Query<AnalyzeQuery>) -> Result<Response, ApiError> {
    blocking(move || {
        let tree = parse_tree(&q.tree).map_err(|e| ApiError::bad_request("invalid_tree", e))?;
        let too_large = |e: optimal::SolveError| ApiError::bad_request("too_large", e);
        match q.mode.as_deref().unwrap_or("optimal") {
            "optimal" => Ok(Json(optimal::optimal_moves(&tree).map_err(too_large)?).into_response()),
            "exploit" => Ok(Json(exploit::exploit_values(&tree).map_err(too_large)?).into_response()),
            other => Err(ApiError::bad_request(
                "invalid_mode",
                format!("unknown mode `{other}` (use optimal or exploit)"),
            )),
        }
    })
    .await
}

#[derive(Debug, Deserialize)]
pub struct TablesQuery {
    pub n: usize,
    pub mode: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct TablesResponse {
    pub n: usize,
    pub mode: TableMode,
    pub rows: Vec<TableRow>,
}

async fn tables(Query(q): Query<TablesQuery>) -> Result<Json<TablesResponse>, ApiError> {
    blocking(move || {
        let mode: TableMode = q
            .mode
            .as_deref()
            .unwrap_or("exact")
            .parse()
            .map_err(|e| ApiError::bad_request("invalid_mode", e))?;
        let t = path_tables(q.n, mode).map_err(|e| ApiError::bad_request("invalid_size", e))?;
        Ok(Json(TablesResponse {
            n: q.n,
            mode,
            rows: t.rows(),
        }))
    })
    .await
}

pub async fn serve(port: u16, store: Arc<SessionStore>) -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind(("0.0.0.0", port)).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(store)).await?;
    Ok(())
}
