//! Read-only SPARQL query endpoint over a materialized snapshot.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::Arc;
use std::time::Duration;

use axum::extract::{FromRequest, Query, Request, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Form, Router};
use codo_core::query::{run_query, to_json_results};
use codo_core::Graph;
use tokio::sync::Semaphore;

pub const RESULTS_JSON: &str = "application/sparql-results+json";

pub struct Endpoint {
    graph: Arc<Graph>,
    /// One permit per concurrent evaluation.
    pub permits: Arc<Semaphore>,
    /// How long a request may wait for a permit before it is refused.
    pub queue_timeout: Duration,
}

impl Endpoint {
    pub fn new(graph: Graph, max_concurrent: usize, queue_timeout: Duration) -> Self {
        Endpoint {
            graph: Arc::new(graph),
            permits: Arc::new(Semaphore::new(max_concurrent)),
            queue_timeout,
        }
    }
}

pub fn router(endpoint: Arc<Endpoint>) -> Router {
    Router::new()
        .route("/health", get(|| async { "ok" }))
        .route("/sparql", get(sparql_get).post(sparql_post))
        .with_state(endpoint)
}

pub async fn serve(
    endpoint: Endpoint,
    addr: SocketAddr,
    on_bound: impl FnOnce(SocketAddr),
) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    on_bound(listener.local_addr()?);
    axum::serve(listener, router(Arc::new(endpoint)))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

fn text(status: StatusCode, message: impl Into<String>) -> Response {
    (
        status,
        [(header::CONTENT_TYPE, "text/plain; charset=utf-8")],
        message.into(),
    )
        .into_response()
}

async fn sparql_get(
    State(ep): State<Arc<Endpoint>>,
    Query(params): Query<HashMap<String, String>>,
) -> Response {
    answer(ep, params.get("query").cloned()).await
}

async fn sparql_post(State(ep): State<Arc<Endpoint>>, req: Request) -> Response {
    let content_type = req
        .headers()
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.split(';').next())
        .map(|v| v.trim().to_ascii_lowercase())
        .unwrap_or_default();
    let query = match content_type.as_str() {
        "application/sparql-query" => match String::from_request(req, &()).await {
            Ok(q) => Some(q),
            Err(rejection) => return text(StatusCode::BAD_REQUEST, rejection.body_text()),
        },
        "application/x-www-form-urlencoded" => match Form::<HashMap<String, String>>::from_request(req, &()).await {
            Ok(Form(mut fields)) => fields.remove("query"),
            Err(rejection) => return text(StatusCode::BAD_REQUEST, rejection.body_text()),
        },
        other => {
            return text(
                StatusCode::UNSUPPORTED_MEDIA_TYPE,
                format!("unsupported content type `{other}`; send application/sparql-query or a urlencoded form"),
            )
        }
    };
    answer(ep, query).await
}

async fn answer(ep: Arc<Endpoint>, query: Option<String>) -> Response {
    let Some(query) = query.filter(|q| !q.trim().is_empty()) else {
        return text(
            StatusCode::BAD_REQUEST,
            "missing or empty `query` parameter",
        );
    };
    let permit =
        match tokio::time::timeout(ep.queue_timeout, ep.permits.clone().acquire_owned()).await {
            Ok(Ok(permit)) => permit,
            _ => {
                return text(
                    StatusCode::SERVICE_UNAVAILABLE,
                    "too many concurrent queries; retry later",
                )
            }
        };
    let graph = ep.graph.clone();
    let outcome = tokio::task::spawn_blocking(move || {
        let _permit = permit;
        run_query(&query, &graph).map(|table| to_json_results(&table))
    })
    .await;
    match outcome {
        Ok(Ok(json)) => {
            (StatusCode::OK, [(header::CONTENT_TYPE, RESULTS_JSON)], json).into_response()
        }
        Ok(Err(err)) => text(StatusCode::BAD_REQUEST, err.to_string()),
        Err(err) => text(
            StatusCode::INTERNAL_SERVER_ERROR,
            format!("evaluation failed: {err}"),
        ),
    }
}
