mod common;

use std::sync::Arc;
use std::time::Duration;

use codo_cli::server::{router, Endpoint};
use codo_core::query::{competency_questions, CompetencyParams, URGENT_TEST_QUERY};
use codo_core::schema::build_codo_vocabulary;
use codo_core::Graph;
use common::{fixture_workspace, ok, Server};
use reqwest::{Client, StatusCode};
use tempfile::tempdir;

const URGENT_JSON_BINDINGS: usize = 7;

fn fixture_server() -> (tempfile::TempDir, Server) {
    let dir = tempdir().unwrap();
    let ws = dir.path().join("ws");
    fixture_workspace(&ws);
    let server = Server::start(&ws, &[]);
    (dir, server)
}

#[tokio::test]
async fn health_is_ok() {
    let (_dir, server) = fixture_server();
    let resp = reqwest::get(server.url("/health")).await.unwrap();
    assert_eq!(resp.status(), StatusCode::OK);
    assert_eq!(resp.text().await.unwrap(), "ok");
}

fn binding_count(body: &str) -> usize {
    let v: serde_json::Value = serde_json::from_str(body).unwrap();
    v["results"]["bindings"].as_array().unwrap().len()
}

#[tokio::test]
async fn post_urgent_query_returns_seven_bindings() {
    let (_dir, server) = fixture_server();
    let client = Client::new();
    let resp = client
        .post(server.url("/sparql"))
        .header("content-type", "application/sparql-query")
        .body(URGENT_TEST_QUERY)
        .send()
        .await
        .unwrap();
    assert_eq!(resp.status(), StatusCode::OK);
    assert_eq!(
        resp.headers()["content-type"],
        "application/sparql-results+json"
    );
    assert_eq!(
        binding_count(&resp.text().await.unwrap()),
        URGENT_JSON_BINDINGS
    );
}

#[tokio::test]
async fn get_and_form_post_agree() {
    let (_dir, server) = fixture_server();
    let client = Client::new();
    let encoded: String = URGENT_TEST_QUERY
        .bytes()
        .map(|b| {
            if b.is_ascii_alphanumeric() {
                (b as char).to_string()
            } else {
                format!("%{b:02X}")
            }
        })
        .collect();
    let get = client
        .get(format!("{}?query={encoded}", server.url("/sparql")))
        .send()
        .await
        .unwrap();
    assert_eq!(get.status(), StatusCode::OK);
    let form = client
        .post(server.url("/sparql"))
        .header("content-type", "application/x-www-form-urlencoded")
        .body(format!("query={encoded}"))
        .send()
        .await
        .unwrap();
    assert_eq!(form.status(), StatusCode::OK);
    assert_eq!(get.text().await.unwrap(), form.text().await.unwrap());
}

#[tokio::test]
async fn bad_requests_are_400() {
    let (_dir, server) = fixture_server();
    let client = Client::new();
    let empty = client
        .get(format!("{}?query=", server.url("/sparql")))
        .send()
        .await
        .unwrap();
    assert_eq!(empty.status(), StatusCode::BAD_REQUEST);
    let missing = client.get(server.url("/sparql")).send().await.unwrap();
    assert_eq!(missing.status(), StatusCode::BAD_REQUEST);
    let union = client
        .post(server.url("/sparql"))
        .header("content-type", "application/sparql-query")
        .body("SELECT ?s WHERE { ?s ?p ?o } UNION { ?s ?p ?o }")
        .send()
        .await
        .unwrap();
    assert_eq!(union.status(), StatusCode::BAD_REQUEST);
    assert!(union.text().await.unwrap().contains("UNION"));
    let garbled = client
        .post(server.url("/sparql"))
        .header("content-type", "application/sparql-query")
        .body("SELECT ?s WHERE { ?s ?p")
        .send()
        .await
        .unwrap();
    assert_eq!(garbled.status(), StatusCode::BAD_REQUEST);
    let wrong_type = client
        .post(server.url("/sparql"))
        .header("content-type", "text/plain")
        .body("x")
        .send()
        .await
        .unwrap();
    assert_eq!(wrong_type.status(), StatusCode::UNSUPPORTED_MEDIA_TYPE);
}

#[tokio::test]
async fn endpoint_json_equals_cli_json_for_the_suite() {
    let dir = tempdir().unwrap();
    let ws = dir.path().join("ws");
    fixture_workspace(&ws);
    let server = Server::start(&ws, &[]);
    let client = Client::new();
    let suite = ok(&ws, &["suite", "--json"]);
    let questions = competency_questions(
        &build_codo_vocabulary().axioms,
        &CompetencyParams::default(),
    );
    assert_eq!(suite.lines().count(), questions.len());
    for (question, line) in questions.iter().zip(suite.lines()) {
        let body = client
            .post(server.url("/sparql"))
            .header("content-type", "application/sparql-query")
            .body(question.query.clone())
            .send()
            .await
            .unwrap()
            .text()
            .await
            .unwrap();
        let cli = ok(&ws, &["query", "--json", "-e", &question.query]);
        assert_eq!(cli.trim_end(), body, "question {}", question.id);
        assert!(
            line.ends_with(&format!("\"results\":{body}}}")),
            "question {}",
            question.id
        );
    }
}

#[tokio::test]
async fn fifty_concurrent_queries_agree() {
    let (_dir, server) = fixture_server();
    let client = Client::new();
    let send = |client: Client, url: String| async move {
        let resp = client
            .post(url)
            .header("content-type", "application/sparql-query")
            .body(URGENT_TEST_QUERY)
            .send()
            .await
            .unwrap();
        (resp.status(), resp.bytes().await.unwrap())
    };
    let (status, sequential) = send(client.clone(), server.url("/sparql")).await;
    assert_eq!(status, StatusCode::OK);
    let tasks: Vec<_> = (0..50)
        .map(|_| tokio::spawn(send(client.clone(), server.url("/sparql"))))
        .collect();
    for task in tasks {
        let (status, body) = task.await.unwrap();
        assert_eq!(status, StatusCode::OK);
        assert_eq!(body, sequential);
    }
}

#[tokio::test]
async fn overload_is_503() {
    let endpoint = Arc::new(Endpoint::new(Graph::new(), 2, Duration::from_millis(20)));
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    let app = router(endpoint.clone());
    tokio::spawn(async move { axum::serve(listener, app).await });
    let url = format!(
        "http://{addr}/sparql?query=SELECT%20%3Fs%20WHERE%20%7B%20%3Fs%20%3Fp%20%3Fo%20%7D"
    );
    assert_eq!(reqwest::get(&url).await.unwrap().status(), StatusCode::OK);
    // Occupy every evaluation slot.
    let held = endpoint
        .permits
        .clone()
        .acquire_many_owned(2)
        .await
        .unwrap();
    assert_eq!(
        reqwest::get(&url).await.unwrap().status(),
        StatusCode::SERVICE_UNAVAILABLE
    );
    drop(held);
    assert_eq!(reqwest::get(&url).await.unwrap().status(), StatusCode::OK);
}
