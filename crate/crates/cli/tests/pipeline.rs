mod common;

use codo_core::query::URGENT_TEST_QUERY;
use common::{codo, data, fixture_workspace, ok, path, sample_workspace};
use tempfile::tempdir;

#[test]
fn fresh_workspace_has_no_triples() {
    let dir = tempdir().unwrap();
    let out = ok(&dir.path().join("ws"), &["stats"]);
    assert!(out.starts_with("triples: 0 "), "{out}");
}

#[test]
fn urgent_query_over_fixture() {
    let dir = tempdir().unwrap();
    let ws = dir.path().join("ws");
    fixture_workspace(&ws);
    let out = ok(&ws, &["query", "-e", URGENT_TEST_QUERY]);
    let expected = "\
?p            ?r
------------  ------------
codo:p000001  codo:p000004
codo:p000001  codo:p000005
codo:p000001  codo:p000006
codo:p000001  codo:p000007
codo:p000002  codo:p000008
codo:p000003  codo:p000010
codo:p000003  codo:p000012
(7 rows)
";
    assert_eq!(out, expected);
}

#[test]
fn query_from_file_and_json() {
    let dir = tempdir().unwrap();
    let ws = dir.path().join("ws");
    fixture_workspace(&ws);
    let file = dir.path().join("q.rq");
    std::fs::write(
        &file,
        "SELECT ?p WHERE { ?p a codo:DiagnosedWithCovid } LIMIT 1",
    )
    .unwrap();
    let out = ok(&ws, &["query", path(&file), "--json"]);
    assert_eq!(
        out.trim_end(),
        r#"{"head":{"vars":["p"]},"results":{"bindings":[{"p":{"type":"uri","value":"http://www.isibang.ac.in/ns/codo#p000001"}}]}}"#
    );
}

fn pipeline_export(ws: &std::path::Path, out: &std::path::Path) -> Vec<u8> {
    sample_workspace(ws);
    ok(ws, &["export", path(out), "--inferred"]);
    std::fs::read(out).unwrap()
}

#[test]
fn pipeline_is_deterministic() {
    let dir = tempdir().unwrap();
    let a = pipeline_export(&dir.path().join("a"), &dir.path().join("a.nt"));
    let b = pipeline_export(&dir.path().join("b"), &dir.path().join("b.nt"));
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn export_then_load_preserves_graph_and_answers() {
    let dir = tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    fixture_workspace(&a);
    let dump = dir.path().join("closure.nt");
    ok(&a, &["export", path(&dump), "--inferred"]);
    ok(&b, &["load", path(&dump)]);
    ok(&b, &["reason"]);
    let again = dir.path().join("again.nt");
    ok(&b, &["export", path(&again), "--inferred"]);
    assert_eq!(
        std::fs::read(&dump).unwrap(),
        std::fs::read(&again).unwrap()
    );
    assert_eq!(ok(&a, &["suite", "--json"]), ok(&b, &["suite", "--json"]));
    assert_eq!(ok(&a, &["suite"]), ok(&b, &["suite"]));
}

#[test]
fn asserted_export_excludes_inferences() {
    let dir = tempdir().unwrap();
    let ws = dir.path().join("ws");
    fixture_workspace(&ws);
    let (asserted, full) = (dir.path().join("asserted.nt"), dir.path().join("full.nt"));
    ok(&ws, &["export", path(&asserted)]);
    ok(&ws, &["export", path(&full), "--inferred"]);
    let asserted = std::fs::read_to_string(asserted).unwrap();
    let full = std::fs::read_to_string(full).unwrap();
    let has_child = "<http://www.isibang.ac.in/ns/codo#p000001> <http://www.isibang.ac.in/ns/codo#hasChild> <http://www.isibang.ac.in/ns/codo#p000007> .";
    assert!(!asserted.contains(has_child));
    assert!(full.contains(has_child));
    assert!(full.lines().count() > asserted.lines().count());
}

#[test]
fn reasoning_twice_adds_nothing() {
    let dir = tempdir().unwrap();
    let ws = dir.path().join("ws");
    sample_workspace(&ws);
    let out = ok(&ws, &["reason"]);
    assert!(out.contains("inferred triples: 0"), "{out}");
}

#[test]
fn ingest_marks_workspace_dirty() {
    let dir = tempdir().unwrap();
    let ws = dir.path().join("ws");
    sample_workspace(&ws);
    assert!(ok(&ws, &["stats"]).contains("materialized: yes"));
    ok(&ws, &["load", path(&data("close_contacts.ttl"))]);
    assert!(ok(&ws, &["stats"]).contains("materialized: no"));
    let suite = codo(&ws, &["suite"]);
    assert_eq!(suite.code, 1);
}

#[test]
fn stats_counts_patients() {
    let dir = tempdir().unwrap();
    let ws = dir.path().join("ws");
    sample_workspace(&ws);
    let out = ok(&ws, &["stats"]);
    let line = out
        .lines()
        .find(|l| l.trim_start().starts_with("codo:Patient "))
        .unwrap();
    assert_eq!(line.split_whitespace().last(), Some("6"));
}

#[test]
fn hash_naming_from_the_command_line() {
    let dir = tempdir().unwrap();
    let ws = dir.path().join("ws");
    ok(&ws, &["load", path(&data("codo.ttl"))]);
    ok(
        &ws,
        &[
            "ingest",
            path(&data("karnataka_sample.csv")),
            "--rule",
            path(&data("codo.mm")),
            "--naming",
            "hash",
        ],
    );
    let out = ok(
        &ws,
        &["query", "-e", "SELECT ?p WHERE { ?p a codo:Patient }"],
    );
    assert!(out.contains("(6 rows)"), "{out}");
    assert!(!out.contains("p000001"));
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempdir().unwrap();
    let ws = dir.path().join("ws");
    assert_eq!(codo(&ws, &["frobnicate"]).code, 2);
    assert_eq!(codo(&ws, &["ingest", "x.csv"]).code, 2);
    assert_eq!(codo(&ws, &["stats", "--verbose"]).code, 2);
    assert_eq!(
        codo(
            &ws,
            &["ingest", "x.csv", "--rule", "r.mm", "--naming", "sha"]
        )
        .code,
        2
    );
}

#[test]
fn module_errors_exit_1_with_one_line() {
    let dir = tempdir().unwrap();
    let ws = dir.path().join("ws");
    fixture_workspace(&ws);
    let run = codo(
        &ws,
        &[
            "query",
            "-e",
            "SELECT ?s WHERE { ?s ?p ?o } UNION { ?s ?p ?o }",
        ],
    );
    assert_eq!(run.code, 1);
    assert_eq!(run.stderr.lines().count(), 1, "{}", run.stderr);
    assert!(run.stderr.contains("UNION"));

    let rule = dir.path().join("bad.mm");
    std::fs::write(
        &rule,
        "Individual: @A*\nTypes: Patient\nFacts: 'favourite colour' @D*",
    )
    .unwrap();
    let run = codo(
        &ws,
        &[
            "ingest",
            path(&data("karnataka_sample.csv")),
            "--rule",
            path(&rule),
        ],
    );
    assert_eq!(run.code, 1);
    assert_eq!(run.stderr.lines().count(), 1, "{}", run.stderr);
    assert!(run.stderr.contains("favourite colour"));
    // Nothing was applied, so the workspace is still materialized.
    assert!(ok(&ws, &["stats"]).contains("materialized: yes"));
}

#[test]
fn ingest_without_vocabulary_is_refused() {
    let dir = tempdir().unwrap();
    let ws = dir.path().join("ws");
    let run = codo(
        &ws,
        &[
            "ingest",
            path(&data("karnataka_sample.csv")),
            "--rule",
            path(&data("codo.mm")),
        ],
    );
    assert_eq!(run.code, 1);
    assert!(run.stderr.contains("vocabulary"));
}

#[test]
fn vocab_command_matches_data_file() {
    let dir = tempdir().unwrap();
    let out = ok(&dir.path().join("ws"), &["vocab"]);
    assert_eq!(out, std::fs::read_to_string(data("codo.ttl")).unwrap());
}

#[test]
fn serve_requires_materialization() {
    let dir = tempdir().unwrap();
    let ws = dir.path().join("ws");
    ok(&ws, &["load", path(&data("codo.ttl"))]);
    let run = codo(&ws, &["serve", "--port", "0"]);
    assert_eq!(run.code, 1);
    assert!(run.stderr.contains("not materialized"));
}
