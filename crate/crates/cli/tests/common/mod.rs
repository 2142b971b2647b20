#![allow(dead_code)]

use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Output, Stdio};

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn finish(output: Output) -> Run {
    Run {
        code: output.status.code().unwrap_or(-1),
        stdout: String::from_utf8(output.stdout).unwrap(),
        stderr: String::from_utf8(output.stderr).unwrap(),
    }
}

pub fn codo(ws: &Path, args: &[&str]) -> Run {
    let output = Command::new(env!("CARGO_BIN_EXE_codo"))
        .args(args)
        .env("CODO_WS", ws)
        .output()
        .expect("codo runs");
    finish(output)
}

/// Runs `codo` and insists on success.
pub fn ok(ws: &Path, args: &[&str]) -> String {
    let run = codo(ws, args);
    assert_eq!(run.code, 0, "codo {args:?} failed: {}", run.stderr);
    run.stdout
}

pub fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Vocabulary and the twelve-person fixture, materialized.
pub fn fixture_workspace(ws: &Path) {
    ok(ws, &["load", path(&data("codo.ttl"))]);
    ok(ws, &["load", path(&data("close_contacts.ttl"))]);
    ok(ws, &["reason"]);
}

/// Vocabulary plus the sample case sheet, materialized.
pub fn sample_workspace(ws: &Path) {
    ok(ws, &["load", path(&data("codo.ttl"))]);
    ok(
        ws,
        &[
            "ingest",
            path(&data("karnataka_sample.csv")),
            "--rule",
            path(&data("codo.mm")),
        ],
    );
    ok(ws, &["reason"]);
}

/// A running `codo serve`, killed on drop.
pub struct Server {
    child: Child,
    pub base: String,
}

impl Server {
    pub fn start(ws: &Path, extra: &[&str]) -> Server {
        let mut child = Command::new(env!("CARGO_BIN_EXE_codo"))
            .args(["serve", "--port", "0"])
            .args(extra)
            .env("CODO_WS", ws)
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .expect("server starts");
        let mut line = String::new();
        BufReader::new(child.stdout.take().unwrap())
            .read_line(&mut line)
            .unwrap();
        let base = line
            .trim()
            .strip_prefix("listening on ")
            .unwrap_or_else(|| panic!("unexpected banner {line:?}"));
        Server {
            base: base.to_owned(),
            child,
        }
    }

    pub fn url(&self, path: &str) -> String {
        format!("{}{path}", self.base)
    }
}

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}
