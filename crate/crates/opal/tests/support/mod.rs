//! Instance directories on disk, a CLI driver and a fixture-answering
//! HTTP endpoint for the integration tests.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread::JoinHandle;

use opal::cli::run_cli;
use opal::format::{save_database, save_fixtures};
use opal_core::tools::{Args, ExtractionBackend, FixtureSet, MockBackend, Tool, ToolContext};
use serde_json::{json, Value as Json};

use crate::common::golden::Golden;

/// Writes `g` as an instance directory under `root` and returns its path.
pub fn write_instance(root: &Path, g: &Golden) -> PathBuf {
    let i = &g.instance;
    let dir = root.join(&i.id);
    std::fs::create_dir_all(dir.join("docs")).unwrap();
    std::fs::write(dir.join("instruction.txt"), format!("{}\n", i.instruction)).unwrap();
    for (n, d) in i.documents.iter().enumerate() {
        std::fs::write(dir.join("docs").join(format!("{:02}.txt", n + 1)), d).unwrap();
    }
    std::fs::write(dir.join("before.json"), save_database(&i.db_before)).unwrap();
    if let Some(gold) = &i.db_gold {
        std::fs::write(dir.join("gold.json"), save_database(gold)).unwrap();
    }
    std::fs::write(dir.join("fixtures.json"), save_fixtures(&g.fixtures)).unwrap();
    let meta = json!({"id": i.id, "task_type": i.task_type, "domain": i.domain});
    std::fs::write(
        dir.join("meta.json"),
        serde_json::to_string_pretty(&meta).unwrap(),
    )
    .unwrap();
    dir
}

/// Writes every instance and a manifest listing them; returns the manifest.
pub fn write_suite(root: &Path, suite: &[Golden]) -> PathBuf {
    let ids: Vec<&str> = suite.iter().map(|g| g.instance.id.as_str()).collect();
    for g in suite {
        write_instance(root, g);
    }
    let manifest = root.join("manifest.json");
    std::fs::write(
        &manifest,
        serde_json::to_string_pretty(&json!({ "instances": ids })).unwrap(),
    )
    .unwrap();
    manifest
}

pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn cli(args: &[&str]) -> CliOutput {
    cli_env(args, &|_| None)
}

pub fn cli_env(args: &[&str], env: &dyn Fn(&str) -> Option<String>) -> CliOutput {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("opal")
        .chain(args.iter().copied())
        .map(String::from);
    let code = run_cli(argv, env, &mut out, &mut err);
    CliOutput {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

pub fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// An `/extract` endpoint answering from fixtures the way a chat model
/// would: some replies wrap the JSON in prose or a code fence.
pub struct FixtureServer {
    pub url: String,
    pub requests: Arc<AtomicUsize>,
    server: Arc<tiny_http::Server>,
    handle: Option<JoinHandle<()>>,
}

impl FixtureServer {
    pub fn start(fixtures: FixtureSet) -> Self {
        let server = Arc::new(tiny_http::Server::http("127.0.0.1:0").unwrap());
        let url = format!("http://{}", server.server_addr().to_ip().unwrap());
        let requests = Arc::new(AtomicUsize::new(0));
        let (srv, count) = (server.clone(), requests.clone());
        let model = MockBackend::new(fixtures);
        let handle = std::thread::spawn(move || {
            for mut req in srv.incoming_requests() {
                let n = count.fetch_add(1, Ordering::SeqCst);
                let mut body = String::new();
                let _ = req.as_reader().read_to_string(&mut body);
                let (status, reply) = answer(&model, req.url(), &body, n);
                let resp = tiny_http::Response::from_string(reply.to_string())
                    .with_status_code(status)
                    .with_header(
                        "Content-Type: application/json"
                            .parse::<tiny_http::Header>()
                            .unwrap(),
                    );
                let _ = req.respond(resp);
            }
        });
        Self {
            url,
            requests,
            server,
            handle: Some(handle),
        }
    }
}

impl Drop for FixtureServer {
    fn drop(&mut self) {
        self.server.unblock();
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }
}

fn answer(model: &MockBackend, url: &str, body: &str, n: usize) -> (u16, Json) {
    if url != "/extract" {
        return (404, json!({"error": format!("no route {url}")}));
    }
    let Ok(req) = serde_json::from_str::<Json>(body) else {
        return (400, json!({"error": "bad json"}));
    };
    let tool: Tool = match serde_json::from_value(req["tool"].clone()) {
        Ok(t) => t,
        Err(e) => return (400, json!({"error": e.to_string()})),
    };
    let args: Args = match serde_json::from_value(req["args"].clone()) {
        Ok(a) => a,
        Err(e) => return (400, json!({"error": e.to_string()})),
    };
    match model.extract(tool, &args, &ToolContext::default()) {
        Ok(v) => {
            let text = serde_json::to_string(&v).unwrap();
            let output = match n % 3 {
                0 => text,
                1 => format!("Here is the result:\n```json\n{text}\n```"),
                _ => format!("The answer is {text}."),
            };
            (200, json!({ "output": output }))
        }
        Err(e) => (422, json!({ "error": e.to_string() })),
    }
}
