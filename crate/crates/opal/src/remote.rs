//! Extraction and planning through a remote chat model over HTTP.
//!
//! Tool calls go to `POST {endpoint}/extract` with a JSON body
//! `{model, tool, args, demonstrations, prompt, attempt}`; the reply is
//! `{"output": text}` where `text` holds the tool result as JSON. A reply
//! that cannot be read is asked for once more. Plans come from
//! `POST {endpoint}/chat/completions` in the usual chat-completion shape.

use std::sync::{Condvar, Mutex};
use std::thread;
use std::time::Duration;

use opal_core::planner::{system_prompt, CompletionClient, CompletionError};
use opal_core::tools::{
    Args, Demonstration, ExtractionBackend, Kind, Tool, ToolContext, ToolError, Value,
};
use serde_json::{json, Value as Json};

use crate::config::RemoteSettings;

const TRANSPORT_RETRIES: u32 = 2;

/// Caps the number of requests in flight.
struct Gate {
    free: Mutex<usize>,
    cv: Condvar,
}

impl Gate {
    fn new(n: usize) -> Self {
        Self {
            free: Mutex::new(n.max(1)),
            cv: Condvar::new(),
        }
    }

    fn run<T>(&self, f: impl FnOnce() -> T) -> T {
        {
            let mut free = self.free.lock().unwrap_or_else(|e| e.into_inner());
            while *free == 0 {
                free = self.cv.wait(free).unwrap_or_else(|e| e.into_inner());
            }
            *free -= 1;
        }
        let out = f();
        *self.free.lock().unwrap_or_else(|e| e.into_inner()) += 1;
        self.cv.notify_one();
        out
    }
}

struct Http {
    agent: ureq::Agent,
    endpoint: String,
    api_key: Option<String>,
    gate: Gate,
}

impl Http {
    fn new(settings: &RemoteSettings) -> Result<Self, String> {
        let endpoint = settings.endpoint.clone().ok_or_else(|| {
            format!(
                "no endpoint configured; set {}",
                crate::config::ENV_ENDPOINT
            )
        })?;
        let agent = ureq::AgentBuilder::new()
            .timeout(Duration::from_secs(settings.request_timeout_s))
            .build();
        Ok(Self {
            agent,
            endpoint: endpoint.trim_end_matches('/').to_string(),
            api_key: settings.api_key.clone(),
            gate: Gate::new(settings.max_in_flight),
        })
    }

    /// Posts `body`, retrying transport failures and server errors.
    fn post(&self, path: &str, body: &Json) -> Result<Json, String> {
        let url = format!("{}/{path}", self.endpoint);
        self.gate.run(|| {
            let mut last = String::new();
            for attempt in 0..=TRANSPORT_RETRIES {
                if attempt > 0 {
                    thread::sleep(Duration::from_millis(100 << (2 * attempt)));
                }
                let mut req = self.agent.post(&url);
                if let Some(k) = &self.api_key {
                    req = req.set("Authorization", &format!("Bearer {k}"));
                }
                match req.send_json(body) {
                    Ok(resp) => {
                        return resp
                            .into_json::<Json>()
                            .map_err(|e| format!("{url}: unreadable reply: {e}"))
                    }
                    Err(ureq::Error::Status(code, resp)) if code < 500 => {
                        let text = resp.into_string().unwrap_or_default();
                        return Err(format!(
                            "{url}: HTTP {code}: {}",
                            text.chars().take(200).collect::<String>()
                        ));
                    }
                    Err(e) => last = format!("{url}: {e}"),
                }
            }
            Err(last)
        })
    }
}

/// The first JSON value in a model reply, looking inside code fences and
/// past surrounding prose.
pub fn reply_json(text: &str) -> Option<Json> {
    let t = text.trim();
    if let Ok(v) = serde_json::from_str(t) {
        return Some(v);
    }
    if let Some(start) = t.find("```") {
        let body = &t[start + 3..];
        let body = body.strip_prefix("json").unwrap_or(body);
        if let Some(end) = body.find("```") {
            if let Ok(v) = serde_json::from_str(body[..end].trim()) {
                return Some(v);
            }
        }
    }
    for (open, close) in [('[', ']'), ('{', '}')] {
        if let (Some(s), Some(e)) = (t.find(open), t.rfind(close)) {
            if s < e {
                if let Ok(v) = serde_json::from_str(&t[s..=e]) {
                    return Some(v);
                }
            }
        }
    }
    None
}

fn fits(tool: Tool, v: &Value) -> bool {
    match (tool.signature().returns, v) {
        (Kind::List, Value::List(items)) => items.iter().all(|i| matches!(i, Value::Text(_))),
        (Kind::Record, Value::Record(_)) => true,
        (Kind::Text, Value::Text(_)) => true,
        _ => false,
    }
}

fn text<'a>(args: &'a Args, name: &str) -> &'a str {
    args.get(name).and_then(Value::as_str).unwrap_or("")
}

fn names(args: &Args, name: &str) -> Vec<String> {
    args.get(name)
        .and_then(Value::as_list)
        .map(|l| {
            l.iter()
                .filter_map(|v| v.as_str().map(String::from))
                .collect()
        })
        .unwrap_or_default()
}

/// Demonstrations that bear on this call.
fn relevant<'a>(tool: Tool, args: &Args, ctx: &'a ToolContext) -> Vec<&'a Demonstration> {
    let attrs = names(args, "attribute_list");
    ctx.demonstrations
        .iter()
        .filter(|d| match tool {
            Tool::Ner => d.table == text(args, "type"),
            Tool::Re => d.table == text(args, "relation"),
            Tool::Ae => attrs.contains(&d.column),
            _ => false,
        })
        .collect()
}

/// The prompt for one extraction call.
pub fn tool_prompt(tool: Tool, args: &Args, demos: &[&Demonstration]) -> String {
    let mut p = String::new();
    let task = match tool {
        Tool::Ner => format!(
            "Extract every entity of type \"{}\" mentioned in the text. \
             Answer with a JSON list of strings, each written as in the text.",
            text(args, "type")
        ),
        Tool::Re => format!(
            "Find the entities that stand in the relation \"{}\" to \"{}\" in the text. \
             Answer with a JSON list of strings.",
            text(args, "relation"),
            text(args, "head_e")
        ),
        Tool::Ae => format!(
            "Extract the attributes {} of \"{}\" from the text. Answer with a JSON object \
             mapping each attribute to its value as a string, or null when the text does not give it.",
            serde_json::to_string(&names(args, "attribute_list")).unwrap_or_default(),
            text(args, "entity")
        ),
        Tool::Classify => format!(
            "Choose the label among {} that best describes the text. Answer with the label as a JSON string.",
            serde_json::to_string(&names(args, "label_list")).unwrap_or_default()
        ),
        _ => String::new(),
    };
    p.push_str(&task);
    p.push('\n');
    if !demos.is_empty() {
        p.push_str("\nValues already in the database, to match in form and granularity:\n");
        for d in demos {
            let vals: Vec<String> = d.values.iter().map(|v| v.to_string()).collect();
            p.push_str(&format!(
                "- {}.{}: {}\n",
                d.table,
                d.column,
                vals.join("; ")
            ));
        }
    }
    p.push_str("\nText:\n");
    p.push_str(text(args, "text"));
    p.push('\n');
    p
}

/// Extraction backend asking a remote model.
pub struct RemoteBackend {
    http: Http,
    model: String,
}

impl RemoteBackend {
    pub fn new(settings: &RemoteSettings) -> Result<Self, String> {
        Ok(Self {
            http: Http::new(settings)?,
            model: settings.model.clone(),
        })
    }
}

impl ExtractionBackend for RemoteBackend {
    fn name(&self) -> &str {
        "remote"
    }

    fn extract(&self, tool: Tool, args: &Args, ctx: &ToolContext) -> Result<Value, ToolError> {
        let demos = relevant(tool, args, ctx);
        let mut prompt = tool_prompt(tool, args, &demos);
        let mut last = String::new();
        for attempt in 0..2 {
            let body = json!({
                "model": self.model,
                "tool": tool.name(),
                "args": args,
                "demonstrations": demos,
                "prompt": prompt,
                "attempt": attempt,
            });
            let reply = self
                .http
                .post("extract", &body)
                .map_err(ToolError::BackendUnavailable)?;
            let Some(output) = reply.get("output").and_then(Json::as_str) else {
                return Err(ToolError::BackendUnavailable(format!(
                    "reply without an `output` string: {reply}"
                )));
            };
            let parsed = reply_json(output).and_then(|j| serde_json::from_value::<Value>(j).ok());
            let parsed = match (parsed, tool) {
                (None, Tool::Classify) if !output.trim().is_empty() => {
                    Some(Value::text(output.trim().trim_matches('"')))
                }
                (p, _) => p,
            };
            match parsed {
                Some(v) if fits(tool, &v) => return Ok(v),
                _ => {
                    last = output.chars().take(200).collect();
                    prompt.push_str(&format!(
                        "\nYour previous answer could not be read: {last}\nAnswer with the JSON value only.\n"
                    ));
                }
            }
        }
        Err(ToolError::MalformedOutput {
            tool,
            expected: tool.signature().returns,
            detail: last,
        })
    }
}

/// Chat-completion client for the planner.
pub struct HttpCompletionClient {
    http: Http,
    model: String,
    system: String,
}

impl HttpCompletionClient {
    pub fn new(settings: &RemoteSettings) -> Result<Self, String> {
        Ok(Self {
            http: Http::new(settings)?,
            model: settings.model.clone(),
            system: system_prompt(),
        })
    }
}

impl CompletionClient for HttpCompletionClient {
    fn complete(&mut self, prompt: &str) -> Result<String, CompletionError> {
        let body = json!({
            "model": self.model,
            "temperature": 0,
            "messages": [
                {"role": "system", "content": self.system},
                {"role": "user", "content": prompt},
            ],
        });
        let reply = self
            .http
            .post("chat/completions", &body)
            .map_err(CompletionError::Unavailable)?;
        reply
            .pointer("/choices/0/message/content")
            .and_then(Json::as_str)
            .map(String::from)
            .ok_or_else(|| {
                CompletionError::Unavailable(format!("reply without a message: {reply}"))
            })
    }
}
