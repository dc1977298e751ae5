//! Chat-completion transports.

use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::Path;
use std::sync::Mutex;
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const API_KEY_ENV: &str = "DGL_LLM_API_KEY";
pub const BASE_URL_ENV: &str = "DGL_LLM_BASE_URL";
pub const DEFAULT_BASE_URL: &str = "https://api.openai.com/v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub role: Role,
    pub content: String,
}

impl Message {
    pub fn system(content: impl Into<String>) -> Self {
        Message { role: Role::System, content: content.into() }
    }

    pub fn user(content: impl Into<String>) -> Self {
        Message { role: Role::User, content: content.into() }
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        Message { role: Role::Assistant, content: content.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub model: String,
    pub temperature: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_tokens: Option<u32>,
}

impl Default for Params {
    fn default() -> Self {
        Params { model: "o3".into(), temperature: 1.0, max_tokens: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransportError {
    #[error("replay transcript exhausted after {0} response(s)")]
    Exhausted(usize),
    #[error("{0}")]
    Config(String),
    #[error("request failed: {0}")]
    Request(String),
    #[error("unexpected response: {0}")]
    Response(String),
}

pub trait LlmTransport: Send + Sync {
    fn send(&self, messages: &[Message], params: &Params) -> Result<String, TransportError>;
}

/// Hex sha256 of the canonical JSON of a request.
pub fn request_hash(messages: &[Message], params: &Params) -> String {
    let body = serde_json::json!({ "model": params.model, "temperature": params.temperature, "messages": messages });
    hex::encode(Sha256::digest(body.to_string().as_bytes()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub request_hash: Option<String>,
    pub response: String,
}

/// Serves canned responses. Entries with a `request_hash` answer only the
/// matching request; the rest are handed out in file order.
#[derive(Debug)]
pub struct ReplayTransport {
    entries: Vec<ReplayEntry>,
    used: Mutex<Vec<bool>>,
}

impl ReplayTransport {
    pub fn new(entries: Vec<ReplayEntry>) -> Self {
        let used = Mutex::new(vec![false; entries.len()]);
        ReplayTransport { entries, used }
    }

    pub fn from_responses<S: Into<String>>(responses: impl IntoIterator<Item = S>) -> Self {
        ReplayTransport::new(
            responses.into_iter().map(|r| ReplayEntry { request_hash: None, response: r.into() }).collect(),
        )
    }

    pub fn from_jsonl(text: &str) -> Result<Self, TransportError> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let entry = serde_json::from_str(line)
                .map_err(|e| TransportError::Config(format!("replay line {}: {e}", i + 1)))?;
            entries.push(entry);
        }
        Ok(ReplayTransport::new(entries))
    }

    pub fn from_file(path: &Path) -> Result<Self, TransportError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| TransportError::Config(format!("cannot read replay file {}: {e}", path.display())))?;
        ReplayTransport::from_jsonl(&text)
    }

    pub fn remaining(&self) -> usize {
        self.used.lock().expect("replay lock").iter().filter(|u| !**u).count()
    }
}

impl LlmTransport for ReplayTransport {
    fn send(&self, messages: &[Message], params: &Params) -> Result<String, TransportError> {
        let hash = request_hash(messages, params);
        let mut used = self.used.lock().expect("replay lock");
        let free = |i: &usize| !used[*i];
        let idx = (0..self.entries.len())
            .filter(free)
            .find(|&i| self.entries[i].request_hash.as_deref() == Some(hash.as_str()))
            .or_else(|| (0..self.entries.len()).filter(free).find(|&i| self.entries[i].request_hash.is_none()));
        match idx {
            Some(i) => {
                used[i] = true;
                Ok(self.entries[i].response.clone())
            }
            None => Err(TransportError::Exhausted(used.iter().filter(|u| **u).count())),
        }
    }
}

/// Appends every exchange of an inner transport to a replay transcript.
pub struct RecordingTransport<T> {
    inner: T,
    out: Mutex<File>,
}

impl<T: LlmTransport> RecordingTransport<T> {
    pub fn new(inner: T, path: &Path) -> std::io::Result<Self> {
        let out = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(RecordingTransport { inner, out: Mutex::new(out) })
    }
}

impl<T: LlmTransport> LlmTransport for RecordingTransport<T> {
    fn send(&self, messages: &[Message], params: &Params) -> Result<String, TransportError> {
        let response = self.inner.send(messages, params)?;
        let entry = ReplayEntry { request_hash: Some(request_hash(messages, params)), response: response.clone() };
        let line = serde_json::to_string(&entry).expect("plain struct");
        let mut out = self.out.lock().expect("recording lock");
        writeln!(out, "{line}").map_err(|e| TransportError::Request(format!("cannot record exchange: {e}")))?;
        Ok(response)
    }
}

/// Chat-completions over HTTPS.
pub struct HttpTransport {
    agent: ureq::Agent,
    url: String,
    api_key: String,
    pub retries: u32,
    pub backoff: Duration,
}

impl HttpTransport {
    pub fn new(base_url: &str, api_key: &str) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(30)))
            .http_status_as_error(false)
            .build()
            .into();
        HttpTransport {
            agent,
            url: format!("{}/chat/completions", base_url.trim_end_matches('/')),
            api_key: api_key.to_string(),
            retries: 3,
            backoff: Duration::from_secs(1),
        }
    }

    /// Reads `DGL_LLM_API_KEY` and `DGL_LLM_BASE_URL`.
    pub fn from_env() -> Result<Self, TransportError> {
        let key = std::env::var(API_KEY_ENV)
            .ok()
            .filter(|k| !k.trim().is_empty())
            .ok_or_else(|| TransportError::Config(format!("{API_KEY_ENV} is not set")))?;
        let base = std::env::var(BASE_URL_ENV).unwrap_or_else(|_| DEFAULT_BASE_URL.to_string());
        Ok(HttpTransport::new(&base, &key))
    }
}

fn completion_text(body: &serde_json::Value) -> Option<String> {
    body.get("choices")?.get(0)?.get("message")?.get("content")?.as_str().map(str::to_string)
}

impl LlmTransport for HttpTransport {
    fn send(&self, messages: &[Message], params: &Params) -> Result<String, TransportError> {
        let mut body = serde_json::json!({ "model": params.model, "messages": messages, "temperature": params.temperature });
        if let Some(n) = params.max_tokens {
            body["max_tokens"] = n.into();
        }
        let mut delay = self.backoff;
        let mut attempt = 0;
        loop {
            let result = self
                .agent
                .post(&self.url)
                .header("Authorization", &format!("Bearer {}", self.api_key))
                .send_json(&body);
            let retryable = match result {
                Ok(mut resp) => {
                    let status = resp.status().as_u16();
                    if status == 200 {
                        let json: serde_json::Value =
                            resp.body_mut().read_json().map_err(|e| TransportError::Response(e.to_string()))?;
                        return completion_text(&json)
                            .ok_or_else(|| TransportError::Response("no choices[0].message.content".into()));
                    }
                    let text = resp.body_mut().read_to_string().unwrap_or_default();
                    let err = TransportError::Request(format!("HTTP {status}: {}", text.chars().take(200).collect::<String>()));
                    if status != 429 && status < 500 {
                        return Err(err);
                    }
                    err
                }
                Err(e) => TransportError::Request(e.to_string()),
            };
            if attempt >= self.retries {
                return Err(retryable);
            }
            attempt += 1;
            thread::sleep(delay);
            delay *= 2;
        }
    }
}
