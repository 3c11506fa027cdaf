use std::collections::{HashMap, VecDeque};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use base64::Engine;
use serde::Deserialize;
use serde_json::{json, Value};

use super::prompt::PromptPayload;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransportError {
    /// Worth retrying: timeouts, rate limits, server errors.
    #[error("transient transport failure: {0}")]
    Transient(String),
    #[error("transport failure: {0}")]
    Fatal(String),
}

impl TransportError {
    pub fn is_transient(&self) -> bool {
        matches!(self, TransportError::Transient(_))
    }
}

/// A chat-completion service that answers one prompt with one text reply.
pub trait Transport: Send + Sync {
    fn complete(&self, payload: &PromptPayload) -> Result<String, TransportError>;
}

/// Chat-completions HTTP client (OpenAI-compatible request shape).
pub struct HttpTransport {
    agent: ureq::Agent,
    endpoint: String,
    api_key: String,
    temperature: f64,
}

impl HttpTransport {
    pub fn new(endpoint: impl Into<String>, api_key: impl Into<String>, timeout: Duration) -> Self {
        let agent: ureq::Agent =
            ureq::Agent::config_builder().timeout_global(Some(timeout)).http_status_as_error(false).build().into();
        HttpTransport { agent, endpoint: endpoint.into(), api_key: api_key.into(), temperature: 0.0 }
    }

    /// Reads the API key from `env_var`.
    pub fn from_env(endpoint: impl Into<String>, env_var: &str, timeout: Duration) -> Result<Self, TransportError> {
        let key = std::env::var(env_var)
            .map_err(|_| TransportError::Fatal(format!("environment variable {env_var} is not set")))?;
        Ok(Self::new(endpoint, key, timeout))
    }

    pub fn request_body(&self, payload: &PromptPayload) -> Value {
        request_body(payload, self.temperature)
    }
}

pub fn request_body(payload: &PromptPayload, temperature: f64) -> Value {
    let mut content = vec![json!({"type": "text", "text": payload.text})];
    if let Some(img) = &payload.image {
        let b64 = base64::engine::general_purpose::STANDARD.encode(&img.bytes);
        content.push(json!({
            "type": "image_url",
            "image_url": {"url": format!("data:{};base64,{b64}", img.media_type)}
        }));
    }
    json!({
        "model": payload.model_id,
        "temperature": temperature,
        "messages": [{"role": "user", "content": content}],
    })
}

pub fn extract_reply(body: &Value) -> Result<String, TransportError> {
    body.pointer("/choices/0/message/content")
        .and_then(Value::as_str)
        .map(str::to_string)
        .ok_or_else(|| TransportError::Fatal("response has no choices[0].message.content".into()))
}

impl Transport for HttpTransport {
    fn complete(&self, payload: &PromptPayload) -> Result<String, TransportError> {
        let mut resp = self
            .agent
            .post(&self.endpoint)
            .header("Authorization", &format!("Bearer {}", self.api_key))
            .send_json(self.request_body(payload))
            .map_err(|e| TransportError::Transient(e.to_string()))?;
        let status = resp.status().as_u16();
        let body = resp.body_mut().read_to_string().map_err(|e| TransportError::Transient(e.to_string()))?;
        match status {
            200..=299 => {
                let v: Value = serde_json::from_str(&body)
                    .map_err(|e| TransportError::Fatal(format!("invalid JSON response: {e}")))?;
                extract_reply(&v)
            }
            408 | 409 | 429 | 500..=599 => Err(TransportError::Transient(format!("HTTP {status}: {body}"))),
            _ => Err(TransportError::Fatal(format!("HTTP {status}: {body}"))),
        }
    }
}

#[derive(Debug, Deserialize)]
struct FixtureLine {
    #[serde(default)]
    key: Option<String>,
    #[serde(default)]
    prompt: Option<String>,
    reply: String,
}

/// Offline transport answering from request→reply fixtures.
///
/// Replies are matched by cache key first, then by exact prompt text.
/// Scripted responses, when queued, are consumed before any fixture lookup.
#[derive(Default)]
pub struct MockTransport {
    by_key: HashMap<String, String>,
    by_prompt: HashMap<String, String>,
    script: Mutex<VecDeque<Result<String, TransportError>>>,
    calls: AtomicUsize,
}

impl MockTransport {
    pub fn new() -> Self {
        Self::default()
    }

    /// Reads JSON lines of the form `{"key": ..., "reply": ...}` or
    /// `{"prompt": ..., "reply": ...}`.
    pub fn from_fixture_file(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let mut mock = MockTransport::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let f: FixtureLine =
                serde_json::from_str(line).map_err(|e| format!("{} line {}: {e}", path.display(), i + 1))?;
            match (f.key, f.prompt) {
                (Some(k), _) => mock.by_key.insert(k, f.reply),
                (None, Some(p)) => mock.by_prompt.insert(p, f.reply),
                (None, None) => return Err(format!("{} line {}: needs \"key\" or \"prompt\"", path.display(), i + 1)),
            };
        }
        Ok(mock)
    }

    pub fn with_reply_for_key(mut self, key: impl Into<String>, reply: impl Into<String>) -> Self {
        self.by_key.insert(key.into(), reply.into());
        self
    }

    pub fn with_reply_for_prompt(mut self, prompt: impl Into<String>, reply: impl Into<String>) -> Self {
        self.by_prompt.insert(prompt.into(), reply.into());
        self
    }

    /// Queues responses returned in order, regardless of the request.
    pub fn scripted(responses: impl IntoIterator<Item = Result<String, TransportError>>) -> Self {
        MockTransport { script: Mutex::new(responses.into_iter().collect()), ..Self::default() }
    }

    pub fn call_count(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl Transport for MockTransport {
    fn complete(&self, payload: &PromptPayload) -> Result<String, TransportError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        if let Some(next) = self.script.lock().unwrap_or_else(|e| e.into_inner()).pop_front() {
            return next;
        }
        self.by_key
            .get(&payload.cache_key)
            .or_else(|| self.by_prompt.get(&payload.text))
            .cloned()
            .ok_or_else(|| TransportError::Fatal(format!("no mock reply for request {}", payload.cache_key)))
    }
}

/// Transport for cache-only runs: every miss is a failure.
pub struct CacheOnlyTransport;

impl Transport for CacheOnlyTransport {
    fn complete(&self, payload: &PromptPayload) -> Result<String, TransportError> {
        Err(TransportError::Fatal(format!("cache-only mode: no cached reply for {}", payload.cache_key)))
    }
}
