use std::time::Duration;

use serde::Serialize;
use thiserror::Error;

pub const ENV_URL: &str = "COGBASIC_LLM_URL";
pub const ENV_MODEL: &str = "COGBASIC_LLM_MODEL";
pub const ENV_KEY: &str = "COGBASIC_LLM_KEY";

/// Connection settings for an OpenAI-compatible chat completions endpoint.
#[derive(Clone, PartialEq)]
pub struct EndpointConfig {
    pub base_url: String,
    pub model: String,
    pub api_key: Option<String>,
    pub temperature: f64,
    pub timeout: Duration,
    pub max_retries: u32,
    /// First retry delay; each further retry doubles it.
    pub backoff_base: Duration,
}

impl std::fmt::Debug for EndpointConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EndpointConfig")
            .field("base_url", &self.base_url)
            .field("model", &self.model)
            .field("api_key", &self.api_key.as_ref().map(|_| "<redacted>"))
            .field("temperature", &self.temperature)
            .field("timeout", &self.timeout)
            .field("max_retries", &self.max_retries)
            .field("backoff_base", &self.backoff_base)
            .finish()
    }
}

impl EndpointConfig {
    pub fn new(base_url: impl Into<String>, model: impl Into<String>) -> Self {
        Self {
            base_url: base_url.into(),
            model: model.into(),
            api_key: None,
            temperature: 0.0,
            timeout: Duration::from_secs(120),
            max_retries: 2,
            backoff_base: Duration::from_secs(1),
        }
    }

    /// Builds a config from explicit values, falling back to the
    /// `COGBASIC_LLM_*` environment variables.
    pub fn resolve(url: Option<String>, model: Option<String>, key: Option<String>) -> Result<Self, LlmError> {
        let env = |name: &str| std::env::var(name).ok().filter(|v| !v.trim().is_empty());
        let url = url
            .or_else(|| env(ENV_URL))
            .ok_or_else(|| LlmError::Config(format!("no endpoint configured; pass --endpoint or set {ENV_URL}")))?;
        let model = model
            .or_else(|| env(ENV_MODEL))
            .ok_or_else(|| LlmError::Config(format!("no model configured; pass --model or set {ENV_MODEL}")))?;
        let mut config = Self::new(url, model);
        config.api_key = key.or_else(|| env(ENV_KEY));
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), LlmError> {
        if !(self.base_url.starts_with("http://") || self.base_url.starts_with("https://")) {
            return Err(LlmError::Config(format!("endpoint {:?} is not an http(s) URL", self.base_url)));
        }
        if self.model.trim().is_empty() {
            return Err(LlmError::Config("model name is empty".into()));
        }
        if !self.temperature.is_finite() || self.temperature < 0.0 {
            return Err(LlmError::Config(format!("temperature must be >= 0, got {}", self.temperature)));
        }
        if self.timeout.is_zero() {
            return Err(LlmError::Config("timeout must be positive".into()));
        }
        Ok(())
    }

    pub fn completions_url(&self) -> String {
        format!("{}/chat/completions", self.base_url.trim_end_matches('/'))
    }
}

#[derive(Debug, Error)]
pub enum LlmError {
    #[error("transport error after {attempts} attempt(s): {message}")]
    Transport { attempts: u32, message: String },
    #[error("endpoint returned HTTP {status} after {attempts} attempt(s): {body}")]
    Api { status: u16, body: String, attempts: u32 },
    #[error("request timed out after {attempts} attempt(s)")]
    Timeout { attempts: u32 },
    #[error("unexpected completion payload: {detail}")]
    Response { detail: String, attempts: u32 },
    #[error("{operation}: reply did not follow the required format ({reason})")]
    OutputFormat { operation: &'static str, reason: String, raw: String },
    #[error("configuration error: {0}")]
    Config(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChatMessage {
    pub role: Role,
    pub content: String,
}

impl ChatMessage {
    pub fn system(content: impl Into<String>) -> Self {
        Self { role: Role::System, content: content.into() }
    }

    pub fn user(content: impl Into<String>) -> Self {
        Self { role: Role::User, content: content.into() }
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        Self { role: Role::Assistant, content: content.into() }
    }
}

#[derive(Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    messages: &'a [ChatMessage],
    temperature: f64,
}

/// Serialized request body. Identical inputs give identical bytes.
pub fn request_body(config: &EndpointConfig, messages: &[ChatMessage]) -> String {
    serde_json::to_string(&ChatRequest { model: &config.model, messages, temperature: config.temperature })
        .expect("request serializes")
}

/// Anything that turns a conversation into one assistant reply.
pub trait ChatBackend: Send + Sync {
    fn complete(&self, messages: &[ChatMessage]) -> Result<String, LlmError>;

    /// Short name used in reports.
    fn label(&self) -> String;
}

impl<T: ChatBackend + ?Sized> ChatBackend for &T {
    fn complete(&self, messages: &[ChatMessage]) -> Result<String, LlmError> {
        (**self).complete(messages)
    }

    fn label(&self) -> String {
        (**self).label()
    }
}

/// Blocking HTTP client; safe to share between threads.
#[derive(Clone)]
pub struct HttpChatClient {
    config: EndpointConfig,
    agent: ureq::Agent,
}

pub(crate) fn excerpt(s: &str, max: usize) -> String {
    if s.chars().count() <= max {
        s.to_string()
    } else {
        let cut: String = s.chars().take(max).collect();
        format!("{cut}...")
    }
}

enum Attempt {
    Retry(LlmError),
    Fatal(LlmError),
}

impl HttpChatClient {
    pub fn new(config: EndpointConfig) -> Result<Self, LlmError> {
        config.validate()?;
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(config.timeout))
            .http_status_as_error(false)
            .build()
            .into();
        Ok(Self { config, agent })
    }

    pub fn config(&self) -> &EndpointConfig {
        &self.config
    }

    fn attempt(&self, body: &str, attempts: u32) -> Result<String, Attempt> {
        let mut request = self.agent.post(self.config.completions_url()).header("Content-Type", "application/json");
        if let Some(key) = &self.config.api_key {
            request = request.header("Authorization", format!("Bearer {key}"));
        }
        let mut response = match request.send(body) {
            Ok(r) => r,
            Err(ureq::Error::Timeout(_)) => return Err(Attempt::Retry(LlmError::Timeout { attempts })),
            Err(e) => return Err(Attempt::Retry(LlmError::Transport { attempts, message: e.to_string() })),
        };
        let status = response.status().as_u16();
        let text = match response.body_mut().read_to_string() {
            Ok(t) => t,
            Err(ureq::Error::Timeout(_)) => return Err(Attempt::Retry(LlmError::Timeout { attempts })),
            Err(e) => return Err(Attempt::Retry(LlmError::Transport { attempts, message: e.to_string() })),
        };
        if status >= 500 {
            return Err(Attempt::Retry(LlmError::Api { status, body: excerpt(&text, 300), attempts }));
        }
        if status >= 400 {
            return Err(Attempt::Fatal(LlmError::Api { status, body: excerpt(&text, 300), attempts }));
        }
        parse_completion(&text).map_err(|detail| Attempt::Fatal(LlmError::Response { detail, attempts }))
    }
}

/// Extracts `choices[0].message.content` from a completion payload.
pub fn parse_completion(payload: &str) -> Result<String, String> {
    let v: serde_json::Value = serde_json::from_str(payload).map_err(|e| format!("invalid JSON: {e}"))?;
    v.pointer("/choices/0/message/content")
        .and_then(|c| c.as_str())
        .map(str::to_string)
        .ok_or_else(|| format!("no choices[0].message.content in {}", excerpt(payload, 200)))
}

impl ChatBackend for HttpChatClient {
    fn complete(&self, messages: &[ChatMessage]) -> Result<String, LlmError> {
        let body = request_body(&self.config, messages);
        if let Some(last) = messages.last() {
            log::debug!("prompt to {}: {}", self.config.model, excerpt(&last.content, 400));
        }
        let mut delay = self.config.backoff_base;
        let mut attempts = 0;
        loop {
            attempts += 1;
            match self.attempt(&body, attempts) {
                Ok(reply) => {
                    log::debug!("reply from {}: {}", self.config.model, excerpt(&reply, 400));
                    return Ok(reply);
                }
                Err(Attempt::Fatal(e)) => return Err(e),
                Err(Attempt::Retry(e)) if attempts > self.config.max_retries => return Err(e),
                Err(Attempt::Retry(e)) => {
                    log::warn!("attempt {attempts} failed ({e}); retrying in {delay:?}");
                    std::thread::sleep(delay);
                    delay *= 2;
                }
            }
        }
    }

    fn label(&self) -> String {
        self.config.model.clone()
    }
}

/// One chat completion with a system and a user message.
pub fn llm_call(config: &EndpointConfig, system: &str, user: &str) -> Result<String, LlmError> {
    HttpChatClient::new(config.clone())?.complete(&[ChatMessage::system(system), ChatMessage::user(user)])
}
