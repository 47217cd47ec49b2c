//! Text-completion gateway: one abstraction for utterance generation,
//! style transformation, and LLM-backed talk analysis.
//!
//! Two backends: an OpenAI-compatible chat-completion client over HTTP(S),
//! and a deterministic mock driven by an ordered rule script. The gateway
//! never inspects game state; all intelligence lives above it.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GatewayError {
    #[error("gateway unavailable after {attempts} attempt(s): {last}")]
    Unavailable { attempts: u32, last: String },
    #[error("unparseable gateway response: {0}")]
    BadResponse(String),
    #[error("gateway configuration: {0}")]
    Config(String),
}

/// Sampling parameters sent with each completion request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationParams {
    pub temperature: f64,
    pub max_tokens: u32,
    pub presence_penalty: f64,
    pub frequency_penalty: f64,
    /// Empty means "use the backend's configured model".
    #[serde(default)]
    pub model: String,
}

impl Default for GenerationParams {
    fn default() -> Self {
        GenerationParams {
            temperature: 1.0,
            max_tokens: 200,
            presence_penalty: 0.0,
            frequency_penalty: 0.0,
            model: String::new(),
        }
    }
}

/// Cumulative usage counters; monotone over the life of a gateway.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Usage {
    pub requests: u64,
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
}

#[derive(Debug, Default)]
struct Counters {
    requests: AtomicU64,
    prompt_tokens: AtomicU64,
    completion_tokens: AtomicU64,
}

impl Counters {
    fn record(&self, prompt_tokens: u64, completion_tokens: u64) {
        self.requests.fetch_add(1, Ordering::Relaxed);
        self.prompt_tokens
            .fetch_add(prompt_tokens, Ordering::Relaxed);
        self.completion_tokens
            .fetch_add(completion_tokens, Ordering::Relaxed);
    }

    fn snapshot(&self) -> Usage {
        Usage {
            requests: self.requests.load(Ordering::Relaxed),
            prompt_tokens: self.prompt_tokens.load(Ordering::Relaxed),
            completion_tokens: self.completion_tokens.load(Ordering::Relaxed),
        }
    }
}

/// Rough token count for backends that do not report usage.
fn approx_tokens(text: &str) -> u64 {
    text.split_whitespace().count() as u64
}

pub trait Gateway: Send + Sync {
    fn complete(&self, prompt: &str, params: &GenerationParams) -> Result<String, GatewayError>;

    fn usage(&self) -> Usage;
}

/// One mock rule: if the prompt contains `contains`, answer `completion`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MockRule {
    pub contains: String,
    pub completion: String,
}

/// Ordered rules; first match wins, otherwise the default completion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MockScript {
    #[serde(default)]
    pub default: String,
    #[serde(default, rename = "rule")]
    pub rules: Vec<MockRule>,
}

impl Default for MockScript {
    fn default() -> Self {
        MockScript {
            default: crate::protocol::SKIP_TOKEN.to_string(),
            rules: Vec::new(),
        }
    }
}

impl MockScript {
    pub fn with_default(default: impl Into<String>) -> Self {
        MockScript {
            default: default.into(),
            rules: Vec::new(),
        }
    }

    pub fn rule(mut self, contains: impl Into<String>, completion: impl Into<String>) -> Self {
        self.rules.push(MockRule {
            contains: contains.into(),
            completion: completion.into(),
        });
        self
    }

    pub fn from_toml(text: &str) -> Result<Self, GatewayError> {
        toml::from_str(text).map_err(|e| GatewayError::Config(e.to_string()))
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self, GatewayError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| GatewayError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    fn answer(&self, prompt: &str) -> String {
        for rule in &self.rules {
            if prompt.contains(&rule.contains) {
                return rule.completion.clone();
            }
        }
        self.default.clone()
    }
}

/// Deterministic scripted backend used by tests and tournaments.
pub struct MockGateway {
    script: MockScript,
    counters: Counters,
}

impl MockGateway {
    pub fn new(script: MockScript) -> Self {
        MockGateway {
            script,
            counters: Counters::default(),
        }
    }
}

impl Gateway for MockGateway {
    fn complete(&self, prompt: &str, _params: &GenerationParams) -> Result<String, GatewayError> {
        let completion = self.script.answer(prompt);
        self.counters
            .record(approx_tokens(prompt), approx_tokens(&completion));
        Ok(completion)
    }

    fn usage(&self) -> Usage {
        self.counters.snapshot()
    }
}

/// Connection settings for the HTTP backend, usually read from the
/// `[llm]` table of a TOML config file. The API key is taken from the
/// environment variable named by `api_key_env`, never from the file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HttpGatewayConfig {
    pub endpoint: String,
    pub model: String,
    pub api_key_env: String,
    pub timeout_ms: u64,
    pub retries: u32,
    pub requests_per_minute: u32,
}

impl Default for HttpGatewayConfig {
    fn default() -> Self {
        HttpGatewayConfig {
            endpoint: String::new(),
            model: String::new(),
            api_key_env: "OPENAI_API_KEY".to_string(),
            timeout_ms: 30_000,
            retries: 3,
            requests_per_minute: 60,
        }
    }
}

impl HttpGatewayConfig {
    pub fn from_toml(text: &str) -> Result<Self, GatewayError> {
        #[derive(Deserialize)]
        struct Wrapper {
            llm: HttpGatewayConfig,
        }
        let wrapper: Wrapper =
            toml::from_str(text).map_err(|e| GatewayError::Config(e.to_string()))?;
        Ok(wrapper.llm)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self, GatewayError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| GatewayError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }
}

#[derive(Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    messages: [ChatMessage<'a>; 1],
    temperature: f64,
    max_tokens: u32,
    presence_penalty: f64,
    frequency_penalty: f64,
}

#[derive(Serialize)]
struct ChatMessage<'a> {
    role: &'a str,
    content: &'a str,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
    #[serde(default)]
    usage: Option<ChatUsage>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatChoiceMessage,
}

#[derive(Deserialize)]
struct ChatChoiceMessage {
    content: Option<String>,
}

#[derive(Deserialize)]
struct ChatUsage {
    #[serde(default)]
    prompt_tokens: u64,
    #[serde(default)]
    completion_tokens: u64,
}

/// OpenAI-compatible chat-completion client with retries, backoff, and a
/// serialized request-rate limiter.
pub struct HttpGateway {
    config: HttpGatewayConfig,
    api_key: Option<String>,
    agent: ureq::Agent,
    counters: Counters,
    limiter: Mutex<Option<Instant>>,
}

impl HttpGateway {
    pub fn new(config: HttpGatewayConfig) -> Result<Self, GatewayError> {
        if config.endpoint.is_empty() {
            return Err(GatewayError::Config("llm.endpoint is not set".into()));
        }
        let api_key = std::env::var(&config.api_key_env).ok();
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_millis(config.timeout_ms)))
            .build()
            .into();
        Ok(HttpGateway {
            config,
            api_key,
            agent,
            counters: Counters::default(),
            limiter: Mutex::new(None),
        })
    }

    /// Serialized token bucket: at most `requests_per_minute`, one caller
    /// admitted at a time.
    fn acquire_slot(&self) {
        if self.config.requests_per_minute == 0 {
            return;
        }
        let interval = Duration::from_secs_f64(60.0 / self.config.requests_per_minute as f64);
        let mut last = self.limiter.lock().expect("limiter lock");
        if let Some(prev) = *last {
            let elapsed = prev.elapsed();
            if elapsed < interval {
                std::thread::sleep(interval - elapsed);
            }
        }
        *last = Some(Instant::now());
    }

    fn attempt(&self, prompt: &str, params: &GenerationParams) -> Result<String, String> {
        let model = if params.model.is_empty() {
            &self.config.model
        } else {
            &params.model
        };
        let body = ChatRequest {
            model,
            messages: [ChatMessage {
                role: "user",
                content: prompt,
            }],
            temperature: params.temperature,
            max_tokens: params.max_tokens,
            presence_penalty: params.presence_penalty,
            frequency_penalty: params.frequency_penalty,
        };
        let url = format!(
            "{}/chat/completions",
            self.config.endpoint.trim_end_matches('/')
        );
        let mut request = self
            .agent
            .post(&url)
            .header("content-type", "application/json");
        if let Some(key) = &self.api_key {
            request = request.header("authorization", &format!("Bearer {key}"));
        }
        let mut response = request.send_json(&body).map_err(|e| e.to_string())?;
        let parsed: ChatResponse = response
            .body_mut()
            .read_json()
            .map_err(|e| format!("body: {e}"))?;
        let content = parsed
            .choices
            .first()
            .and_then(|c| c.message.content.clone())
            .ok_or_else(|| "no choices in response".to_string())?;
        let (pt, ct) = match parsed.usage {
            Some(u) => (u.prompt_tokens, u.completion_tokens),
            None => (approx_tokens(prompt), approx_tokens(&content)),
        };
        self.counters.record(pt, ct);
        Ok(content)
    }
}

impl Gateway for HttpGateway {
    fn complete(&self, prompt: &str, params: &GenerationParams) -> Result<String, GatewayError> {
        let attempts = self.config.retries.max(1);
        let mut last = String::new();
        for attempt in 0..attempts {
            self.acquire_slot();
            match self.attempt(prompt, params) {
                Ok(content) => return Ok(content),
                Err(err) => {
                    last = err;
                    if attempt + 1 < attempts {
                        let backoff = Duration::from_millis(200 * (1 << attempt.min(4)));
                        std::thread::sleep(backoff);
                    }
                }
            }
        }
        Err(GatewayError::Unavailable { attempts, last })
    }

    fn usage(&self) -> Usage {
        self.counters.snapshot()
    }
}
