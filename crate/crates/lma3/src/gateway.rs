//! Chat-completion gateway: cache-first dispatch to a remote
//! OpenAI-compatible endpoint or to the scripted oracle.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Condvar, Mutex, RwLock};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use lma3_core::lm::{Backend, ChatRequest, ChatResponse, LanguageModel, LmError, Message};
use lma3_core::oracle::ScriptedOracle;
use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const ENV_ENDPOINT: &str = "LMA3_ENDPOINT";
pub const ENV_API_KEY: &str = "LMA3_API_KEY";
pub const ENV_BACKEND: &str = "LMA3_BACKEND";
pub const DEFAULT_ENDPOINT: &str = "https://api.openai.com/v1/chat/completions";
pub const DEFAULT_IN_FLIGHT: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BackendKind {
    Remote,
    CacheReplay,
    Oracle,
}

impl FromStr for BackendKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "remote" => Ok(BackendKind::Remote),
            "cache-replay" | "cache" | "replay" => Ok(BackendKind::CacheReplay),
            "oracle" => Ok(BackendKind::Oracle),
            other => Err(format!("unknown backend `{other}`")),
        }
    }
}

impl BackendKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BackendKind::Remote => "remote",
            BackendKind::CacheReplay => "cache-replay",
            BackendKind::Oracle => "oracle",
        }
    }
}

#[derive(Serialize)]
struct KeyMaterial<'a> {
    model: &'a str,
    temperature: f64,
    messages: &'a [Message],
}

/// Hex SHA-256 over model, temperature and messages.
pub fn cache_key(request: &ChatRequest) -> String {
    let material =
        KeyMaterial { model: &request.model, temperature: request.temperature, messages: &request.messages };
    let bytes = serde_json::to_vec(&material).expect("key material serializes");
    hex::encode(Sha256::digest(&bytes))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: String,
    pub request: ChatRequest,
    pub response: String,
    pub timestamp: u64,
}

/// Append-only JSONL response store with an in-memory index. The first entry
/// for a key wins.
#[derive(Debug)]
pub struct ResponseCache {
    path: Option<PathBuf>,
    index: RwLock<HashMap<String, String>>,
    file: Mutex<Option<File>>,
}

impl ResponseCache {
    pub fn in_memory() -> Self {
        ResponseCache { path: None, index: RwLock::new(HashMap::new()), file: Mutex::new(None) }
    }

    /// Loads `path` if present. Lines that fail to parse (for instance a
    /// half-written last line) are skipped.
    pub fn open(path: impl AsRef<Path>) -> io::Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut index = HashMap::new();
        if path.exists() {
            for line in BufReader::new(File::open(&path)?).lines() {
                if let Ok(entry) = serde_json::from_str::<CacheEntry>(&line?) {
                    index.entry(entry.key).or_insert(entry.response);
                }
            }
        }
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let file = OpenOptions::new().create(true).append(true).open(&path)?;
        Ok(ResponseCache { path: Some(path), index: RwLock::new(index), file: Mutex::new(Some(file)) })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn len(&self) -> usize {
        self.index.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, key: &str) -> Option<String> {
        self.index.read().unwrap().get(key).cloned()
    }

    pub fn put(&self, key: &str, request: &ChatRequest, response: &str) -> io::Result<()> {
        let mut file = self.file.lock().unwrap();
        if self.index.read().unwrap().contains_key(key) {
            return Ok(());
        }
        if let Some(f) = file.as_mut() {
            let entry = CacheEntry {
                key: key.into(),
                request: request.clone(),
                response: response.into(),
                timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
            };
            let mut line = serde_json::to_string(&entry)?;
            line.push('\n');
            f.write_all(line.as_bytes())?;
            f.flush()?;
        }
        self.index.write().unwrap().insert(key.into(), response.into());
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RetryPolicy {
    pub attempts: u32,
    pub base_delay: Duration,
    /// Relative jitter, applied as a uniform factor in `1 ± jitter`.
    pub jitter: f64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy { attempts: 5, base_delay: Duration::from_secs(1), jitter: 0.2 }
    }
}

impl RetryPolicy {
    /// Delay before retry number `n` (0-based).
    pub fn delay(&self, n: u32) -> Duration {
        let base = self.base_delay.as_secs_f64() * 2f64.powi(n as i32);
        let factor =
            if self.jitter > 0.0 { 1.0 + rand::rng().random_range(-self.jitter..=self.jitter) } else { 1.0 };
        Duration::from_secs_f64((base * factor).max(0.0))
    }
}

#[derive(Clone, Debug)]
pub struct RemoteConfig {
    pub endpoint: String,
    pub api_key: Option<String>,
    pub timeout: Duration,
}

impl RemoteConfig {
    /// Endpoint from `LMA3_ENDPOINT`, key from `LMA3_API_KEY` or `OPENAI_API_KEY`.
    pub fn from_env() -> Self {
        RemoteConfig {
            endpoint: std::env::var(ENV_ENDPOINT).unwrap_or_else(|_| DEFAULT_ENDPOINT.into()),
            api_key: std::env::var(ENV_API_KEY).or_else(|_| std::env::var("OPENAI_API_KEY")).ok(),
            timeout: Duration::from_secs(120),
        }
    }
}

#[derive(Deserialize)]
struct WireResponse {
    choices: Vec<WireChoice>,
}

#[derive(Deserialize)]
struct WireChoice {
    message: WireMessage,
    #[serde(default)]
    finish_reason: Option<String>,
}

#[derive(Deserialize)]
struct WireMessage {
    #[serde(default)]
    content: Option<String>,
}

enum Attempt {
    Done { content: String, truncated: bool },
    Retry(String),
    Fatal(String),
}

pub struct RemoteClient {
    agent: ureq::Agent,
    config: RemoteConfig,
    retry: RetryPolicy,
}

impl RemoteClient {
    pub fn new(config: RemoteConfig, retry: RetryPolicy) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(config.timeout))
            .http_status_as_error(false)
            .build()
            .into();
        RemoteClient { agent, config, retry }
    }

    fn attempt(&self, request: &ChatRequest) -> Attempt {
        let mut call = self.agent.post(&self.config.endpoint);
        if let Some(key) = &self.config.api_key {
            call = call.header("Authorization", &format!("Bearer {key}"));
        }
        let mut response = match call.send_json(request) {
            Ok(r) => r,
            Err(e) => return Attempt::Retry(e.to_string()),
        };
        let status = response.status().as_u16();
        let body = match response.body_mut().read_to_string() {
            Ok(b) => b,
            Err(e) => return Attempt::Retry(e.to_string()),
        };
        if status == 429 || status >= 500 {
            return Attempt::Retry(format!("HTTP {status}"));
        }
        if status != 200 {
            return Attempt::Fatal(format!("HTTP {status}: {body}"));
        }
        let parsed: WireResponse = match serde_json::from_str(&body) {
            Ok(p) => p,
            Err(e) => return Attempt::Retry(format!("malformed response: {e}")),
        };
        let Some(choice) = parsed.choices.into_iter().next() else {
            return Attempt::Retry("response has no choices".into());
        };
        Attempt::Done {
            content: choice.message.content.unwrap_or_default(),
            truncated: choice.finish_reason.as_deref() == Some("length"),
        }
    }

    /// Sends with retries. Returns the content and whether it was cut at the
    /// token limit.
    pub fn send(&self, request: &ChatRequest) -> Result<(String, bool), LmError> {
        let mut last = String::new();
        for n in 0..self.retry.attempts.max(1) {
            if n > 0 {
                std::thread::sleep(self.retry.delay(n - 1));
            }
            match self.attempt(request) {
                Attempt::Done { content, truncated } => return Ok((content, truncated)),
                Attempt::Fatal(msg) => return Err(LmError::Transport(msg)),
                Attempt::Retry(msg) => last = msg,
            }
        }
        Err(LmError::Transport(format!("gave up after {} attempts: {last}", self.retry.attempts.max(1))))
    }
}

/// Counting semaphore for remote calls.
#[derive(Debug)]
struct Limiter {
    free: Mutex<usize>,
    cv: Condvar,
}

impl Limiter {
    fn new(n: usize) -> Self {
        Limiter { free: Mutex::new(n.max(1)), cv: Condvar::new() }
    }

    fn acquire(&self) -> LimiterGuard<'_> {
        let mut free = self.free.lock().unwrap();
        while *free == 0 {
            free = self.cv.wait(free).unwrap();
        }
        *free -= 1;
        LimiterGuard(self)
    }
}

struct LimiterGuard<'a>(&'a Limiter);

impl Drop for LimiterGuard<'_> {
    fn drop(&mut self) {
        *self.0.free.lock().unwrap() += 1;
        self.0.cv.notify_one();
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GatewayStats {
    pub cache_hits: u64,
    pub remote_calls: u64,
    pub oracle_calls: u64,
}

/// The LM every agent component talks to.
pub struct Gateway {
    kind: BackendKind,
    cache: Option<ResponseCache>,
    remote: Option<RemoteClient>,
    oracle: ScriptedOracle,
    limiter: Limiter,
    cache_hits: AtomicU64,
    remote_calls: AtomicU64,
    oracle_calls: AtomicU64,
}

impl Gateway {
    /// Scripted oracle behind an optional cache.
    pub fn oracle(oracle: ScriptedOracle, cache: Option<ResponseCache>) -> Self {
        Self::build(BackendKind::Oracle, cache, None, oracle)
    }

    /// Cache-only: misses are errors.
    pub fn replay(cache: ResponseCache) -> Self {
        Self::build(BackendKind::CacheReplay, Some(cache), None, ScriptedOracle::default())
    }

    pub fn remote(client: RemoteClient, cache: Option<ResponseCache>) -> Self {
        Self::build(BackendKind::Remote, cache, Some(client), ScriptedOracle::default())
    }

    fn build(
        kind: BackendKind,
        cache: Option<ResponseCache>,
        remote: Option<RemoteClient>,
        oracle: ScriptedOracle,
    ) -> Self {
        Gateway {
            kind,
            cache,
            remote,
            oracle,
            limiter: Limiter::new(DEFAULT_IN_FLIGHT),
            cache_hits: AtomicU64::new(0),
            remote_calls: AtomicU64::new(0),
            oracle_calls: AtomicU64::new(0),
        }
    }

    pub fn with_in_flight_limit(mut self, n: usize) -> Self {
        self.limiter = Limiter::new(n);
        self
    }

    pub fn kind(&self) -> BackendKind {
        self.kind
    }

    pub fn cache(&self) -> Option<&ResponseCache> {
        self.cache.as_ref()
    }

    pub fn stats(&self) -> GatewayStats {
        GatewayStats {
            cache_hits: self.cache_hits.load(Ordering::Relaxed),
            remote_calls: self.remote_calls.load(Ordering::Relaxed),
            oracle_calls: self.oracle_calls.load(Ordering::Relaxed),
        }
    }

    fn store(&self, key: &str, request: &ChatRequest, content: &str) -> Result<(), LmError> {
        if let Some(cache) = &self.cache {
            cache
                .put(key, request, content)
                .map_err(|e| LmError::Transport(format!("cache write failed: {e}")))?;
        }
        Ok(())
    }

    fn complete_remote(&self, client: &RemoteClient, request: &ChatRequest) -> Result<String, LmError> {
        let _slot = self.limiter.acquire();
        self.remote_calls.fetch_add(1, Ordering::Relaxed);
        let (content, truncated) = client.send(request)?;
        if !truncated {
            return Ok(content);
        }
        let mut bigger = request.clone();
        bigger.max_tokens = request.max_tokens.saturating_mul(2);
        self.remote_calls.fetch_add(1, Ordering::Relaxed);
        match client.send(&bigger)? {
            (content, false) => Ok(content),
            (_, true) => Err(LmError::Truncated),
        }
    }
}

impl LanguageModel for Gateway {
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, LmError> {
        if request.messages.is_empty() {
            return Err(LmError::InvalidRequest("no messages".into()));
        }
        if !(0.0..=2.0).contains(&request.temperature) {
            return Err(LmError::InvalidRequest(format!(
                "temperature {} outside [0, 2]",
                request.temperature
            )));
        }
        let key = cache_key(request);
        if let Some(hit) = self.cache.as_ref().and_then(|c| c.get(&key)) {
            self.cache_hits.fetch_add(1, Ordering::Relaxed);
            return Ok(ChatResponse::new(hit, Backend::Cache));
        }
        let content = match self.kind {
            BackendKind::CacheReplay => return Err(LmError::ReplayMiss(key)),
            BackendKind::Oracle => {
                self.oracle_calls.fetch_add(1, Ordering::Relaxed);
                let response = self.oracle.complete(request)?;
                self.store(&key, request, &response.content)?;
                return Ok(response);
            }
            BackendKind::Remote => {
                let client = self
                    .remote
                    .as_ref()
                    .ok_or_else(|| LmError::Transport("no remote client configured".into()))?;
                self.complete_remote(client, request)?
            }
        };
        self.store(&key, request, &content)?;
        Ok(ChatResponse::new(content, Backend::Remote))
    }
}
