//! Chat-completion request/response types and the backend trait the agent
//! talks to. Transport, caching and retries live behind [`LanguageModel`] in
//! the std crate; the scripted oracle backend is in [`crate::oracle::script`].

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

/// Default model identifier.
pub const DEFAULT_MODEL: &str = "gpt-3.5-turbo";
/// Sampling temperature for reward-function calls.
pub const REWARD_TEMPERATURE: f64 = 0.0;
/// Sampling temperature for relabeler and goal-generator calls.
pub const CREATIVE_TEMPERATURE: f64 = 0.9;
pub const DEFAULT_MAX_TOKENS: u32 = 1024;

/// Which agent component issued a call.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LmRole {
    Relabel,
    Reward,
    Goalgen,
}

impl LmRole {
    pub fn default_temperature(self) -> f64 {
        match self {
            LmRole::Reward => REWARD_TEMPERATURE,
            LmRole::Relabel | LmRole::Goalgen => CREATIVE_TEMPERATURE,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LmRole::Relabel => "relabel",
            LmRole::Reward => "reward",
            LmRole::Goalgen => "goalgen",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MessageRole {
    System,
    User,
    Assistant,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Message {
    pub role: MessageRole,
    pub content: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model: String,
    pub messages: Vec<Message>,
    pub temperature: f64,
    pub max_tokens: u32,
    /// Issuing component. Audit metadata only: not sent on the wire and not
    /// part of the cache key.
    #[serde(skip)]
    pub purpose: Option<LmRole>,
}

impl ChatRequest {
    /// Single user-message request with the role's default temperature.
    pub fn for_role(role: LmRole, model: &str, prompt: String) -> Self {
        ChatRequest {
            model: String::from(model),
            messages: vec![Message { role: MessageRole::User, content: prompt }],
            temperature: role.default_temperature(),
            max_tokens: DEFAULT_MAX_TOKENS,
            purpose: Some(role),
        }
    }

    /// Text of the last user message.
    pub fn prompt(&self) -> &str {
        self.messages
            .iter()
            .rev()
            .find(|m| m.role == MessageRole::User)
            .map(|m| m.content.as_str())
            .unwrap_or("")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Remote,
    Cache,
    Oracle,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatResponse {
    pub content: String,
    pub backend: Backend,
    pub token_estimate: u32,
    #[serde(default)]
    pub truncated: bool,
}

impl ChatResponse {
    pub fn new(content: String, backend: Backend) -> Self {
        let token_estimate = estimate_tokens(&content);
        ChatResponse { content, backend, token_estimate, truncated: false }
    }
}

/// Rough token count: one token per four bytes, rounded up.
pub fn estimate_tokens(text: &str) -> u32 {
    text.len().div_ceil(4) as u32
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum LmError {
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("response truncated at the token limit")]
    Truncated,
    #[error("replay miss: no cached response for key {0}")]
    ReplayMiss(String),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
}

/// A chat-completion backend. Implementations must be safe to call from
/// several seeds at once.
pub trait LanguageModel: Sync {
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, LmError>;
}

impl<T: LanguageModel + ?Sized> LanguageModel for &T {
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, LmError> {
        (**self).complete(request)
    }
}
