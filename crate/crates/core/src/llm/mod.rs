//! Chat-completion provider abstraction.
//!
//! Three interchangeable providers sit behind [`ChatProvider`]: a live
//! OpenAI-compatible HTTP client, a fixture store for offline replay, and a
//! scripted queue for tests. Nothing outside the live provider ever touches
//! the network.

mod fixture;
mod http;
mod scripted;

pub use fixture::{FixtureProvider, FixtureRecorder};
pub use http::{HttpProvider, ProviderConfig};
pub use scripted::{ScriptedFailure, ScriptedProvider};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub content: String,
}

impl ChatMessage {
    pub fn system(content: impl Into<String>) -> Self {
        Self {
            role: Role::System,
            content: content.into(),
        }
    }

    pub fn user(content: impl Into<String>) -> Self {
        Self {
            role: Role::User,
            content: content.into(),
        }
    }
}

/// One chat-completion request. The first message carries the system role
/// definition; later messages hold the task and any reflection feedback.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model: String,
    pub messages: Vec<ChatMessage>,
    pub temperature: f64,
    pub max_tokens: u32,
}

impl ChatRequest {
    pub fn validate(&self) -> Result<(), ProviderError> {
        if self.messages.is_empty() {
            return Err(ProviderError::InvalidRequest("no messages".into()));
        }
        if self.messages[0].role != Role::System {
            return Err(ProviderError::InvalidRequest(
                "first message must carry the system role".into(),
            ));
        }
        if !(self.temperature >= 0.0) {
            return Err(ProviderError::InvalidRequest(format!(
                "temperature must be non-negative, got {}",
                self.temperature
            )));
        }
        Ok(())
    }

    /// Stable digest used as the fixture key.
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let body = serde_json::to_vec(self).expect("request serializes");
        let mut hasher = Sha256::new();
        hasher.update(&body);
        hex_encode(&hasher.finalize())
    }
}

fn hex_encode(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        use std::fmt::Write;
        write!(s, "{b:02x}").unwrap();
    }
    s
}

/// Completion text plus light metadata.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChatResponse {
    pub content: String,
    /// Model identifier echoed by the provider, when available.
    #[serde(default)]
    pub model: Option<String>,
    /// Attempts used, including the successful one.
    #[serde(default = "one")]
    pub attempts: u32,
}

fn one() -> u32 {
    1
}

#[derive(Debug, Error)]
pub enum ProviderError {
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("request timed out after {0:?}")]
    Timeout(std::time::Duration),
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("provider returned status {status} after {attempts} attempt(s): {body}")]
    Status {
        status: u16,
        attempts: u32,
        body: String,
    },
    #[error("provider returned empty content")]
    EmptyContent,
    #[error("no fixture recorded for request digest {0}")]
    MissingFixture(String),
    #[error("fixture collision for digest {digest}: stored response differs")]
    FixtureCollision { digest: String },
    #[error("fixture store error: {0}")]
    FixtureStore(String),
    #[error("scripted provider queue exhausted")]
    ScriptExhausted,
    #[error("missing API key: set the {0} environment variable")]
    MissingApiKey(String),
}

impl ProviderError {
    /// True when the pipeline should treat this as a failed response rather
    /// than a configuration bug (maps onto the response_success gate).
    pub fn is_response_failure(&self) -> bool {
        !matches!(
            self,
            ProviderError::InvalidRequest(_) | ProviderError::MissingApiKey(_)
        )
    }
}

/// A blocking chat-completion backend.
pub trait ChatProvider {
    fn complete(&mut self, request: &ChatRequest) -> Result<ChatResponse, ProviderError>;

    /// Short name for logs and audit trails.
    fn name(&self) -> &'static str;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn request() -> ChatRequest {
        ChatRequest {
            model: "test-model".into(),
            messages: vec![ChatMessage::system("sys"), ChatMessage::user("task")],
            temperature: 0.7,
            max_tokens: 512,
        }
    }

    #[test]
    fn digest_is_stable_and_content_sensitive() {
        let a = request();
        let mut b = request();
        assert_eq!(a.digest(), b.digest());
        b.messages[1].content.push('!');
        assert_ne!(a.digest(), b.digest());
    }

    #[test]
    fn validation_requires_leading_system_message() {
        let mut r = request();
        r.messages.remove(0);
        assert!(r.validate().is_err());
        assert!(request().validate().is_ok());
    }
}
