//! Live OpenAI-compatible chat-completion client.

use std::time::Duration;

use serde::Deserialize;
use serde_json::json;

use super::{ChatProvider, ChatRequest, ChatResponse, ProviderError};

/// Environment variable the live provider reads its key from by default.
pub const DEFAULT_API_KEY_ENV: &str = "SKYHARVEST_API_KEY";

/// Connection settings for the live provider.
#[derive(Clone)]
pub struct ProviderConfig {
    /// Full URL of the chat-completions endpoint.
    pub endpoint_url: String,
    /// Name of the environment variable holding the bearer token.
    pub api_key_env: String,
    pub timeout: Duration,
    pub max_retries: u32,
    /// Base backoff between attempts; doubles per retry.
    pub backoff: Duration,
}

impl Default for ProviderConfig {
    fn default() -> Self {
        Self {
            endpoint_url: "https://api.openai.com/v1/chat/completions".into(),
            api_key_env: DEFAULT_API_KEY_ENV.into(),
            timeout: Duration::from_secs(60),
            max_retries: 2,
            backoff: Duration::from_millis(500),
        }
    }
}

impl std::fmt::Debug for ProviderConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProviderConfig")
            .field("endpoint_url", &self.endpoint_url)
            .field("api_key_env", &self.api_key_env)
            .field("timeout", &self.timeout)
            .field("max_retries", &self.max_retries)
            .field("backoff", &self.backoff)
            .finish()
    }
}

/// Blocking HTTP provider. The key is captured at construction and never
/// appears in `Debug` output, logs, or fixtures.
pub struct HttpProvider {
    config: ProviderConfig,
    api_key: String,
    client: reqwest::blocking::Client,
}

impl std::fmt::Debug for HttpProvider {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HttpProvider")
            .field("config", &self.config)
            .field("api_key", &"<redacted>")
            .finish()
    }
}

#[derive(Deserialize)]
struct WireResponse {
    choices: Vec<WireChoice>,
    #[serde(default)]
    model: Option<String>,
}

#[derive(Deserialize)]
struct WireChoice {
    message: WireMessage,
}

#[derive(Deserialize)]
struct WireMessage {
    #[serde(default)]
    content: Option<String>,
}

impl HttpProvider {
    /// Reads the API key from the configured environment variable.
    pub fn from_env(config: ProviderConfig) -> Result<Self, ProviderError> {
        let api_key = std::env::var(&config.api_key_env)
            .map_err(|_| ProviderError::MissingApiKey(config.api_key_env.clone()))?;
        Self::with_key(config, api_key)
    }

    /// For endpoints that take no credentials (local mock servers), an empty
    /// key skips the Authorization header.
    pub fn with_key(config: ProviderConfig, api_key: String) -> Result<Self, ProviderError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| ProviderError::Transport(format!("client build: {e}")))?;
        Ok(Self {
            config,
            api_key,
            client,
        })
    }

    fn attempt(&self, request: &ChatRequest) -> Result<ChatResponse, ProviderError> {
        let body = json!({
            "model": request.model,
            "messages": request.messages,
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        });
        let mut call = self
            .client
            .post(&self.config.endpoint_url)
            .header("Content-Type", "application/json")
            .json(&body);
        if !self.api_key.is_empty() {
            call = call.bearer_auth(&self.api_key);
        }
        let response = call.send().map_err(|e| {
            if e.is_timeout() {
                ProviderError::Timeout(self.config.timeout)
            } else {
                ProviderError::Transport(e.to_string())
            }
        })?;
        let status = response.status();
        let text = response
            .text()
            .map_err(|e| ProviderError::Transport(e.to_string()))?;
        if !status.is_success() {
            return Err(ProviderError::Status {
                status: status.as_u16(),
                attempts: 1,
                body: truncate(&text, 400),
            });
        }
        let wire: WireResponse = serde_json::from_str(&text)
            .map_err(|e| ProviderError::Transport(format!("malformed response body: {e}")))?;
        let content = wire
            .choices
            .into_iter()
            .next()
            .and_then(|c| c.message.content)
            .unwrap_or_default();
        if content.is_empty() {
            return Err(ProviderError::EmptyContent);
        }
        Ok(ChatResponse {
            content,
            model: wire.model,
            attempts: 1,
        })
    }

    fn should_retry(error: &ProviderError) -> bool {
        match error {
            ProviderError::Timeout(_) | ProviderError::Transport(_) => true,
            ProviderError::Status { status, .. } => *status >= 500,
            _ => false,
        }
    }
}

impl ChatProvider for HttpProvider {
    fn complete(&mut self, request: &ChatRequest) -> Result<ChatResponse, ProviderError> {
        request.validate()?;
        let mut delay = self.config.backoff;
        let attempts_allowed = self.config.max_retries + 1;
        let mut last_error = None;
        for attempt in 1..=attempts_allowed {
            match self.attempt(request) {
                Ok(mut response) => {
                    response.attempts = attempt;
                    return Ok(response);
                }
                Err(e) if Self::should_retry(&e) && attempt < attempts_allowed => {
                    log::warn!("attempt {attempt} failed ({e}); retrying in {delay:?}");
                    std::thread::sleep(delay);
                    delay *= 2;
                    last_error = Some(e);
                }
                Err(e) => {
                    return Err(match e {
                        ProviderError::Status { status, body, .. } => ProviderError::Status {
                            status,
                            attempts: attempt,
                            body,
                        },
                        other => other,
                    })
                }
            }
        }
        Err(last_error.unwrap_or(ProviderError::EmptyContent))
    }

    fn name(&self) -> &'static str {
        "http"
    }
}

fn truncate(text: &str, max: usize) -> String {
    match text.char_indices().nth(max) {
        Some((idx, _)) => text[..idx].to_string(),
        None => text.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn debug_output_redacts_the_key() {
        let provider = HttpProvider::with_key(
            ProviderConfig {
                endpoint_url: "http://127.0.0.1:1/v1/chat/completions".into(),
                ..ProviderConfig::default()
            },
            "sk-very-secret".into(),
        )
        .unwrap();
        let debug = format!("{provider:?}");
        assert!(!debug.contains("sk-very-secret"));
        assert!(debug.contains("<redacted>"));
    }

    #[test]
    fn missing_key_is_a_configuration_error() {
        let config = ProviderConfig {
            api_key_env: "SKYHARVEST_TEST_KEY_THAT_DOES_NOT_EXIST".into(),
            ..ProviderConfig::default()
        };
        assert!(matches!(
            HttpProvider::from_env(config),
            Err(ProviderError::MissingApiKey(_))
        ));
    }
}
