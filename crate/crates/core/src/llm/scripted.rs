//! Scripted provider: a queue of canned outcomes for tests.

use std::collections::VecDeque;

use super::{ChatProvider, ChatRequest, ChatResponse, ProviderError};

/// Pops one scripted outcome per call, in order. An exhausted queue maps to
/// a response failure so pipelines exercise their error paths.
#[derive(Debug, Default)]
pub struct ScriptedProvider {
    queue: VecDeque<Result<String, ScriptedFailure>>,
    calls: usize,
}

/// Failure kinds a script can inject.
#[derive(Debug, Clone, Copy)]
pub enum ScriptedFailure {
    Timeout,
    Transport,
    EmptyContent,
}

impl ScriptedProvider {
    pub fn new() -> Self {
        Self::default()
    }

    /// Provider that answers each call with the next response in `responses`.
    pub fn from_responses<I, S>(responses: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut p = Self::new();
        for r in responses {
            p.push_response(r);
        }
        p
    }

    pub fn push_response(&mut self, content: impl Into<String>) {
        self.queue.push_back(Ok(content.into()));
    }

    pub fn push_failure(&mut self, failure: ScriptedFailure) {
        self.queue.push_back(Err(failure));
    }

    /// Number of completed calls so far.
    pub fn calls(&self) -> usize {
        self.calls
    }
}

impl ChatProvider for ScriptedProvider {
    fn complete(&mut self, request: &ChatRequest) -> Result<ChatResponse, ProviderError> {
        request.validate()?;
        self.calls += 1;
        match self.queue.pop_front() {
            Some(Ok(content)) => Ok(ChatResponse {
                content,
                model: Some(request.model.clone()),
                attempts: 1,
            }),
            Some(Err(ScriptedFailure::Timeout)) => {
                Err(ProviderError::Timeout(std::time::Duration::from_secs(0)))
            }
            Some(Err(ScriptedFailure::Transport)) => {
                Err(ProviderError::Transport("scripted failure".into()))
            }
            Some(Err(ScriptedFailure::EmptyContent)) => Err(ProviderError::EmptyContent),
            None => Err(ProviderError::ScriptExhausted),
        }
    }

    fn name(&self) -> &'static str {
        "scripted"
    }
}
