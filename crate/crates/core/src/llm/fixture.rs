//! Fixture store: record live responses once, replay them offline forever.
//!
//! One JSON file per request digest under the store directory. Files carry
//! the full request (sans credentials — requests never contain any) so a
//! human can audit what produced each response.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{ChatProvider, ChatRequest, ChatResponse, ProviderError};

#[derive(Debug, Serialize, Deserialize)]
struct FixtureFile {
    request: ChatRequest,
    response: ChatResponse,
    /// Seconds since the Unix epoch at record time.
    recorded_at: u64,
}

/// Replays recorded responses; never opens a network connection.
#[derive(Debug, Clone)]
pub struct FixtureProvider {
    dir: PathBuf,
}

impl FixtureProvider {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    fn path_for(&self, digest: &str) -> PathBuf {
        self.dir.join(format!("{digest}.json"))
    }

    fn load(&self, digest: &str) -> Result<Option<FixtureFile>, ProviderError> {
        let path = self.path_for(digest);
        if !path.exists() {
            return Ok(None);
        }
        let text = std::fs::read_to_string(&path)
            .map_err(|e| ProviderError::FixtureStore(format!("{}: {e}", path.display())))?;
        let file = serde_json::from_str(&text)
            .map_err(|e| ProviderError::FixtureStore(format!("{}: {e}", path.display())))?;
        Ok(Some(file))
    }
}

impl ChatProvider for FixtureProvider {
    fn complete(&mut self, request: &ChatRequest) -> Result<ChatResponse, ProviderError> {
        request.validate()?;
        let digest = request.digest();
        match self.load(&digest)? {
            Some(file) => Ok(file.response),
            None => Err(ProviderError::MissingFixture(digest)),
        }
    }

    fn name(&self) -> &'static str {
        "fixture"
    }
}

/// Wraps another provider and persists every successful completion.
pub struct FixtureRecorder<P> {
    inner: P,
    store: FixtureProvider,
    /// Capture disabled turns the recorder into a pass-through.
    capture: bool,
}

impl<P: ChatProvider> FixtureRecorder<P> {
    pub fn new(inner: P, dir: impl Into<PathBuf>, capture: bool) -> Self {
        Self {
            inner,
            store: FixtureProvider::new(dir),
            capture,
        }
    }

    fn record(&self, request: &ChatRequest, response: &ChatResponse) -> Result<(), ProviderError> {
        let digest = request.digest();
        if let Some(existing) = self.store.load(&digest)? {
            if existing.response.content != response.content {
                return Err(ProviderError::FixtureCollision { digest });
            }
            return Ok(());
        }
        let dir: &Path = &self.store.dir;
        std::fs::create_dir_all(dir)
            .map_err(|e| ProviderError::FixtureStore(format!("{}: {e}", dir.display())))?;
        let file = FixtureFile {
            request: request.clone(),
            response: response.clone(),
            recorded_at: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        };
        let path = self.store.path_for(&digest);
        let text = serde_json::to_string_pretty(&file)
            .map_err(|e| ProviderError::FixtureStore(e.to_string()))?;
        std::fs::write(&path, text)
            .map_err(|e| ProviderError::FixtureStore(format!("{}: {e}", path.display())))?;
        Ok(())
    }
}

impl<P: ChatProvider> ChatProvider for FixtureRecorder<P> {
    fn complete(&mut self, request: &ChatRequest) -> Result<ChatResponse, ProviderError> {
        let response = self.inner.complete(request)?;
        if self.capture {
            self.record(request, &response)?;
        }
        Ok(response)
    }

    fn name(&self) -> &'static str {
        "fixture-recorder"
    }
}
