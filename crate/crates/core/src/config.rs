//! Plain-text `key = value` configuration files.
//!
//! One assignment per line; `#` starts a comment; blank lines ignored.
//! Nested structures use dotted keys (`world.area_side = 300`). Consumers
//! take what they need from the map and must account for every key so that
//! typos are caught instead of silently ignored.

use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Malformed { line: usize, text: String },
    #[error("duplicate key `{0}`")]
    DuplicateKey(String),
    #[error("field `{field}`: {message}")]
    InvalidField { field: String, message: String },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
}

/// A parsed config file: ordered key -> raw value text.
#[derive(Debug, Clone, Default)]
pub struct KvMap {
    entries: BTreeMap<String, String>,
}

impl KvMap {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Malformed {
                    line: idx + 1,
                    text: raw.trim().to_string(),
                });
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if entries.insert(key.clone(), value).is_some() {
                return Err(ConfigError::DuplicateKey(key));
            }
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Removes and returns the raw value for `key`, if present.
    pub fn take(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key)
    }

    /// Removes and parses `key` as `T`, leaving `default` when absent.
    pub fn take_parsed<T: std::str::FromStr>(
        &mut self,
        key: &str,
        default: T,
    ) -> Result<T, ConfigError> {
        match self.entries.remove(key) {
            None => Ok(default),
            Some(raw) => raw.parse().map_err(|_| ConfigError::InvalidField {
                field: key.to_string(),
                message: format!("cannot parse `{raw}`"),
            }),
        }
    }

    /// Splits off every key under `prefix.` into its own map (prefix stripped).
    pub fn take_section(&mut self, prefix: &str) -> KvMap {
        let full = format!("{prefix}.");
        let mut section = BTreeMap::new();
        let keys: Vec<String> = self
            .entries
            .keys()
            .filter(|k| k.starts_with(&full))
            .cloned()
            .collect();
        for key in keys {
            let value = self.entries.remove(&key).unwrap();
            section.insert(key[full.len()..].to_string(), value);
        }
        KvMap { entries: section }
    }

    /// Errors on the first remaining key; call once a consumer is done.
    pub fn finish(self) -> Result<(), ConfigError> {
        match self.entries.into_keys().next() {
            Some(key) => Err(ConfigError::UnknownKey(key)),
            None => Ok(()),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_sections() {
        let text = "area_side = 300 # meters\n\nworld.seed = 9\nworld.horizon=200\n";
        let mut map = KvMap::parse(text).unwrap();
        assert_eq!(map.take_parsed("area_side", 0.0).unwrap(), 300.0);
        let mut world = map.take_section("world");
        assert_eq!(world.take_parsed("seed", 0u64).unwrap(), 9);
        assert_eq!(world.take_parsed("horizon", 0u32).unwrap(), 200);
        world.finish().unwrap();
        map.finish().unwrap();
    }

    #[test]
    fn rejects_malformed_lines_and_unknown_keys() {
        assert!(matches!(
            KvMap::parse("just words"),
            Err(ConfigError::Malformed { line: 1, .. })
        ));
        let map = KvMap::parse("typo_key = 1").unwrap();
        assert!(matches!(map.finish(), Err(ConfigError::UnknownKey(k)) if k == "typo_key"));
    }

    #[test]
    fn duplicate_keys_rejected() {
        assert!(matches!(
            KvMap::parse("a = 1\na = 2"),
            Err(ConfigError::DuplicateKey(k)) if k == "a"
        ));
    }
}
