//! Plain key=value config files. Flags beat the file, the file beats
//! defaults; unknown keys are rejected so typos surface immediately.

use anyhow::{bail, Context, Result};
use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;

const KNOWN_KEYS: &[&str] = &[
    "p",
    "facet",
    "backend",
    "format",
    "output",
    "tolerance",
    "seed",
    "threads",
    "trials",
    "grid",
    "range",
    "state",
    "kind",
    "timeout-secs",
];

#[derive(Default)]
pub struct FileConfig {
    map: HashMap<String, String>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut map = HashMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("config line {} is not key=value: '{line}'", lineno + 1);
            };
            let key = key.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                bail!("unknown config key '{key}' (line {})", lineno + 1);
            }
            map.insert(key, value.trim().to_string());
        }
        Ok(Self { map })
    }

    /// Typed lookup; parse failures carry the key name.
    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.map.get(key) {
            None => Ok(None),
            Some(raw) => match raw.parse::<T>() {
                Ok(v) => Ok(Some(v)),
                Err(e) => bail!("config key '{key}' = '{raw}': {e}"),
            },
        }
    }
}

/// flag > config > default.
pub fn resolve<T>(flag: Option<T>, from_config: Option<T>, default: T) -> T {
    flag.or(from_config).unwrap_or(default)
}
