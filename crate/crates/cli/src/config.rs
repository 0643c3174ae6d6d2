//! `key value` config files mirroring the command-line flags.
//!
//! One setting per line, `#` comments, blank lines ignored. Explicit flags
//! always win over config values. Boolean keys accept `true`/`false`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};

pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    /// Empty config, used when no `--config` is given.
    pub fn empty() -> Self {
        Self {
            values: BTreeMap::new(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        let mut values = BTreeMap::new();
        for (number, raw) in text.lines().enumerate() {
            let stripped = raw.split('#').next().unwrap_or("").trim();
            if stripped.is_empty() {
                continue;
            }
            let Some((key, value)) = stripped.split_once(char::is_whitespace) else {
                bail!(
                    "{}:{}: expected 'key value', got '{stripped}'",
                    path.display(),
                    number + 1
                );
            };
            values.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Self { values })
    }

    /// Flag value if set, config value otherwise.
    pub fn resolve<T: FromStr + Clone>(&self, flag: &Option<T>, key: &str) -> Result<Option<T>>
    where
        <T as FromStr>::Err: std::fmt::Display,
    {
        if let Some(value) = flag {
            return Ok(Some(value.clone()));
        }
        match self.values.get(key) {
            Some(raw) => match raw.parse() {
                Ok(parsed) => Ok(Some(parsed)),
                Err(err) => bail!("config key '{key}': cannot parse '{raw}': {err}"),
            },
            None => Ok(None),
        }
    }

    /// Boolean switch: a set flag wins; otherwise the config key.
    pub fn resolve_switch(&self, flag: bool, key: &str) -> Result<bool> {
        if flag {
            return Ok(true);
        }
        match self.values.get(key) {
            Some(raw) => match raw.as_str() {
                "true" | "1" | "yes" => Ok(true),
                "false" | "0" | "no" => Ok(false),
                other => bail!("config key '{key}': expected a boolean, got '{other}'"),
            },
            None => Ok(false),
        }
    }

    pub fn resolve_path(&self, flag: &Option<PathBuf>, key: &str) -> Option<PathBuf> {
        flag.clone()
            .or_else(|| self.values.get(key).map(PathBuf::from))
    }
}
