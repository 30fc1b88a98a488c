//! `key = value` configuration files. Flags given on the command line win.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{CliError, Result};

/// Keys accepted in a configuration file. Dashes and underscores are
/// interchangeable.
pub const KNOWN_KEYS: &[&str] = &[
    "beta",
    "energy_ladder",
    "n",
    "d",
    "seed",
    "out",
    "format",
    "dim_cap",
    "n_min",
    "n_max",
    "family",
    "s_total",
    "beta_prime",
    "t",
    "targets",
    "ppt",
    "mode",
    "target_bias",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    path: Option<PathBuf>,
    entries: BTreeMap<String, (usize, String)>,
}

fn normalise(key: &str) -> String {
    key.trim().replace('-', "_")
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, Some(path.to_path_buf()))
    }

    /// One `key = value` per line; blank lines and `#` comments are skipped.
    pub fn parse(text: &str, path: Option<PathBuf>) -> Result<Self> {
        let label = path.clone().unwrap_or_else(|| PathBuf::from("<config>"));
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| CliError::Config {
                path: label.clone(),
                line: i + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            let key = normalise(key);
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(err(format!("unknown key `{key}`")));
            }
            if entries
                .insert(key.clone(), (i + 1, value.trim().to_string()))
                .is_some()
            {
                return Err(err(format!("duplicate key `{key}`")));
            }
        }
        Ok(Self { path, entries })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(_, v)| v.as_str())
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        let Some((line, value)) = self.entries.get(key) else {
            return Ok(None);
        };
        value
            .parse()
            .map(Some)
            .map_err(|e: T::Err| CliError::Config {
                path: self
                    .path
                    .clone()
                    .unwrap_or_else(|| PathBuf::from("<config>")),
                line: *line,
                message: format!("invalid value `{value}` for `{key}`: {e}"),
            })
    }

    /// Comma-separated list value.
    pub fn get_list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>>
    where
        T::Err: std::fmt::Display,
    {
        let Some((line, value)) = self.entries.get(key) else {
            return Ok(None);
        };
        value
            .split(',')
            .map(|v| v.trim().parse::<T>())
            .collect::<std::result::Result<Vec<T>, _>>()
            .map(Some)
            .map_err(|e| CliError::Config {
                path: self
                    .path
                    .clone()
                    .unwrap_or_else(|| PathBuf::from("<config>")),
                line: *line,
                message: format!("invalid list `{value}` for `{key}`: {e}"),
            })
    }
}
