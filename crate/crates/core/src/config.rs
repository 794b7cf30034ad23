//! Flat `block.key = value` run configuration.
//!
//! The format is a sequence of UTF-8 lines, each `block.key = value`;
//! `#` starts a comment. No nesting. Unknown keys are rejected against the
//! schema registered by each scenario.

use crate::{Error, Result};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    entries: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `block.key = value`", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            if key.is_empty() || !key.contains('.') {
                return Err(Error::Config(format!(
                    "line {}: key `{key}` must be namespaced as block.key",
                    lineno + 1
                )));
            }
            if entries.insert(key.to_string(), value.to_string()).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key `{key}`", lineno + 1)));
            }
        }
        Ok(RunConfig { entries })
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|s| s.as_str())
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(|s| s.as_str())
    }

    /// Reject any key not in the allowed set.
    pub fn validate_keys(&self, allowed: &[&str]) -> Result<()> {
        for key in self.entries.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(Error::Config(format!("unknown config key `{key}`")));
            }
        }
        Ok(())
    }

    pub fn get_f64(&self, key: &str, default: f64) -> Result<f64> {
        match self.entries.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("key `{key}`: `{v}` is not a number"))),
        }
    }

    pub fn get_usize(&self, key: &str, default: usize) -> Result<usize> {
        match self.entries.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("key `{key}`: `{v}` is not a count"))),
        }
    }

    pub fn get_u64(&self, key: &str, default: u64) -> Result<u64> {
        match self.entries.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse::<u64>()
                .map_err(|_| Error::Config(format!("key `{key}`: `{v}` is not an integer"))),
        }
    }

    pub fn get_str(&self, key: &str, default: &str) -> String {
        self.entries.get(key).cloned().unwrap_or_else(|| default.to_string())
    }

    /// Comma-separated list of counts.
    pub fn get_usize_list(&self, key: &str, default: &[usize]) -> Result<Vec<usize>> {
        match self.entries.get(key) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Config(format!("key `{key}`: bad list entry `{s}`")))
                })
                .collect(),
        }
    }

    pub fn get_f64_list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.entries.get(key) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Config(format!("key `{key}`: bad list entry `{s}`")))
                })
                .collect(),
        }
    }

    /// Require a positive value.
    pub fn positive(&self, key: &str, value: f64) -> Result<f64> {
        if value > 0.0 {
            Ok(value)
        } else {
            Err(Error::Config(format!("key `{key}` must be positive, got {value}")))
        }
    }

    pub fn echo(&self) -> BTreeMap<String, String> {
        self.entries.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_reads() {
        let cfg = RunConfig::parse("scatter.v0 = 10.0\nscatter.grid = 2048 # comment\n").unwrap();
        assert_eq!(cfg.get_f64("scatter.v0", 0.0).unwrap(), 10.0);
        assert_eq!(cfg.get_usize("scatter.grid", 0).unwrap(), 2048);
        assert_eq!(cfg.get_f64("scatter.missing", 7.0).unwrap(), 7.0);
    }

    #[test]
    fn rejects_unnamespaced_and_duplicates() {
        assert!(RunConfig::parse("v0 = 1").is_err());
        assert!(RunConfig::parse("a.b = 1\na.b = 2").is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        let cfg = RunConfig::parse("gp.dt = 0.001\n").unwrap();
        assert!(cfg.validate_keys(&["gp.dt"]).is_ok());
        let err = cfg.validate_keys(&["gp.t_final"]).unwrap_err();
        assert!(format!("{err}").contains("gp.dt"));
    }
}
