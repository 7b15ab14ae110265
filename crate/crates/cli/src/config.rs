//! Flat key=value configuration with command-line overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::CliError;
use crate::expr::eval;

/// Keys handled by every experiment.
pub const COMMON_KEYS: [&str; 4] = ["experiment", "seed", "out", "trials"];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    /// Parses `key = value` lines; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("config line {}: expected key=value", i + 1)))?;
            let k = k.trim();
            if k.is_empty() {
                return Err(CliError::Config(format!("config line {}: empty key", i + 1)));
            }
            values.insert(k.to_string(), v.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.values.insert(key.to_string(), value.into());
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn experiment(&self) -> Result<&str, CliError> {
        self.raw("experiment").ok_or_else(|| CliError::Config("no experiment given".into()))
    }

    pub fn seed(&self) -> Result<u64, CliError> {
        match self.raw("seed") {
            None => Ok(0),
            Some(v) => v.parse().map_err(|_| CliError::Config(format!("seed: '{v}' is not an unsigned integer"))),
        }
    }

    pub fn out(&self) -> PathBuf {
        PathBuf::from(self.raw("out").unwrap_or("out"))
    }

    pub fn trials(&self, default: usize) -> Result<usize, CliError> {
        self.usize_or("trials", default)
    }

    /// Rejects keys the experiment does not read, so typos do not pass silently.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<(), CliError> {
        let unknown: Vec<&str> = self
            .values
            .keys()
            .map(String::as_str)
            .filter(|k| !COMMON_KEYS.contains(k) && !allowed.contains(k))
            .collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(CliError::Config(format!("unknown parameter(s) for this experiment: {}", unknown.join(", "))))
        }
    }

    pub fn str_or<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.raw(key).unwrap_or(default)
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => eval(v).map_err(|e| CliError::Config(format!("{key}: {e}"))),
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, CliError> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| CliError::Config(format!("{key}: '{v}' is not a non-negative integer"))),
        }
    }

    /// One of `choices`, compared case-sensitively.
    pub fn choice<'a>(&'a self, key: &str, default: &'a str, choices: &[&str]) -> Result<&'a str, CliError> {
        let v = self.str_or(key, default);
        if choices.contains(&v) {
            Ok(v)
        } else {
            Err(CliError::Config(format!("{key}: '{v}' is not one of {}", choices.join(", "))))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_override() {
        let mut c = Config::parse("# run\nexperiment = qe-attack\n\nseed=7\nalpha = 1/sqrt(2)\n").unwrap();
        assert_eq!(c.experiment().unwrap(), "qe-attack");
        assert_eq!(c.seed().unwrap(), 7);
        c.set("seed", "9");
        assert_eq!(c.seed().unwrap(), 9);
        assert!((c.f64_or("alpha", 0.0).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(c.check_keys(&["alpha"]).is_ok());
        assert!(c.check_keys(&[]).is_err());
    }

    #[test]
    fn malformed_lines() {
        assert!(Config::parse("seed 7").is_err());
        assert!(Config::parse("=3").is_err());
        let c = Config::parse("seed = -1\nM = x").unwrap();
        assert!(c.seed().is_err());
        assert!(c.usize_or("M", 1).is_err());
        assert!(c.choice("M", "a", &["a", "b"]).is_err());
    }
}
