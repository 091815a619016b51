//! Flat `key = value` configuration files.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::CliError;

/// Keys every scenario accepts.
pub const COMMON_KEYS: [&str; 3] = ["scenario", "seed", "out"];

#[derive(Debug, Clone, Default)]
pub struct Config {
    /// Value and 1-based source line (0 for defaults and overrides).
    entries: BTreeMap<String, (String, usize)>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(CliError::config(line, format!("expected key = value, got {content:?}")));
            };
            let key = key.trim();
            if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
                return Err(CliError::config(line, format!("malformed key {key:?}")));
            }
            if entries.insert(key.to_string(), (value.trim().to_string(), line)).is_some() {
                return Err(CliError::config(line, format!("duplicate key {key:?}")));
            }
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn from_map(map: &BTreeMap<String, String>) -> Self {
        Self { entries: map.iter().map(|(k, v)| (k.clone(), (v.clone(), 0))).collect() }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.insert(key.to_string(), (value.to_string(), 0));
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    /// Rejects keys outside `allowed` and fills in the defaults.
    pub fn resolve(&mut self, allowed: &[(&str, &str)]) -> Result<(), CliError> {
        for (key, (_, line)) in &self.entries {
            if !COMMON_KEYS.contains(&key.as_str()) && !allowed.iter().any(|(k, _)| k == key) {
                return Err(CliError::config(*line, format!("unknown key {key:?}")));
            }
        }
        for (key, default) in allowed {
            if !default.is_empty() {
                self.entries.entry(key.to_string()).or_insert_with(|| (default.to_string(), 0));
            }
        }
        Ok(())
    }

    pub fn resolved(&self) -> BTreeMap<String, String> {
        self.entries.iter().map(|(k, (v, _))| (k.clone(), v.clone())).collect()
    }

    fn bad(&self, key: &str, msg: impl std::fmt::Display) -> CliError {
        let line = self.entries.get(key).map_or(0, |e| e.1);
        CliError::config(line, format!("{key}: {msg}"))
    }

    pub fn str(&self, key: &str) -> Result<&str, CliError> {
        self.raw(key).ok_or_else(|| self.bad(key, "missing"))
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.raw(key).map(|v| parse_real(v).ok_or_else(|| self.bad(key, format!("not a number: {v:?}")))).transpose()
    }

    pub fn f64(&self, key: &str) -> Result<f64, CliError> {
        self.opt_f64(key)?.ok_or_else(|| self.bad(key, "missing"))
    }

    pub fn usize(&self, key: &str) -> Result<usize, CliError> {
        let v = self.str(key)?;
        v.replace('_', "").parse().map_err(|_| self.bad(key, format!("not a non-negative integer: {v:?}")))
    }

    pub fn bool(&self, key: &str) -> Result<bool, CliError> {
        match self.str(key)? {
            "true" | "yes" | "1" => Ok(true),
            "false" | "no" | "0" => Ok(false),
            v => Err(self.bad(key, format!("not a boolean: {v:?}"))),
        }
    }

    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>, CliError> {
        let v = self.str(key)?;
        v.split(',')
            .map(|s| parse_real(s.trim()).ok_or_else(|| self.bad(key, format!("not a number list: {v:?}"))))
            .collect()
    }

    pub fn usize_list(&self, key: &str) -> Result<Vec<usize>, CliError> {
        let v = self.str(key)?;
        v.split(',')
            .map(|s| s.trim().parse().map_err(|_| self.bad(key, format!("not an integer list: {v:?}"))))
            .collect()
    }

    pub fn choice<'a>(&'a self, key: &str, options: &[&str]) -> Result<&'a str, CliError> {
        let v = self.str(key)?;
        if options.contains(&v) {
            Ok(v)
        } else {
            Err(self.bad(key, format!("expected one of {}, got {v:?}", options.join(", "))))
        }
    }
}

/// A real number, also accepting `a/b` and `1e-3`-style input.
pub fn parse_real(s: &str) -> Option<f64> {
    let s = s.trim();
    let v = match s.split_once('/') {
        Some((a, b)) => a.trim().parse::<f64>().ok()? / b.trim().parse::<f64>().ok()?,
        None => s.replace('_', "").parse().ok()?,
    };
    v.is_finite().then_some(v)
}
