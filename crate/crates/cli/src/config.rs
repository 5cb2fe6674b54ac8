//! Flat `key = value` configuration text.

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::HarnessError;

/// Parsed key-value pairs. Every key must be consumed by the reader; anything
/// left over is reported by [`Config::finish`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

impl Config {
    /// Lines are `key = value`; blank lines and lines starting with `#` are
    /// skipped. Duplicate keys are errors.
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(HarnessError::Config(format!("line {}: expected key = value, got {line:?}", i + 1)));
            };
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() {
                return Err(HarnessError::Config(format!("line {}: empty key", i + 1)));
            }
            if entries.insert(k.to_string(), v.to_string()).is_some() {
                return Err(HarnessError::Config(format!("line {}: duplicate key {k:?}", i + 1)));
            }
        }
        Ok(Config { entries })
    }

    /// Sets `key` from a `key=value` override, replacing any previous value.
    pub fn set(&mut self, assignment: &str) -> Result<(), HarnessError> {
        let Some((k, v)) = assignment.split_once('=') else {
            return Err(HarnessError::Config(format!("override {assignment:?} is not key=value")));
        };
        self.entries.insert(k.trim().to_string(), v.trim().to_string());
        Ok(())
    }

    pub fn insert(&mut self, key: &str, value: impl ToString) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    /// Removes and parses a required key.
    pub fn take<T: FromStr>(&mut self, key: &str) -> Result<T, HarnessError> {
        let raw = self.entries.remove(key).ok_or_else(|| HarnessError::Config(format!("missing key {key:?}")))?;
        raw.parse().map_err(|_| HarnessError::Config(format!("key {key:?}: cannot parse {raw:?}")))
    }

    /// Removes and parses an optional key.
    pub fn take_or<T: FromStr>(&mut self, key: &str, default: T) -> Result<T, HarnessError> {
        if self.contains(key) {
            self.take(key)
        } else {
            Ok(default)
        }
    }

    /// Comma-separated list; an empty value gives an empty list.
    pub fn take_list<T: FromStr>(&mut self, key: &str) -> Result<Vec<T>, HarnessError> {
        let raw: String = self.take(key)?;
        raw.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().map_err(|_| HarnessError::Config(format!("key {key:?}: cannot parse item {s:?}"))))
            .collect()
    }

    /// `key=value` strings in key order.
    pub fn into_assignments(self) -> Vec<String> {
        self.entries.into_iter().map(|(k, v)| format!("{k}={v}")).collect()
    }

    /// Errors if any key was not consumed.
    pub fn finish(self) -> Result<(), HarnessError> {
        if self.entries.is_empty() {
            Ok(())
        } else {
            let keys: Vec<&str> = self.entries.keys().map(String::as_str).collect();
            Err(HarnessError::Config(format!("unknown keys: {}", keys.join(", "))))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_whitespace() {
        let mut c = Config::parse("# header\n a = 1 \n\nb= x,y\n").unwrap();
        assert_eq!(c.take::<u32>("a").unwrap(), 1);
        assert_eq!(c.take_list::<String>("b").unwrap(), vec!["x", "y"]);
        c.finish().unwrap();
    }

    #[test]
    fn rejects_duplicates_and_garbage() {
        assert!(Config::parse("a = 1\na = 2").is_err());
        assert!(Config::parse("no equals sign").is_err());
        assert!(Config::parse(" = 3").is_err());
    }

    #[test]
    fn leftover_keys_are_errors() {
        let mut c = Config::parse("a = 1\ntypo = 2").unwrap();
        let _: u32 = c.take("a").unwrap();
        let err = c.finish().unwrap_err();
        assert!(err.to_string().contains("typo"));
    }

    #[test]
    fn typed_parse_errors() {
        let mut c = Config::parse("a = 1.5").unwrap();
        assert!(c.take::<u32>("a").is_err());
        assert!(c.take::<u32>("missing").is_err());
        let mut c = Config::parse("l =").unwrap();
        assert!(c.take_list::<f64>("l").unwrap().is_empty());
    }
}
