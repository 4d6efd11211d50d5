//! `key=value` configuration files and flag/config/default resolution.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::error::CliError;

/// Keys a config file may set; the same names as the long flags.
pub const KNOWN_KEYS: &[&str] = &[
    "model",
    "twist",
    "seed",
    "trials",
    "sieve-limit",
    "workers",
    "out",
    "summary",
    "cache",
    "set",
    "set-all",
    "eq",
    "constraint",
    "budget",
    "poly",
    "X",
    "eps0",
    "delta",
    "eps",
    "hspec",
    "k",
    "t",
    "rho",
    "c",
    "l-max",
    "grid",
    "log-power",
    "l1",
    "l2",
];

#[derive(Debug, Default)]
pub struct Config {
    values: BTreeMap<String, Vec<String>>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Usage(m) => CliError::Usage(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Blank lines and lines starting with `#` are skipped. Only `set` may
    /// repeat.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("line {}: expected key=value", i + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if !KNOWN_KEYS.contains(&k) {
                return Err(CliError::Usage(format!("line {}: unknown key {k:?}", i + 1)));
            }
            let slot = values.entry(k.to_string()).or_default();
            if !slot.is_empty() && k != "set" {
                return Err(CliError::Usage(format!("line {}: {k} given twice", i + 1)));
            }
            slot.push(v.to_string());
        }
        Ok(Self { values })
    }

    fn parse_value<T>(key: &str, raw: &str) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        raw.parse()
            .map_err(|e| CliError::Usage(format!("config {key}={raw}: {e}")))
    }

    /// The flag if given, else the config value.
    pub fn opt<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key).and_then(|v| v.first()) {
            Some(raw) => Self::parse_value(key, raw).map(Some),
            None => Ok(None),
        }
    }

    pub fn get<T>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        Ok(self.opt(flag, key)?.unwrap_or(default))
    }

    /// Repeated values: the flags if any were given, else every config line.
    pub fn list<T>(&self, flags: Vec<T>, key: &str) -> Result<Vec<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        if !flags.is_empty() {
            return Ok(flags);
        }
        self.values
            .get(key)
            .map(|v| v.iter().map(|raw| Self::parse_value(key, raw)).collect())
            .unwrap_or_else(|| Ok(Vec::new()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_and_defaults() {
        let c = Config::parse("# comment\ntrials = 50\nset=list:1,2\nset=list:3\n\nseed=9").unwrap();
        assert_eq!(c.get(None, "trials", 10u64).unwrap(), 50);
        assert_eq!(c.get(Some(7u64), "trials", 10).unwrap(), 7);
        assert_eq!(c.get(None, "k", 3usize).unwrap(), 3);
        assert_eq!(c.list::<String>(vec![], "set").unwrap(), vec!["list:1,2", "list:3"]);
        assert_eq!(c.list(vec!["x".to_string()], "set").unwrap(), vec!["x"]);
    }

    #[test]
    fn bad_files_are_usage_errors() {
        for text in ["trials", "nope=1", "seed=1\nseed=2"] {
            assert!(matches!(Config::parse(text), Err(CliError::Usage(_))), "{text}");
        }
        let c = Config::parse("trials=many").unwrap();
        assert!(matches!(c.get(None, "trials", 1u64), Err(CliError::Usage(_))));
    }
}
