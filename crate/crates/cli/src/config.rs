use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};

/// Flat `key = value` settings; `#` starts a comment.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

pub const KEYS: &[&str] =
    &["nmax", "eps", "k", "rhat", "symbolic", "format", "out", "jobs", "seed", "suite", "triples", "override_cap"];

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                bail!("line {}: expected key = value", i + 1);
            };
            let k = k.trim().replace('-', "_");
            if !KEYS.contains(&k.as_str()) {
                bail!("line {}: unknown key {k:?}", i + 1);
            }
            values.insert(k, v.trim().to_string());
        }
        Ok(Config { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Config::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_pairs() {
        let c = Config::parse("# run\nnmax = 3/2\neps=1/3  # inline\n\nsuite = basis, norms\n").unwrap();
        assert_eq!(c.get("nmax"), Some("3/2"));
        assert_eq!(c.get("eps"), Some("1/3"));
        assert_eq!(c.get("suite"), Some("basis, norms"));
        assert_eq!(c.get("k"), None);
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(Config::parse("nmax 3").is_err());
        assert!(Config::parse("colour = red").is_err());
    }
}
