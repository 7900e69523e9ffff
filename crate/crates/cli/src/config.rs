//! `key = value` configuration files.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

pub const KEYS: &[&str] = &[
    "seed", "out", "epsilon", "ratio", "sigma", "trials", "m_eps", "noise_mask", "network", "agent", "rounds",
    "switch_at", "bias", "m", "controlized", "emit_pulses",
];

#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    /// Blank lines and lines starting with `#` are skipped; every other line
    /// must be `key = value` with a known key, each key at most once.
    pub fn parse(text: &str) -> Result<Self, Vec<String>> {
        let mut values = BTreeMap::new();
        let mut errors = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                errors.push(format!("config line {}: expected 'key = value'", i + 1));
                continue;
            };
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                errors.push(format!("config line {}: unknown key '{key}'", i + 1));
            } else if value.is_empty() {
                errors.push(format!("config line {}: empty value for '{key}'", i + 1));
            } else if values.insert(key.to_string(), value.to_string()).is_some() {
                errors.push(format!("config line {}: duplicate key '{key}'", i + 1));
            }
        }
        if errors.is_empty() { Ok(ConfigFile { values }) } else { Err(errors) }
    }

    pub fn load(path: &Path) -> Result<Self, Vec<String>> {
        let text = std::fs::read_to_string(path).map_err(|e| vec![format!("{}: {e}", path.display())])?;
        Self::parse(&text)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, String> {
        self.values
            .get(key)
            .map(|v| v.parse::<T>().map_err(|_| format!("config key '{key}': invalid value '{v}'")))
            .transpose()
    }

    /// Command line first, then the file.
    pub fn pick<T: FromStr>(&self, cli: Option<T>, key: &str) -> Result<Option<T>, String> {
        match cli {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }
}
