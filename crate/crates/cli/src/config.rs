//! Layered run settings: command-line flags override a `key=value` file,
//! which overrides the built-in defaults.

use std::collections::HashMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::CliError;

/// Environment variable naming the directory that relative output paths are
/// resolved against.
pub const OUTPUT_DIR_ENV: &str = "AWGN_EXP_OUTPUT_DIR";

#[derive(Debug, Default)]
pub struct ConfigFile {
    values: HashMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Usage(format!("cannot read config file {}: {e}", path.display()))
        })?;
        Self::parse(&text)
    }

    /// Parses `key = value` lines. Blank lines and lines starting with `#` are
    /// skipped; keys are case-sensitive and `-`/`_` are interchangeable.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("config line {}: expected key=value", i + 1))
            })?;
            values.insert(normalize(key.trim()), value.trim().to_string());
        }
        Ok(Self { values })
    }

    /// Resolves one setting from the flag, the file, then the default.
    pub fn get<T>(&self, flag: Option<T>, key: &str, default: Option<T>) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        if let Some(v) = flag {
            return Ok(v);
        }
        if let Some(raw) = self.values.get(&normalize(key)) {
            return raw
                .parse()
                .map_err(|e| CliError::Usage(format!("config key {key} = {raw:?}: {e}")));
        }
        default.ok_or_else(|| CliError::Usage(format!("missing required setting --{key}")))
    }

    pub fn get_opt<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        if flag.is_some() || self.values.contains_key(&normalize(key)) {
            self.get(flag, key, None).map(Some)
        } else {
            Ok(None)
        }
    }

    /// Comma-separated list setting.
    pub fn get_list(
        &self,
        flag: Option<Vec<f64>>,
        key: &str,
        default: &[f64],
    ) -> Result<Vec<f64>, CliError> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.values.get(&normalize(key)) {
            Some(raw) => raw
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|e| CliError::Usage(format!("config key {key} = {raw:?}: {e}")))
                })
                .collect(),
            None => Ok(default.to_vec()),
        }
    }
}

fn normalize(key: &str) -> String {
    key.replace('-', "_")
}

/// Resolves a relative output path against the output-directory variable.
pub fn resolve_output(path: &Path) -> PathBuf {
    match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(dir) if path.is_relative() && !dir.is_empty() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}
