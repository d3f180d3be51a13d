//! Flat key-value settings: a TOML file overlaid by command-line flags.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

/// Environment variable consulted for the worker count when neither the
/// config file nor `--threads` sets it.
pub const THREADS_ENV: &str = "SPZF_THREADS";

/// Every key accepted in a config file. Each one has a flag of the same name.
pub const KEYS: &[&str] = &[
    "n", "m", "m-range", "algo", "model", "paths", "ne", "snr-db", "trials", "seed", "out", "threads", "policy",
    "clamp", "log-base",
];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot parse config {path}: {message}")]
    Syntax { path: String, message: String },
    #[error("unknown config key '{0}'")]
    UnknownKey(String),
    #[error("config key '{key}' must be a string, number, boolean or array of those")]
    Unsupported { key: String },
    #[error("invalid value '{value}' for '{key}': {message}")]
    Value {
        key: String,
        value: String,
        message: String,
    },
}

fn normalize(key: &str) -> String {
    key.trim().replace('_', "-").to_ascii_lowercase()
}

fn render(key: &str, v: &toml::Value) -> Result<String, ConfigError> {
    Ok(match v {
        toml::Value::String(s) => s.clone(),
        toml::Value::Integer(i) => i.to_string(),
        toml::Value::Float(f) => f.to_string(),
        toml::Value::Boolean(b) => b.to_string(),
        toml::Value::Array(items) => items
            .iter()
            .map(|x| render(key, x))
            .collect::<Result<Vec<_>, _>>()?
            .join(","),
        _ => return Err(ConfigError::Unsupported { key: key.to_string() }),
    })
}

/// Resolved settings as raw strings; parsing happens at the point of use so
/// errors name the offending key.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    pub fn from_toml_str(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Syntax {
            path: origin.to_string(),
            message: e.message().to_string(),
        })?;
        let mut values = BTreeMap::new();
        for (k, v) in &table {
            let key = normalize(k);
            if !KEYS.contains(&key.as_str()) {
                return Err(ConfigError::UnknownKey(k.clone()));
            }
            values.insert(key.clone(), render(&key, v)?);
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let origin = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: origin.clone(),
            source,
        })?;
        Self::from_toml_str(&text, &origin)
    }

    /// Flag values win over file values.
    pub fn overlay(&mut self, key: &str, value: Option<&str>) {
        if let Some(v) = value {
            self.values.insert(normalize(key), v.to_string());
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn parse<T>(&self, key: &str) -> Result<Option<T>, ConfigError>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.get(key).map(|v| parse_value(key, v)).transpose()
    }

    pub fn parse_with<T>(&self, key: &str, f: impl Fn(&str) -> Result<T, String>) -> Result<Option<T>, ConfigError> {
        self.get(key)
            .map(|v| f(v).map_err(|message| value_error(key, v, message)))
            .transpose()
    }

    /// `threads` from the settings, else [`THREADS_ENV`], else `None`.
    pub fn threads(&self) -> Result<Option<usize>, ConfigError> {
        if let Some(t) = self.parse::<usize>("threads")? {
            return Ok(Some(t));
        }
        match std::env::var(THREADS_ENV) {
            Ok(v) if !v.trim().is_empty() => parse_value(THREADS_ENV, v.trim()).map(Some),
            _ => Ok(None),
        }
    }
}

fn value_error(key: &str, value: &str, message: impl Display) -> ConfigError {
    ConfigError::Value {
        key: key.to_string(),
        value: value.to_string(),
        message: message.to_string(),
    }
}

fn parse_value<T>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T: FromStr,
    T::Err: Display,
{
    value.trim().parse().map_err(|e| value_error(key, value, e))
}

/// Comma-separated integers; `a..b` is an inclusive range.
pub fn parse_usize_list(s: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        if let Some((a, b)) = item.split_once("..") {
            let a: usize = a.trim().parse().map_err(|e| format!("{item}: {e}"))?;
            let b: usize = b.trim().trim_start_matches('=').parse().map_err(|e| format!("{item}: {e}"))?;
            if a > b {
                return Err(format!("empty range {item}"));
            }
            out.extend(a..=b);
        } else {
            out.push(item.parse().map_err(|e| format!("{item}: {e}"))?);
        }
    }
    if out.is_empty() {
        return Err("empty list".into());
    }
    Ok(out)
}

/// Comma-separated floats; `a..b:step` expands to `a, a+step, …` up to `b`.
pub fn parse_f64_list(s: &str) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        let Some((range, step)) = item.split_once(':') else {
            out.push(item.parse::<f64>().map_err(|e| format!("{item}: {e}"))?);
            continue;
        };
        let (a, b) = range.split_once("..").ok_or_else(|| format!("{item}: expected a..b:step"))?;
        let parse = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{item}: {e}"));
        let (a, b, step) = (parse(a)?, parse(b)?, parse(step)?);
        if !(step > 0.0) || a > b {
            return Err(format!("{item}: need a <= b and step > 0"));
        }
        let count = ((b - a) / step + 1e-9).floor() as usize;
        out.extend((0..=count).map(|k| a + k as f64 * step));
    }
    if out.is_empty() {
        return Err("empty list".into());
    }
    Ok(out)
}
