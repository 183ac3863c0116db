//! Run configuration: defaults, then a JSON config file, then
//! `SFERMAT_*` environment variables, then command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde_json::Value;
use shifted_fermat::{Index, Natural, SearchConfig, DEFAULT_BIT_CAP};

use crate::wire::parse_canonical;

pub const ENV_PREFIX: &str = "SFERMAT_";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
    Human,
}

impl FromStr for OutputFormat {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "human" => Ok(OutputFormat::Human),
            other => Err(ConfigError::Invalid {
                key: "output_format".into(),
                reason: format!("unknown format {other:?} (json, csv, human)"),
            }),
        }
    }
}

impl OutputFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
            OutputFormat::Human => "human",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config file {path} is not a JSON object: {reason}")]
    Malformed { path: PathBuf, reason: String },
    #[error("invalid value for {key}: {reason}")]
    Invalid { key: String, reason: String },
    #[error("unknown config key {0:?}")]
    UnknownKey(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub d: Option<Natural>,
    pub m: Option<Natural>,
    pub bit_cap: u64,
    pub p_max: u64,
    pub n_max: Index,
    pub scan_max_index: Index,
    pub workers: usize,
    pub cache_path: Option<PathBuf>,
    /// `None` lets each subcommand pick its natural format.
    pub output_format: Option<OutputFormat>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let search = SearchConfig::default();
        RunConfig {
            d: None,
            m: None,
            bit_cap: DEFAULT_BIT_CAP,
            p_max: search.p_max,
            n_max: search.n_max,
            scan_max_index: search.scan_max_index,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            cache_path: None,
            output_format: None,
        }
    }
}

const KEYS: [&str; 9] = [
    "d",
    "m",
    "bit_cap",
    "p_max",
    "n_max",
    "scan_max_index",
    "workers",
    "cache_path",
    "output_format",
];

impl RunConfig {
    /// Defaults, overlaid with `file` (if any) and then the environment.
    pub fn load(file: Option<&Path>, env: &BTreeMap<String, String>) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
                path: path.to_owned(),
                source,
            })?;
            let value: Value = serde_json::from_str(&text).map_err(|e| ConfigError::Malformed {
                path: path.to_owned(),
                reason: e.to_string(),
            })?;
            let Value::Object(map) = value else {
                return Err(ConfigError::Malformed {
                    path: path.to_owned(),
                    reason: "top level must be an object".into(),
                });
            };
            for (key, v) in map {
                let raw = match v {
                    Value::String(s) => s,
                    Value::Number(n) => n.to_string(),
                    Value::Null => continue,
                    other => {
                        return Err(ConfigError::Invalid {
                            key,
                            reason: format!("expected string or integer, got {other}"),
                        })
                    }
                };
                cfg.set(&key, &raw)?;
            }
        }
        for key in KEYS {
            if let Some(raw) = env.get(&format!("{ENV_PREFIX}{}", key.to_uppercase())) {
                cfg.set(key, raw)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads `SFERMAT_*` variables from the process environment.
    pub fn process_env() -> BTreeMap<String, String> {
        std::env::vars()
            .filter(|(k, _)| k.starts_with(ENV_PREFIX))
            .collect()
    }

    pub fn set(&mut self, key: &str, raw: &str) -> Result<(), ConfigError> {
        let invalid = |reason: String| ConfigError::Invalid {
            key: key.to_owned(),
            reason,
        };
        match key {
            "d" => self.d = Some(parse_canonical(raw).map_err(invalid)?),
            "m" => self.m = Some(parse_canonical(raw).map_err(invalid)?),
            "bit_cap" => self.bit_cap = parse_canonical(raw).map_err(invalid)?,
            "p_max" => self.p_max = parse_canonical(raw).map_err(invalid)?,
            "n_max" => self.n_max = parse_canonical(raw).map_err(invalid)?,
            "scan_max_index" => self.scan_max_index = parse_canonical(raw).map_err(invalid)?,
            "workers" => self.workers = parse_canonical(raw).map_err(invalid)?,
            "cache_path" => self.cache_path = Some(PathBuf::from(raw)),
            "output_format" => self.output_format = Some(raw.parse()?),
            other => return Err(ConfigError::UnknownKey(other.to_owned())),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = [
            ("bit_cap", self.bit_cap),
            ("p_max", self.p_max),
            ("n_max", self.n_max),
            ("workers", self.workers as u64),
        ];
        for (key, v) in positive {
            if v == 0 {
                return Err(ConfigError::Invalid {
                    key: key.into(),
                    reason: "must be at least 1".into(),
                });
            }
        }
        Ok(())
    }

    pub fn search_config(&self, minimal: bool) -> SearchConfig {
        SearchConfig {
            bit_cap: self.bit_cap,
            p_max: self.p_max,
            n_max: self.n_max,
            scan_max_index: self.scan_max_index,
            lift_mode: if minimal {
                shifted_fermat::LiftMode::Order
            } else {
                shifted_fermat::LiftMode::Totient
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn layering() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        write!(
            file,
            r#"{{"d": 6, "m": "100000000000000000000000", "p_max": 5000, "output_format": "csv"}}"#
        )
        .unwrap();
        let env: BTreeMap<String, String> =
            [("SFERMAT_P_MAX".to_string(), "777".to_string())].into();
        let cfg = RunConfig::load(Some(file.path()), &env).unwrap();
        assert_eq!(cfg.d, Some(Natural::from(6u32)));
        assert_eq!(cfg.m.unwrap().to_string(), "100000000000000000000000");
        assert_eq!(cfg.p_max, 777);
        assert_eq!(cfg.n_max, 64);
        assert_eq!(cfg.output_format, Some(OutputFormat::Csv));
    }

    #[test]
    fn rejects_bad_values() {
        let env: BTreeMap<String, String> =
            [("SFERMAT_WORKERS".to_string(), "0".to_string())].into();
        assert!(matches!(
            RunConfig::load(None, &env),
            Err(ConfigError::Invalid { .. })
        ));
        let mut file = tempfile::NamedTempFile::new().unwrap();
        write!(file, r#"{{"shift": 3}}"#).unwrap();
        assert!(matches!(
            RunConfig::load(Some(file.path()), &BTreeMap::new()),
            Err(ConfigError::UnknownKey(_))
        ));
        let mut cfg = RunConfig::default();
        assert!(cfg.set("output_format", "xml").is_err());
        assert!(cfg.set("bit_cap", "1e6").is_err());
    }
}
