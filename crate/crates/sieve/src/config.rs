//! Settings resolved from flags, then environment, then a TOML config file.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;
use thiserror::Error;

use crate::report::Format;

pub const ENV_CONFIG: &str = "TETRASIEVE_CONFIG";
pub const ENV_BACKEND: &str = tetra_bridge::backend::BACKEND_ENV;
pub const ENV_TIMEOUT: &str = tetra_bridge::backend::TIMEOUT_ENV;
pub const ENV_FIXTURES: &str = "TETRASIEVE_FIXTURES";
pub const ENV_JOBS: &str = "TETRASIEVE_JOBS";
pub const ENV_EMIT: &str = "TETRASIEVE_EMIT";
/// Read when neither `--config` nor `TETRASIEVE_CONFIG` names a file.
pub const DEFAULT_CONFIG_FILE: &str = "tetrasieve.toml";

/// Contents of the config file; every key is optional.
#[derive(Clone, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub backend: Option<String>,
    pub timeout: Option<u64>,
    pub fixtures: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub emit: Option<String>,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {}: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },
    #[error("config file {}: {msg}", path.display())]
    Syntax { path: PathBuf, msg: String },
    #[error("{name}: cannot parse {value:?}: {msg}")]
    Value { name: String, value: String, msg: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    Flag,
    Env,
    ConfigFile,
    Default,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Flag => "flag",
            Source::Env => "env",
            Source::ConfigFile => "config",
            Source::Default => "default",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Setting<T> {
    pub value: T,
    pub source: Source,
}

/// Which config file to read, and whether it must exist.
pub fn config_path(flag: Option<&Path>, env: &dyn Fn(&str) -> Option<String>) -> (PathBuf, bool) {
    match (flag, env(ENV_CONFIG)) {
        (Some(p), _) => (p.to_path_buf(), true),
        (None, Some(p)) => (PathBuf::from(p), true),
        (None, None) => (PathBuf::from(DEFAULT_CONFIG_FILE), false),
    }
}

pub fn load_config(path: &Path, required: bool) -> Result<(ConfigFile, Option<PathBuf>), ConfigError> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if !required && e.kind() == std::io::ErrorKind::NotFound => return Ok((ConfigFile::default(), None)),
        Err(source) => {
            return Err(ConfigError::Read {
                path: path.to_path_buf(),
                source,
            })
        }
    };
    let cfg = toml::from_str(&text).map_err(|e| ConfigError::Syntax {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })?;
    Ok((cfg, Some(path.to_path_buf())))
}

/// Flag, else environment, else config file, else default.
pub fn pick<T: FromStr>(
    name: &str,
    flag: Option<T>,
    env: Option<String>,
    file: Option<T>,
    default: T,
) -> Result<Setting<T>, ConfigError>
where
    T::Err: fmt::Display,
{
    if let Some(value) = flag {
        return Ok(Setting { value, source: Source::Flag });
    }
    if let Some(s) = env {
        let value = s.trim().parse().map_err(|e: T::Err| ConfigError::Value {
            name: name.to_string(),
            value: s.clone(),
            msg: e.to_string(),
        })?;
        return Ok(Setting { value, source: Source::Env });
    }
    Ok(match file {
        Some(value) => Setting { value, source: Source::ConfigFile },
        None => Setting { value: default, source: Source::Default },
    })
}

/// Flags the sieve settings can come from.
#[derive(Clone, Debug, Default)]
pub struct SieveFlags {
    pub fixtures: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub emit: Option<String>,
    pub backend: Option<String>,
    pub timeout: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Settings {
    pub fixtures: Setting<PathBuf>,
    pub jobs: Setting<usize>,
    pub emit: Setting<Format>,
    /// Backend command line; `None` when nothing configures one.
    pub backend: Option<Setting<String>>,
    pub timeout: Setting<u64>,
    pub config_file: Option<PathBuf>,
}

impl Settings {
    pub fn resolve(
        flags: &SieveFlags,
        env: &dyn Fn(&str) -> Option<String>,
        file: &ConfigFile,
        config_file: Option<PathBuf>,
    ) -> Result<Self, ConfigError> {
        let default_jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
        let emit_file = file
            .emit
            .as_deref()
            .map(|s| {
                s.parse::<Format>().map_err(|e| ConfigError::Value {
                    name: "emit".into(),
                    value: s.into(),
                    msg: e.to_string(),
                })
            })
            .transpose()?;
        let emit_flag = flags
            .emit
            .as_deref()
            .map(|s| {
                s.parse::<Format>().map_err(|e| ConfigError::Value {
                    name: "--emit".into(),
                    value: s.into(),
                    msg: e.to_string(),
                })
            })
            .transpose()?;
        let backend = match (&flags.backend, env(ENV_BACKEND), &file.backend) {
            (Some(b), _, _) => Some(Setting { value: b.clone(), source: Source::Flag }),
            (None, Some(b), _) => Some(Setting { value: b, source: Source::Env }),
            (None, None, Some(b)) => Some(Setting { value: b.clone(), source: Source::ConfigFile }),
            _ => None,
        };
        Ok(Settings {
            fixtures: pick(
                ENV_FIXTURES,
                flags.fixtures.clone(),
                env(ENV_FIXTURES),
                file.fixtures.clone(),
                PathBuf::from("fixtures"),
            )?,
            jobs: pick(ENV_JOBS, flags.jobs, env(ENV_JOBS), file.jobs, default_jobs)?,
            emit: pick(ENV_EMIT, emit_flag, env(ENV_EMIT), emit_file, Format::Table)?,
            backend,
            timeout: pick(
                ENV_TIMEOUT,
                flags.timeout,
                env(ENV_TIMEOUT),
                file.timeout,
                tetra_bridge::backend::DEFAULT_TIMEOUT_SECS,
            )?,
            config_file,
        })
    }

    /// Every setting with its source, for report metadata.
    pub fn meta(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String, s: Source| {
            m.insert(k.to_string(), v);
            m.insert(format!("{k}_source"), s.to_string());
        };
        put("fixtures", self.fixtures.value.display().to_string(), self.fixtures.source);
        put("jobs", self.jobs.value.to_string(), self.jobs.source);
        put("emit", self.emit.value.to_string(), self.emit.source);
        put("timeout", self.timeout.value.to_string(), self.timeout.source);
        match &self.backend {
            Some(b) => put("backend", b.value.clone(), b.source),
            None => put("backend", "none".into(), Source::Default),
        }
        m.insert(
            "config_file".into(),
            self.config_file.as_ref().map_or("none".into(), |p| p.display().to_string()),
        );
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env_of(pairs: &'static [(&'static str, &'static str)]) -> impl Fn(&str) -> Option<String> {
        move |k| pairs.iter().find(|(n, _)| *n == k).map(|(_, v)| v.to_string())
    }

    #[test]
    fn flags_beat_env_beat_file() {
        let file = ConfigFile {
            jobs: Some(3),
            fixtures: Some("from-file".into()),
            emit: Some("csv".into()),
            backend: Some("gp -q".into()),
            timeout: Some(10),
        };
        let env = env_of(&[(ENV_JOBS, "5"), (ENV_EMIT, "structured-text")]);
        let flags = SieveFlags {
            jobs: Some(7),
            ..Default::default()
        };
        let s = Settings::resolve(&flags, &env, &file, None).unwrap();
        assert_eq!(s.jobs, Setting { value: 7, source: Source::Flag });
        assert_eq!(s.emit, Setting { value: Format::StructuredText, source: Source::Env });
        assert_eq!(s.fixtures.source, Source::ConfigFile);
        assert_eq!(s.fixtures.value, PathBuf::from("from-file"));
        assert_eq!(s.timeout.value, 10);
        assert_eq!(s.backend.as_ref().unwrap().source, Source::ConfigFile);
        let m = s.meta();
        assert_eq!(m["jobs_source"], "flag");
        assert_eq!(m["emit_source"], "env");
        assert_eq!(m["fixtures_source"], "config");
    }

    #[test]
    fn defaults_and_bad_values() {
        let none = |_: &str| None;
        let s = Settings::resolve(&SieveFlags::default(), &none, &ConfigFile::default(), None).unwrap();
        assert_eq!(s.fixtures.source, Source::Default);
        assert_eq!(s.timeout.value, 600);
        assert!(s.backend.is_none());
        let env = env_of(&[(ENV_JOBS, "many")]);
        assert!(Settings::resolve(&SieveFlags::default(), &env, &ConfigFile::default(), None).is_err());
        let flags = SieveFlags {
            emit: Some("xml".into()),
            ..Default::default()
        };
        assert!(Settings::resolve(&flags, &none, &ConfigFile::default(), None).is_err());
    }

    #[test]
    fn config_files() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.toml");
        std::fs::write(&p, "jobs = 2\nbackend = \"gp -q\"\n").unwrap();
        let (cfg, used) = load_config(&p, true).unwrap();
        assert_eq!(cfg.jobs, Some(2));
        assert_eq!(used, Some(p.clone()));
        std::fs::write(&p, "jobz = 2\n").unwrap();
        assert!(matches!(load_config(&p, true), Err(ConfigError::Syntax { .. })));
        let missing = dir.path().join("none.toml");
        assert!(load_config(&missing, true).is_err());
        assert_eq!(load_config(&missing, false).unwrap(), (ConfigFile::default(), None));
        let env = env_of(&[(ENV_CONFIG, "/etc/x.toml")]);
        assert_eq!(config_path(None, &env), (PathBuf::from("/etc/x.toml"), true));
        assert_eq!(config_path(Some(&p), &env), (p.clone(), true));
        assert_eq!(config_path(None, &|_| None), (PathBuf::from(DEFAULT_CONFIG_FILE), false));
    }
}
