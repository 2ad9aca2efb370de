//! Scenario files: flat `key = value` lines with `#` comments.
//!
//! ```text
//! # two agents that listen to each other
//! weights = 0.5 0.5; 0.5 0.5
//! alpha   = 0.5
//! x1      = 0.3          # broadcast to every agent
//! t_max   = 3000
//! ```
//!
//! `weights` is either an inline matrix (rows separated by `;`) or a path,
//! resolved against the scenario file's directory. Agent lists (`stubborn`)
//! are 1-based.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{load_weight_matrix, parse_inline_matrix, WeightMatrix};

pub const KEYS: &[&str] = &[
    "weights",
    "alpha",
    "x1",
    "t_max",
    "runs",
    "seed",
    "delta",
    "window",
    "stubborn",
    "sample_times",
    "schedule",
    "beta",
    "steps",
    "x0",
    "output_dir",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScenarioFile {
    path: Option<PathBuf>,
    /// key → (line number, raw value)
    entries: BTreeMap<String, (usize, String)>,
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(Error::parse(
                    line,
                    format!("expected `key = value`, found `{content}`"),
                ));
            };
            let key = key.trim();
            let value = value.trim();
            if !KEYS.contains(&key) {
                return Err(Error::parse(line, format!("unknown key `{key}`")));
            }
            if value.is_empty() {
                return Err(Error::parse(line, format!("`{key}` has no value")));
            }
            if let Some((first, _)) = entries.insert(key.to_string(), (line, value.to_string())) {
                return Err(Error::parse(
                    line,
                    format!("`{key}` already set on line {first}"),
                ));
            }
        }
        Ok(ScenarioFile {
            path: None,
            entries,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut file = Self::parse(&text).map_err(|e| e.with_path(path))?;
        file.path = Some(path.to_path_buf());
        Ok(file)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(_, v)| v.as_str())
    }

    fn error(&self, line: usize, message: String) -> Error {
        let e = Error::parse(line, message);
        match &self.path {
            Some(p) => e.with_path(p),
            None => e,
        }
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        let Some((line, v)) = self.entries.get(key) else {
            return Ok(None);
        };
        v.parse()
            .map(Some)
            .map_err(|e| self.error(*line, format!("invalid `{key}`: {e}")))
    }

    /// Comma- or whitespace-separated list.
    pub fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>>
    where
        T::Err: std::fmt::Display,
    {
        let Some((line, v)) = self.entries.get(key) else {
            return Ok(None);
        };
        parse_list(v)
            .map(Some)
            .map_err(|e| self.error(*line, format!("invalid `{key}`: {e}")))
    }

    pub fn weights(&self) -> Result<Option<WeightMatrix>> {
        let Some((line, v)) = self.entries.get("weights") else {
            return Ok(None);
        };
        if looks_inline(v) {
            return parse_inline_matrix(v)
                .map(Some)
                .map_err(|e| self.error(*line, format!("invalid `weights`: {e}")));
        }
        let base = self.path.as_ref().and_then(|p| p.parent());
        let path = match base {
            Some(dir) => dir.join(v),
            None => PathBuf::from(v),
        };
        if !path.exists() {
            return Err(self.error(
                *line,
                format!("weights file `{}` not found", path.display()),
            ));
        }
        load_weight_matrix(&path).map(Some)
    }

    pub fn output_dir(&self) -> Option<PathBuf> {
        let v = self.raw("output_dir")?;
        let base = self.path.as_ref().and_then(|p| p.parent());
        Some(match base {
            Some(dir) => dir.join(v),
            None => PathBuf::from(v),
        })
    }
}

/// True when a `weights` value is a matrix literal rather than a path.
pub fn looks_inline(v: &str) -> bool {
    v.contains(';') || v.split_whitespace().all(|t| t.parse::<f64>().is_ok())
}

pub fn parse_list<T: FromStr>(v: &str) -> std::result::Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    v.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|e| format!("`{t}`: {e}")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_comments() {
        let f = ScenarioFile::parse(
            "# demo\nalpha = 0.5\n\nx1 = 0.3, 0.4 # two agents\nweights = 0.5 0.5; 0.5 0.5\n",
        )
        .unwrap();
        assert_eq!(f.get::<f64>("alpha").unwrap(), Some(0.5));
        assert_eq!(f.list::<f64>("x1").unwrap(), Some(vec![0.3, 0.4]));
        assert_eq!(f.weights().unwrap().unwrap().n(), 2);
        assert_eq!(f.get::<u64>("seed").unwrap(), None);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = ScenarioFile::parse("alpha = 0.5\nspeed = 3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = ScenarioFile::parse("alpha = 0.5\n\nalpha = 0.2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = ScenarioFile::parse("seed = 1\nalpha = fast\n")
            .unwrap()
            .get::<f64>("alpha")
            .unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = ScenarioFile::parse("weights = 0.5 0.6; 0.5 0.5")
            .unwrap()
            .weights()
            .unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
        let err = ScenarioFile::parse("\nweights = missing.txt")
            .unwrap()
            .weights()
            .unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn weights_path_is_relative_to_file() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("w.txt"), "2\n1 0\n0 1\n").unwrap();
        let cfg = dir.path().join("s.cfg");
        std::fs::write(&cfg, "weights = w.txt\n").unwrap();
        let f = ScenarioFile::load(&cfg).unwrap();
        assert_eq!(f.weights().unwrap().unwrap(), WeightMatrix::identity(2));
    }
}
