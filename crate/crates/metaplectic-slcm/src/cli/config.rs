//! Flat `key = value` job configuration.

use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

use crate::characters::{AddCharTwist, GenuineCharData, MultChar};
use crate::lagrangian::{DecompositionKind, LagrangianDecomposition};
use crate::tame_field::{FStarClass, TameContext};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{key}`: cannot parse `{value}`")]
    BadValue { key: String, value: String },
    #[error("missing required key `{0}`")]
    Missing(&'static str),
    #[error("invalid context: {0}")]
    Context(String),
    #[error("invalid character: {0}")]
    Character(String),
    #[error("unknown decomposition `{0}` (expected standard or swapped)")]
    Decomposition(String),
    #[error("{0}")]
    Job(String),
}

pub const KEYS: &[&str] = &[
    "p",
    "f",
    "n",
    "modulus",
    "chi.unit_exp",
    "chi.varpi_num",
    "chi.varpi_den",
    "psi.val",
    "psi.unit_exp",
    "decomposition",
    "k.val",
    "k.unit_exp",
    "oracle.depth",
];

/// A validated job: context, character data, decomposition and options.
#[derive(Debug, Clone)]
pub struct JobConfig {
    pub p: u64,
    pub f: u32,
    pub n: u64,
    pub modulus: Option<Vec<u64>>,
    pub unit_exp: i64,
    pub varpi_num: i64,
    pub varpi_den: i64,
    pub psi_val: i64,
    pub psi_unit_exp: i64,
    pub decomposition: DecompositionKind,
    pub k_val: i64,
    pub k_unit_exp: i64,
    pub oracle_depth: u32,
}

/// Raw key-value pairs, later entries overriding earlier ones.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse_text(text: &str) -> Result<RawConfig, ConfigError> {
        let mut raw = RawConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
            raw.set(k.trim(), v.trim())?;
        }
        Ok(raw)
    }

    pub fn read(path: &Path) -> Result<RawConfig, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io { path: path.display().to_string(), message: e.to_string() })?;
        Self::parse_text(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        if !KEYS.contains(&key) {
            return Err(ConfigError::UnknownKey(key.to_string()));
        }
        self.entries.insert(key.to_string(), value.to_string());
        Ok(())
    }

    /// Applies a `key=value` override.
    pub fn set_pair(&mut self, pair: &str) -> Result<(), ConfigError> {
        let (k, v) = pair.split_once('=').ok_or(ConfigError::Syntax { line: 0 })?;
        self.set(k.trim(), v.trim())
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| ConfigError::BadValue { key: key.to_string(), value: v.clone() }),
        }
    }

    pub fn into_job(self) -> Result<JobConfig, ConfigError> {
        let p = self.get("p")?.ok_or(ConfigError::Missing("p"))?;
        let n = self.get("n")?.ok_or(ConfigError::Missing("n"))?;
        let modulus = match self.entries.get("modulus") {
            None => None,
            Some(v) => Some(
                v.split(',')
                    .map(|c| c.trim().parse::<u64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| ConfigError::BadValue { key: "modulus".into(), value: v.clone() })?,
            ),
        };
        let decomposition = match self.entries.get("decomposition") {
            None => DecompositionKind::Standard,
            Some(v) => DecompositionKind::parse(v).ok_or_else(|| ConfigError::Decomposition(v.clone()))?,
        };
        let job = JobConfig {
            p,
            f: self.get("f")?.unwrap_or(1),
            n,
            modulus,
            unit_exp: self.get("chi.unit_exp")?.unwrap_or(0),
            varpi_num: self.get("chi.varpi_num")?.unwrap_or(0),
            varpi_den: self.get("chi.varpi_den")?.unwrap_or(1),
            psi_val: self.get("psi.val")?.unwrap_or(0),
            psi_unit_exp: self.get("psi.unit_exp")?.unwrap_or(0),
            decomposition,
            k_val: self.get("k.val")?.unwrap_or(0),
            k_unit_exp: self.get("k.unit_exp")?.unwrap_or(0),
            oracle_depth: self.get("oracle.depth")?.unwrap_or(2),
        };
        job.validate()?;
        Ok(job)
    }
}

/// Everything a command needs, built from a validated job.
pub struct Job {
    pub config: JobConfig,
    pub ctx: TameContext,
    pub data: GenuineCharData,
    pub decomposition: LagrangianDecomposition,
    pub k: FStarClass,
}

impl JobConfig {
    fn validate(&self) -> Result<(), ConfigError> {
        self.build().map(|_| ())
    }

    pub fn build(&self) -> Result<Job, ConfigError> {
        let ctx = TameContext::new(self.p, self.f, self.n, self.modulus.clone())
            .map_err(|e| ConfigError::Context(e.to_string()))?;
        let chi = MultChar::from_config(&ctx, self.unit_exp, self.varpi_num, self.varpi_den)
            .map_err(|e| ConfigError::Character(e.to_string()))?;
        let psi = AddCharTwist::new(ctx.class(self.psi_val, self.psi_unit_exp));
        let data = GenuineCharData::new(chi, psi, ctx.cover);
        let decomposition = LagrangianDecomposition::of_kind(&ctx, self.decomposition);
        let k = ctx.class(self.k_val, self.k_unit_exp);
        if decomposition.k_index(&ctx, k).is_none() {
            return Err(ConfigError::Job(format!(
                "k = ({}, {}) is not a class of K for the {} decomposition",
                self.k_val,
                self.k_unit_exp,
                self.decomposition.name()
            )));
        }
        if !(1..=3).contains(&self.oracle_depth) {
            return Err(ConfigError::BadValue { key: "oracle.depth".into(), value: self.oracle_depth.to_string() });
        }
        Ok(Job { config: self.clone(), ctx, data, decomposition, k })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_overrides() {
        let mut raw = RawConfig::parse_text("# job\np = 7\nn=3 # cover\n\nchi.unit_exp = 2\n").unwrap();
        raw.set_pair("chi.unit_exp=4").unwrap();
        let job = raw.into_job().unwrap();
        assert_eq!((job.p, job.f, job.n, job.unit_exp), (7, 1, 3, 4));
        assert_eq!(job.decomposition, DecompositionKind::Standard);
    }

    #[test]
    fn reports_precise_errors() {
        assert_eq!(RawConfig::parse_text("p 7").unwrap_err(), ConfigError::Syntax { line: 1 });
        assert_eq!(RawConfig::parse_text("q = 7").unwrap_err(), ConfigError::UnknownKey("q".into()));
        assert_eq!(RawConfig::parse_text("p = 7").unwrap().into_job().unwrap_err(), ConfigError::Missing("n"));
        let bad = RawConfig::parse_text("p = 7\nn = x").unwrap().into_job().unwrap_err();
        assert_eq!(bad, ConfigError::BadValue { key: "n".into(), value: "x".into() });
        for text in ["p = 7\nn = 4", "p = 7\nn = 5", "p = 9\nn = 2", "p = 7\nn = 3\nchi.varpi_den = 5"] {
            assert!(RawConfig::parse_text(text).unwrap().into_job().is_err(), "{}", text);
        }
        let k = RawConfig::parse_text("p = 7\nn = 3\nk.unit_exp = 1").unwrap().into_job().unwrap_err();
        assert!(matches!(k, ConfigError::Job(_)));
        let d = RawConfig::parse_text("p = 7\nn = 3\ndecomposition = other").unwrap().into_job().unwrap_err();
        assert_eq!(d, ConfigError::Decomposition("other".into()));
    }
}
