use std::path::PathBuf;

use thiserror::Error;

use crate::trial_data::ScoreKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: expected 3 fields `<trial_id> <score> <label>`, found {found}")]
    MalformedLine { line: usize, found: usize },

    #[error("line {line}: cannot parse score `{token}`")]
    InvalidScore { line: usize, token: String },

    #[error("line {line}: score `{token}` is not finite")]
    NonFiniteScore { line: usize, token: String },

    #[error("line {line}: unknown label `{token}` for {kind} file")]
    UnknownLabel {
        line: usize,
        token: String,
        kind: ScoreKind,
    },

    #[error("line {line}: duplicate trial id `{id}`")]
    DuplicateTrialId { line: usize, id: String },

    #[error("trial id must be non-empty")]
    EmptyTrialId,

    #[error("score file contains no trials")]
    EmptyFile,

    #[error("{kind} score set needs {requirement}")]
    Cardinality {
        kind: ScoreKind,
        requirement: &'static str,
    },

    #[error("score set has no {0} trials")]
    EmptyClass(&'static str),

    #[error("score set kind is {found}, expected {expected}")]
    WrongKind {
        expected: ScoreKind,
        found: ScoreKind,
    },

    #[error("threshold must not be NaN")]
    NanThreshold,

    #[error("`{name}` = {value} is outside {range}")]
    Domain {
        name: String,
        value: f64,
        range: &'static str,
    },

    #[error("priors sum to {sum}, expected 1")]
    PriorSum { sum: f64 },

    #[error("all costs are zero")]
    ZeroCosts,

    #[error("degenerate cost weighting: c_miss*pi_tar + c_fa*(1-pi_tar) = 0")]
    DegenerateWeighting,

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("config: {0}")]
    Config(String),

    #[error("config key `{key}`: {message}")]
    ConfigKey { key: String, message: String },

    #[error("unknown {registry} `{name}` (available: {available})")]
    UnknownStrategy {
        registry: &'static str,
        name: String,
        available: String,
    },

    #[error("empirical spoof mode requires spoof trials in the ASV score set")]
    MissingSpoofTrials,

    #[error("calibration: {0}")]
    Calibration(String),

    #[error("calibration did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },
}
