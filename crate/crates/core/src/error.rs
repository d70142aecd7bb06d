use std::path::PathBuf;

use thiserror::Error;

/// A configuration value that violates a type invariant.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: String, reason: String },
}

impl ConfigError {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ConfigError::Invalid { field: field.into(), reason: reason.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SensingError {
    #[error("distance must be non-negative, got {0}")]
    NegativeDistance(f64),
    #[error("speed must be non-negative, got {0}")]
    NegativeSpeed(f64),
    #[error("`{0}` must be positive")]
    NonPositiveParameter(&'static str),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GroupingError {
    #[error("cannot split an empty set of agents")]
    NoAgents,
    #[error("at least one route is required")]
    NoRoutes,
    #[error("no candidate split can pass the obstacles within the time budget")]
    NoFeasiblePlan,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AvoidanceError {
    #[error("gap of {gap:.3} m is too narrow, at least {required:.3} m is needed")]
    GapTooNarrow { gap: f64, required: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AssignmentError {
    #[error("{sources} sources but {targets} targets")]
    SizeMismatch { sources: usize, targets: usize },
    #[error("cost matrix must be square, row {row} has {len} entries for {n} rows")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("only lambda = 0 is supported, got {0}")]
    UnsupportedLambda(f64),
    #[error("cost matrix contains a non-finite entry")]
    NonFiniteCost,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnergyError {
    #[error("power model needs at least three samples")]
    TooFewSamples,
    #[error("sample speeds must be strictly increasing (index {0})")]
    NotIncreasing(usize),
    #[error("sample powers must be positive and finite (index {0})")]
    NonPositivePower(usize),
    #[error("power curve must have a single interior minimum")]
    NoInteriorMinimum,
    #[error("reference energy is zero")]
    ZeroReference,
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Grouping(#[from] GroupingError),
    #[error(transparent)]
    Avoidance(#[from] AvoidanceError),
    #[error(transparent)]
    Assignment(#[from] AssignmentError),
    #[error("forced split {sizes:?} does not match {routes} routes and {agents} agents")]
    BadForcedSplit { sizes: Vec<usize>, routes: usize, agents: usize },
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error(transparent)]
    Invalid(#[from] ConfigError),
    #[error(transparent)]
    Energy(#[from] EnergyError),
}

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("cannot serialize config: {0}")]
    Json(#[from] serde_json::Error),
}
