use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid graph parameters: {0}")]
    InvalidGraph(String),
    #[error("graph would have {requested} vertices, above the cap of {cap}")]
    VertexCap { requested: u128, cap: usize },
    #[error("vertex {0} is out of range")]
    VertexOutOfRange(usize),
    #[error("radius {requested} around vertex {vertex} reaches the truncation boundary (interior radius {available})")]
    BeyondTruncation {
        vertex: usize,
        requested: usize,
        available: usize,
    },
    #[error("invalid rule: {0}")]
    InvalidRule(String),
    #[error("neighbourhood has {patterns} patterns, above the enumeration cap of {cap}")]
    EnumerationCap { patterns: u128, cap: u128 },
    #[error("state space of size {states} exceeds the cap of {cap}")]
    StateSpaceCap { states: u128, cap: u128 },
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),
    #[error("rate {rate} at site {site} (state {from} -> {to}) is not finite and non-negative")]
    BadRate {
        site: usize,
        from: u8,
        to: u8,
        rate: f64,
    },
    #[error("rule is not monotone: {0}")]
    NotMonotone(String),
    #[error("coupling order violated at t={time} on site {site}: low={low}, high={high}")]
    OrderViolation {
        time: f64,
        site: usize,
        low: u8,
        high: u8,
    },
    #[error("grid time {time} outside [0, {t_end}]")]
    GridOutOfRange { time: f64, t_end: f64 },
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),
    #[error("not enough replicas: need at least {needed}, got {got}")]
    TooFewReplicas { needed: usize, got: usize },
    #[error("level {alpha} is outside the observed mean range [{low}, {high}]")]
    LevelOutOfRange { alpha: f64, low: f64, high: f64 },
    #[error("mean degradation is not strictly increasing around the crossing (grid index {0})")]
    NotIncreasing(usize),
    #[error("{censored} of {total} replicas never crossed the threshold; increase t_end")]
    Censored { censored: usize, total: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
