use thiserror::Error;

use crate::surface::Violation;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("grid too coarse: {n_intervals} intervals, need at least {min}")]
    GridTooCoarse { n_intervals: usize, min: usize },

    #[error("invalid profile: {}", describe(.0))]
    InvalidProfile(Vec<Violation>),

    #[error("node {index} out of range 0..={last}")]
    IndexOutOfRange { index: usize, last: usize },

    #[error("node {index} is a pole; a parallel loop needs an interior node")]
    PoleIndex { index: usize },

    #[error("`{name}` = {value} is outside {range}")]
    InvalidParameter {
        name: String,
        value: f64,
        range: String,
    },

    #[error("flow step failed at t = {time}: {reason}")]
    StepFailed { time: f64, reason: String },

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("no sign change in range [{lo}, {hi}] (s = {s_lo}, {s_hi})")]
    NoSignChange {
        lo: f64,
        hi: f64,
        s_lo: f64,
        s_hi: f64,
    },

    #[error("{0}")]
    Degenerate(String),
}

fn describe(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn parameter(name: &str, value: f64, range: &str) -> Error {
    Error::InvalidParameter {
        name: name.to_string(),
        value,
        range: range.to_string(),
    }
}
