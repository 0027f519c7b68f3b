use thiserror::Error;

use crate::matroid::{ElementId, SetId, Violation};

#[derive(Debug, Error)]
pub enum MatroidError {
    #[error("invalid laminar matroid: {}", join(.0))]
    Invalid(Vec<Violation>),
    #[error("unknown element {0}")]
    UnknownElement(ElementId),
    #[error("unknown set {0}")]
    UnknownSet(SetId),
    #[error("{size} candidates exceed the exhaustive-search limit of {limit}")]
    TooLarge { size: usize, limit: usize },
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Matroid(#[from] MatroidError),
    #[error("schedule covers {got} elements but the matroid has {expected}")]
    ScheduleMismatch { expected: usize, got: usize },
    #[error("invalid arrival schedule: {0}")]
    InvalidSchedule(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Error)]
pub enum BoundError {
    #[error("invalid parameter: {0}")]
    Domain(String),
    /// The geometric tail bound diverges: e * x >= 1.
    #[error("tail bound diverges: e*x = {ex} >= 1 (t0 must exceed e^(-1/e) = 0.6922 for unbounded rank)")]
    Convergence { ex: f64 },
}

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid instance: {}", join(.0))]
    Invalid(Vec<Violation>),
    #[error("infeasible generator spec: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<MatroidError> for InstanceError {
    fn from(e: MatroidError) -> Self {
        match e {
            MatroidError::Invalid(v) => InstanceError::Invalid(v),
            other => InstanceError::Infeasible(other.to_string()),
        }
    }
}

fn join(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}
