use thiserror::Error;

use crate::sprouting::SproutScene;

#[derive(Debug, Error)]
pub enum KakeyaError {
    #[error("circles coincide")]
    IdenticalCircles,
    #[error("negative input: {0}")]
    NegativeInput(&'static str),
    #[error("input out of range: {0}")]
    OutOfRange(String),
    #[error("no solution: {0}")]
    NoSolution(&'static str),
    #[error("degenerate input: {0}")]
    Degenerate(&'static str),
    #[error("not a triangle")]
    NotATriangle,
    #[error("sides must be sorted a <= b <= c")]
    UnsortedSides,
    #[error("hypotheses violated: {0}")]
    HypothesesViolated(String),
    #[error("no intersection: {0}")]
    NoIntersection(&'static str),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("construction failed at level {level}, x = {x}: {invariant}")]
    ConstructionFailed {
        level: u32,
        x: String,
        invariant: String,
        partial: Box<SproutScene>,
    },
    #[error("scene incomplete")]
    SceneIncomplete,
    #[error("arc too long: {0}")]
    ArcTooLong(String),
    #[error("recursion infeasible: {0}")]
    RecursionInfeasible(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl KakeyaError {
    /// Stable code name, also used across the C ABI.
    pub fn code(&self) -> &'static str {
        match self {
            KakeyaError::IdenticalCircles => "IDENTICAL_CIRCLES",
            KakeyaError::NegativeInput(_) => "NEGATIVE_INPUT",
            KakeyaError::OutOfRange(_) => "OUT_OF_RANGE",
            KakeyaError::NoSolution(_) => "NO_SOLUTION",
            KakeyaError::Degenerate(_) => "DEGENERATE",
            KakeyaError::NotATriangle => "NOT_A_TRIANGLE",
            KakeyaError::UnsortedSides => "UNSORTED_SIDES",
            KakeyaError::HypothesesViolated(_) => "HYPOTHESES_VIOLATED",
            KakeyaError::NoIntersection(_) => "NO_INTERSECTION",
            KakeyaError::IndexOutOfRange(_) => "INDEX_OUT_OF_RANGE",
            KakeyaError::InvalidSpec(_) => "INVALID_SPEC",
            KakeyaError::ConstructionFailed { .. } => "CONSTRUCTION_FAILED",
            KakeyaError::SceneIncomplete => "SCENE_INCOMPLETE",
            KakeyaError::ArcTooLong(_) => "ARC_TOO_LONG",
            KakeyaError::RecursionInfeasible(_) => "RECURSION_INFEASIBLE",
            KakeyaError::Io(_) => "IO",
            KakeyaError::Json(_) => "JSON",
        }
    }
}

pub type Result<T> = std::result::Result<T, KakeyaError>;
