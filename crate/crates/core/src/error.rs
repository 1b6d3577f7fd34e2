//! Error types shared across the library.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("odd power of v survives in {0}")]
    OddPowerPresent(String),
    #[error("{0} has a pole at v^2 = 1/q")]
    PoleAtCurve(String),
    #[error("cyclotomic value {0} is not rational")]
    NotRational(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HeckeError {
    #[error(transparent)]
    Scalar(#[from] ScalarError),

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("extension degree {requested} exceeds configured bound {bound}")]
    DegreeBoundExceeded { requested: u32, bound: u32 },

    #[error("{m} does not divide {n}")]
    NonDividingDegree { m: u32, n: u32 },

    #[error("unknown closed point {0}")]
    UnknownPoint(String),

    #[error("vector ({0}, {1}) lies outside the cone")]
    ConeViolation(i64, i64),

    #[error("vectors ({0}, {1}) and ({2}, {3}) are collinear")]
    CollinearInput(i64, i64, i64, i64),

    #[error("partition weight {weight} exceeds bound {bound}")]
    WeightBoundExceeded { weight: usize, bound: usize },

    #[error("character orbit {0} is not a norm of any primitive orbit")]
    NotAGeneratorOfAnyTower(String),

    #[error(
        "bracket [t{z:?}, t{w:?}] in tower degree {tower} needs the gamma=2 relation constant, which is not configured"
    )]
    UnsupportedRelation {
        z: (i64, i64),
        w: (i64, i64),
        tower: u32,
    },

    #[error("no admissible Jacobi split for [t{0:?}, t{1:?}]")]
    NoSplit((i64, i64), (i64, i64)),

    #[error("normal ordering exceeded the step budget of {0}")]
    StepBudgetExceeded(usize),

    #[error("multiplicity of {target} is {value}, not a nonnegative integer")]
    NonIntegerMultiplicity { target: String, value: String },

    #[error("sum rule violated for {source_id}: total {total}, expected {expected}")]
    SumRuleViolation {
        source_id: String,
        total: String,
        expected: String,
    },

    #[error("polygon containment violated: {0}")]
    PolygonViolation(String),

    #[error("{0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, HeckeError>;
