use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("cannot parse rational from {0:?}")]
    ParseRational(String),

    #[error("zero denominator")]
    ZeroDenominator,

    #[error("unknown order {0:?}")]
    UnknownOrder(String),

    #[error("invalid order description: {0}")]
    InvalidOrder(String),

    /// No qualifying point among the first `budget` enumerated points. On an
    /// order declared without isolated points this means the interval was
    /// empty, i.e. evidence of an isolated point or an endpoint.
    #[error("search budget of {budget} points exceeded looking in ({}, {})",
        fmt_bound(.lower, "-inf"), fmt_bound(.upper, "+inf"))]
    BudgetExceeded {
        lower: Option<Rational>,
        upper: Option<Rational>,
        budget: usize,
    },

    #[error("map is not injective: {0}")]
    NotInjective(String),

    #[error("2-adic hypothesis fails for {a} and {b} against r = {r}")]
    PreconditionOrd2 { a: Rational, b: Rational, r: Rational },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("generator prefix too short to decompose {0}")]
    NeedLongerPrefix(Rational),

    #[error("greedy search for q_{index} gave up after {cap} candidates")]
    CandidateCap { index: usize, cap: usize },

    #[error("depth {depth} exceeds the limit of {limit}")]
    DepthLimit { depth: usize, limit: usize },

    #[error("order {0} must have no isolated points, and for Q also lack a maximum or a minimum")]
    OrderUnsuitable(String),

    #[error("internal invariant broken: {0}")]
    Internal(String),
}

fn fmt_bound(b: &Option<Rational>, open: &str) -> String {
    b.as_ref().map_or_else(|| open.to_string(), |r| r.to_string())
}
