use thiserror::Error;

use crate::params::Condition;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("linear system is singular or too ill-conditioned (condition estimate {condition:.3e})")]
    Singular { condition: f64 },

    #[error("no convergence at n = {n}: tail magnitude {tail:.3e} exceeds {tol:.3e}")]
    NotConverged { n: usize, tail: f64, tol: f64 },

    #[error("degenerate parameters: {}", format_conditions(.0))]
    Degenerate(Vec<Condition>),

    #[error("near a singular point: {0}")]
    NearSingularity(String),

    #[error("matching system at x = {at} is singular (condition estimate {condition:.3e})")]
    MatchingSingular { at: f64, condition: f64 },

    #[error("internal error: {0}")]
    Internal(String),
}

fn format_conditions(conds: &[Condition]) -> String {
    conds
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
