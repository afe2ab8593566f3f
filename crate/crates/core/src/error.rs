use thiserror::Error;

use crate::model::Violation;
use crate::sp::SpError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {}", format_violations(.0))]
    Invalid(Vec<Violation>),

    #[error(transparent)]
    Sp(#[from] SpError),

    #[error("flow network has no vertex named {0:?}")]
    MissingTerminal(String),

    #[error("approximation scheme requires unit interdiction costs (arc {arc:?} has cost {cost})")]
    NonUnitCosts { arc: String, cost: u64 },

    #[error("graph is not a two-terminal parallel graph")]
    NotParallelGraph,

    #[error("instance too large for enumeration: {arcs} arcs, limit is {limit}")]
    TooLarge { arcs: usize, limit: usize },

    #[error("arithmetic overflow: {0}")]
    Overflow(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}
