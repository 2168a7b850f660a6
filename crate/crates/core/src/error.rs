use thiserror::Error;

use crate::graph::GraphError;
use crate::ilp::IlpError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Ilp(#[from] IlpError),
    #[error("n_tilde = {n_tilde} is below the vertex count {n}")]
    NTildeTooSmall { n_tilde: usize, n: usize },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("invalid profile: {0}")]
    Profile(String),
    #[error("operation needs a hypergraph topology")]
    NotHypergraph,
    #[error("hyperedge {0} is not contained in any cover cluster")]
    Uncovered(usize),
    #[error("local solve on component {component} failed: {source}")]
    Component { component: usize, source: IlpError },
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("trial with seed {seed} failed: {error}")]
    Trial { seed: u64, error: Box<Error> },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// True if a computed result broke a guarantee, as opposed to bad input.
    pub fn is_invariant(&self) -> bool {
        match self {
            Error::Invariant(_) => true,
            Error::Trial { error, .. } => error.is_invariant(),
            _ => false,
        }
    }
}

/// Returns an invariant violation unless `cond` holds.
macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err($crate::Error::Invariant(format!($($fmt)+)));
        }
    };
}
pub(crate) use ensure;
