use thiserror::Error;

/// Errors surfaced by the library. Numerical checks that merely fail are
/// reported through verdict structures, not through this type.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown space `{0}` (expected `twistor` or `cpn:N` with N >= 1)")]
    UnknownSpace(String),
    #[error("block `{block}` is not available for space `{space}`")]
    InvalidBlock { space: String, block: String },
    #[error("singular linear system")]
    Singular,
    #[error("divergent multiple zeta index {0:?}: the leading entry must be at least 2")]
    DivergentIndex(Vec<u32>),
    #[error("invalid series parameters: {0}")]
    InvalidSeries(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("no cyclic vector among {tried} candidates (best Krylov rank {best_rank} of {dim})")]
    NoCyclicVector { tried: usize, best_rank: usize, dim: usize },
    #[error("eigenvalue groups overlap; nothing to split")]
    SpectralOverlap,
    #[error("descendant key {0} cannot be grounded by the recursion")]
    UnreachableKey(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
