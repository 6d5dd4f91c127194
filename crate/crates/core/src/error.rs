use thiserror::Error;

/// Errors reported by dataset construction and the solvers.
///
/// An aborted probe is *not* an error: solvers report it through the
/// `aborted` flag on their result type. `Internal` marks a violated
/// structural invariant and should never occur on a valid pseudometric.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("infeasible request: {0}")]
    Infeasible(String),

    #[error("enumeration budget exceeded: {required} candidate sets, budget {budget}")]
    BudgetExceeded { required: u128, budget: u64 },

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("diversity of an empty selection is undefined")]
    EmptySelection,
}

pub type Result<T> = std::result::Result<T, Error>;
