use thiserror::Error;

/// Errors surfaced by construction and validation of rankings, distributions,
/// and the adversarial search routines.
#[derive(Debug, Error)]
pub enum Error {
    /// Two arguments that must live on the same item set had different sizes.
    #[error("size mismatch: expected {expected} items, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    /// Item count outside the supported range (exhaustive enumeration over
    /// all permutations bounds how large `n` can get).
    #[error("item count {got} out of range ({min}..={max})")]
    ItemCountOutOfRange { got: usize, min: usize, max: usize },

    /// Rank vector is not a permutation of 1..=n.
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    /// Bucket list is not an ordered partition of the item set.
    #[error("invalid bucket ranking: {0}")]
    InvalidBucketRanking(String),

    /// Probability vector is negative somewhere or does not sum to 1.
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// Pairwise marginal matrix is not consistent (P[i][j] + P[j][i] = 1,
    /// diagonal 1/2, entries in [0, 1]).
    #[error("invalid pairwise matrix: {0}")]
    InvalidPairwiseMatrix(String),

    /// A scalar parameter (probability, threshold, step size, ...) was
    /// outside its documented range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The pairwise matrix has a tie or a cyclic triple, so the sort-by-wins
    /// shortcut for the median does not apply.
    #[error("pairwise matrix is not strictly stochastically transitive")]
    NotStrictlySst,

    /// The smoothed primal-dual attack produced non-finite logits.
    #[error("attack diverged at step {step}")]
    AttackDiverged {
        step: usize,
        trace: Vec<crate::attack::TraceStep>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
