use thiserror::Error;

/// Why a monoid failed the group mapping test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GmReason {
    NoNontrivialGroup,
    LeftUnfaithful,
    RightUnfaithful,
    No0MinimalRegularIdeal,
}

impl std::fmt::Display for GmReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GmReason::NoNontrivialGroup => "no-nontrivial-group",
            GmReason::LeftUnfaithful => "left-unfaithful",
            GmReason::RightUnfaithful => "right-unfaithful",
            GmReason::No0MinimalRegularIdeal => "no-0-minimal-regular-ideal",
        })
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid monoid: {0}")]
    InvalidMonoid(String),
    #[error("NOT_GROUP_MAPPING({0})")]
    NotGroupMapping(GmReason),
    #[error("NOT_REGULAR: {0}")]
    NotRegular(String),
    #[error("R_MISMATCH: partitions over {0} and {1} points")]
    RMismatch(usize, usize),
    #[error("LATTICE_MISMATCH")]
    LatticeMismatch,
    #[error("TOO_LARGE: |R| = {0} exceeds the materialization bound {1}")]
    TooLarge(usize, usize),
    #[error("SAME_STATE: sampling needs two distinct states, got {0} twice")]
    SameState(usize),
    #[error("NOT_A_SUBMONOID: {0}")]
    NotASubmonoid(String),
    #[error("NOT_LOOPABLE: {0}")]
    NotLoopable(String),
    #[error("NOT_ADMISSIBLE: {0}")]
    NotAdmissible(String),
    #[error("BUDGET_EXHAUSTED: {0}")]
    BudgetExhausted(String),
    #[error("unknown letter `{0}`")]
    UnknownLetter(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
