use thiserror::Error;

/// Either kind of failure; what the solver entry points return.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CsisoError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Structural errors: a Cayley table, subgroup or series fails validation.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("table row {0} is not a permutation of 0..n-1")]
    RowNotLatin(usize),
    #[error("table column {0} is not a permutation of 0..n-1")]
    ColumnNotLatin(usize),
    #[error("element 0 is not a two-sided identity (fails at {0})")]
    IdentityBroken(usize),
    #[error("no inverse for element {0}")]
    InverseMissing(usize),
    #[error("associativity fails at ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("element index {index} out of range for group of order {order}")]
    IndexOutOfRange { index: usize, order: usize },
    #[error("element set is not a subgroup: {0}")]
    NotSubgroup(String),
    #[error("subgroup belongs to a different parent group")]
    ParentMismatch,
    #[error("subgroup is not normal (conjugation by {0} escapes)")]
    NotNormal(usize),
    #[error("element {0} does not normalize the subgroup")]
    NotNormalizedBy(usize),
    #[error("map is not a homomorphism: image of ({0}, {1}) breaks multiplicativity")]
    NotHomomorphism(usize, usize),
    #[error("series invalid: {0}")]
    BadSeries(String),
}

/// Contract errors from the permutation-group engine and the lifting steps.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("permutation degree mismatch: expected {expected}, got {got}")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("image array is not a bijection")]
    NotBijective,
    #[error("solvable witness missing: {0}")]
    MissingWitness(String),
    #[error("window is not stable under the task group")]
    UnstableWindow,
    #[error("group is not transitive on the given point set")]
    NotTransitive,
    #[error("permutation is not an automorphism of the group")]
    NotAutomorphism,
    #[error("permutation does not stabilize the subgroup or its cosets")]
    NotSectionRespecting,
    #[error("pair does not satisfy the two-sided lifting condition")]
    NotLiftable,
    #[error("quotient automorphism list required but unavailable: {0}")]
    QuotientAutsUnavailable(String),
    #[error("engine contract violated: {0}")]
    Contract(String),
}
