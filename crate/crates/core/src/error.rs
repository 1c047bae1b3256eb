use thiserror::Error;

/// Everything that can go wrong while building or checking the finite models.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },

    #[error("twist is not unimodular: |lambda| = {modulus}")]
    NonUnimodular { modulus: f64 },

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("matrix is not an isometry: |V*V - I| = {defect:e}")]
    NotIsometry { defect: f64 },

    #[error("not a state: {0}")]
    NotAState(String),

    #[error("form is not Hermitian: |G - G*| = {asymmetry:e}")]
    NotHermitian { asymmetry: f64 },

    #[error(
        "form is not positive semidefinite: eigenvalue {min_eigenvalue:e} below -{threshold:e}"
    )]
    NotPsd { min_eigenvalue: f64, threshold: f64 },

    #[error("null space is not invariant: leakage {leakage:e} exceeds {threshold:e}")]
    NullSpaceNotInvariant { leakage: f64, threshold: f64 },

    #[error("state is not invariant: form(Ty,Ty) exceeds form(y,y) by {defect:e}")]
    NotInvariantState { defect: f64 },

    #[error("fixed spaces of T and T* differ: defect {defect:e}")]
    FixedSpaceMismatch { defect: f64 },

    #[error("operator is not a contraction: norm {norm}")]
    NotContraction { norm: f64 },

    #[error("not a Markov operator: {0}")]
    NotMarkov(String),

    #[error(
        "not a semigroup representation: multiplicativity defect {defect:e} at ({left}, {right})"
    )]
    NotRepresentation {
        defect: f64,
        left: String,
        right: String,
    },

    #[error("Cayley table is not associative: ({0}*{1})*{2} != {0}*({1}*{2})")]
    NotAssociative(usize, usize, usize),

    #[error("invalid payload: {0}")]
    PayloadInvalid(String),

    #[error("precondition `{check}` failed: {witness}")]
    PreconditionFailed { check: String, witness: String },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn shape(expected: impl ToString, found: impl ToString) -> Error {
    Error::ShapeMismatch {
        expected: expected.to_string(),
        found: found.to_string(),
    }
}
