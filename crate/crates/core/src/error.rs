use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("leading coefficient is zero")]
    ZeroLeadingCoefficient,
    #[error("series is not antisymmetric: coefficient ({0},{1}) does not match its mirror")]
    NotAntisymmetric(i64, i64),
    #[error("series is not divisible by q^{k} - p^{l} on its box")]
    NotDivisible { k: i64, l: i64 },
    #[error("invalid weight {0}")]
    InvalidWeight(i64),
    #[error("no weakly holomorphic form with this principal part ({0})")]
    Unsolvable(String),
    #[error("modular polynomial file missing: {0}")]
    FileMissing(String),
    #[error("malformed modular polynomial data: {0}")]
    MalformedCoefficients(String),
    #[error("modular polynomial is not symmetric at X^{0} Y^{1}")]
    SymmetryViolation(i64, i64),
    #[error("modular polynomial has X-degree {found}, expected {expected}")]
    DegreeBound { found: i64, expected: i64 },
    #[error("input form has weight {found}, expected {expected}")]
    WeightMismatch { found: i64, expected: i64 },
    #[error("m = {0} is odd; level one scalar forms of odd weight vanish")]
    OddM(i64),
    #[error("m = {0} is negative")]
    NegativeM(i64),
    #[error("b = {0} is odd; only even b is supported by the general lift")]
    OddB(usize),
    #[error("Gram matrix has signature {0}")]
    BadSignature(String),
    #[error("coefficient oracle failed: {0}")]
    OracleFailure(String),
    #[error("vector norm must be negative, got {0}")]
    NonNegativeNorm(String),
    #[error("singular term (d={d}, k={k}, l={l}) has no matching modular polynomial")]
    UnmatchedSingularTerm { d: i64, k: i64, l: i64 },
    #[error("cleared series still has a pole at ({0},{1})")]
    NegativeValuationResidue(i64, i64),
    #[error("reconstruction differs at ({0},{1})")]
    ReconstructionMismatch(i64, i64),
    #[error("certification failed: {0}")]
    CertificationMismatch(String),
    #[error("raising table row 0 disagrees with its closed form at c = {0}")]
    ClosedFormMismatch(i64),
    #[error("box too small: {0}")]
    BoxTooSmall(String),
    #[error("unsupported atom: {0}")]
    UnsupportedAtom(String),
    #[error("cannot substitute into {0}")]
    UnsupportedAtomForSubstitution(String),
    #[error("invalid group element: {0}")]
    InvalidGroupElement(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}
