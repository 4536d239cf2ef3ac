use thiserror::Error;

/// Errors raised by the quiver, motive, series and engine layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension vector has {got} entries but the quiver has {expected} vertices")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("zero dimension vector has no slope")]
    ZeroDimVector,

    #[error("invalid quiver: {0}")]
    InvalidQuiver(String),

    #[error("invalid Ext-quiver pairing data: {0}")]
    InvalidGram(String),

    #[error("q-binomial [{big_n}, {n}] requires n <= N")]
    QBinomRange { big_n: u64, n: u64 },

    #[error("virtual projective space [P^(n-1)] requires n >= 1")]
    ProjVirZero,

    #[error("denominator is zero")]
    ZeroDenominator,

    #[error("pole: denominator vanishes at L = {0}")]
    Pole(String),

    #[error("motive has odd v-parity and L = {0} is not the square of a rational")]
    OddParityEvaluation(String),

    #[error("evaluation point L = 0 is not allowed")]
    ZeroEvaluationPoint,

    #[error("series boxes differ: {0:?} vs {1:?}")]
    BoxMismatch(Vec<u64>, Vec<u64>),

    #[error("plethystic Exp requires zero constant term")]
    NonzeroConstantTerm,

    #[error("plethystic Log requires constant term 1")]
    ConstantTermNotOne,

    #[error("symmetry violation: {0}")]
    SymmetryViolation(String),

    #[error("stability is not mu-generic: {0}")]
    GenericityViolation(String),

    #[error("no nonzero dimension vector of the requested slope lies inside the box")]
    EmptySlopeClass,

    #[error("normalized framed series requires an even framing vector, got {0:?}")]
    OddFraming(Vec<u64>),

    #[error("framing degree f.d = 0 for d = {0:?} in the support of the DT series")]
    ZeroFramingDegree(Vec<u64>),

    #[error("omega at d = {0:?} is not an integral Laurent polynomial")]
    NonIntegral(Vec<u64>),

    #[error("parity violation: {0}")]
    ParityViolation(String),

    #[error("invalid thin decomposition: {0}")]
    BadThinDecomposition(String),

    #[error("enumeration size {size} exceeds the oracle guard {guard}")]
    GuardExceeded { size: u128, guard: u128 },

    #[error("unsupported finite field size q = {0} (supported: 2, 3, 4)")]
    UnsupportedFieldSize(u64),
}

pub type Result<T> = std::result::Result<T, Error>;
