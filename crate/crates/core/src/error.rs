use thiserror::Error;

/// Errors raised by the computational modules.
///
/// Every variant has a stable name (see [`Error::name`]) that the CLI
/// reports verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operands live in different rings: {0} vs {1}")]
    SpecMismatch(String, String),
    #[error("{0} is not a unit in {1}")]
    NotAUnit(String, String),
    #[error("denominator of {0} is not invertible in {1}")]
    DenominatorNotInvertible(String, String),
    #[error("unsupported ring homomorphism from {0} to {1}")]
    UnsupportedHomomorphism(String, String),
    #[error("invalid ring specification: {0}")]
    InvalidRingSpec(String),
    #[error("ring {0} has torsion; normalized integrals are only defined over torsion-free rings")]
    TorsionRing(String),
    #[error("ring {0} is not a field")]
    NotAField(String),
    #[error("rewriting did not terminate within {0} steps")]
    NonTerminating(u64),
    #[error("matrix is not invertible over {0}")]
    MatrixNotInvertible(String),
    #[error("matrix is not unimodular (determinant {0})")]
    MatrixNotUnimodular(String),
    #[error("matrix is not symmetric")]
    MatrixNotSymmetric,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("Jacobian ideal is not zero-dimensional (non-isolated critical points)")]
    NotZeroDimensional,
    #[error("reduction exceeded {0} passes")]
    IterationCapExceeded(usize),
    #[error("exactness witness does not reproduce the given coordinates")]
    WitnessMismatch,
    #[error("family is not generic: {0}")]
    GenericityFailure(String),
    #[error("no linear dependence found up to order {0}")]
    NoDependence(usize),
    #[error("{0}! is not invertible in {1}")]
    FactorialNotInvertible(usize, String),
    #[error("one-form is not closed")]
    NotClosed,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("overconvergent reduction diverged: {0}")]
    ReductionDiverged(String),
    #[error("Milnor number is {0}, expected {1}")]
    MilnorMismatch(usize, usize),
    #[error("{0}")]
    InvalidArgument(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

impl Error {
    /// Stable variant name used in machine-readable output.
    pub fn name(&self) -> &'static str {
        match self {
            Error::SpecMismatch(..) => "SpecMismatch",
            Error::NotAUnit(..) => "NotAUnit",
            Error::DenominatorNotInvertible(..) => "DenominatorNotInvertible",
            Error::UnsupportedHomomorphism(..) => "UnsupportedHomomorphism",
            Error::InvalidRingSpec(..) => "InvalidRingSpec",
            Error::TorsionRing(..) => "TorsionRing",
            Error::NotAField(..) => "NotAField",
            Error::NonTerminating(..) => "NonTerminating",
            Error::MatrixNotInvertible(..) => "MatrixNotInvertible",
            Error::MatrixNotUnimodular(..) => "MatrixNotUnimodular",
            Error::MatrixNotSymmetric => "MatrixNotSymmetric",
            Error::DimensionMismatch(..) => "DimensionMismatch",
            Error::NotZeroDimensional => "NotZeroDimensional",
            Error::IterationCapExceeded(..) => "IterationCapExceeded",
            Error::WitnessMismatch => "WitnessMismatch",
            Error::GenericityFailure(..) => "GenericityFailure",
            Error::NoDependence(..) => "NoDependence",
            Error::FactorialNotInvertible(..) => "FactorialNotInvertible",
            Error::NotClosed => "NotClosed",
            Error::PrecisionExhausted(..) => "PrecisionExhausted",
            Error::ReductionDiverged(..) => "ReductionDiverged",
            Error::MilnorMismatch(..) => "MilnorMismatch",
            Error::InvalidArgument(..) => "InvalidArgument",
            Error::Parse { .. } => "ParseError",
        }
    }

    /// True for errors caused by malformed or unsupported input rather than
    /// by a failed computation.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidRingSpec(..)
                | Error::TorsionRing(..)
                | Error::Parse { .. }
                | Error::InvalidArgument(..)
                | Error::DimensionMismatch(..)
                | Error::MatrixNotSymmetric
                | Error::SpecMismatch(..)
                | Error::UnsupportedHomomorphism(..)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
