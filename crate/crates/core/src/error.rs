use thiserror::Error;

use crate::grading::Degree;

pub type Result<T, E = GdaError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GdaError {
    // lattices
    #[error("vector of length {found} where ambient rank {expected} was expected")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("sublattice generator lies outside the ambient lattice")]
    NotASubgroup,
    #[error("generators are linearly dependent")]
    DependentGenerators,

    // fields
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field parameter {0} is outside the supported range")]
    FieldOutOfRange(u64),
    #[error("zero has no multiplicative order")]
    ZeroElement,
    #[error("parse error at {position}: {message}")]
    Parse { message: String, position: usize },

    // algebras
    #[error("commutation entry ({i},{j}) is not a root of unity")]
    NotRootOfUnity { i: usize, j: usize },
    #[error("invalid commutation matrix at ({i},{j}): {reason}")]
    InvalidCommutation { i: usize, j: usize, reason: String },
    #[error("the radical of the commutation pairing has infinite index")]
    InfiniteIndexRadical,
    #[error("|Gamma_E/Gamma_T| = {0} is not a perfect square")]
    NonSquareIndex(u64),
    #[error("degree {0:?} is not in Gamma_E")]
    DegreeOutsideGammaE(Degree),
    #[error("homogeneous unit with zero coefficient")]
    ZeroCoefficient,

    // matrices
    #[error("elementary entry at ({i},{j}) must have degree {expected:?}")]
    WrongDegree {
        i: usize,
        j: usize,
        expected: Degree,
    },
    #[error("elementary matrix needs i != j")]
    SamePosition,
    #[error("matrix is not homogeneous")]
    NotHomogeneous,
    #[error("matrix is not of degree 0")]
    NotDegreeZero,
    #[error("matrix is singular: row {row} reduces to zero")]
    Singular { row: usize },
    #[error("matrix has wrong size: expected {expected}x{expected}")]
    WrongSize { expected: usize },

    // SK
    #[error("M_n(E_0) = M_2(F_2) is excluded here")]
    ExceptionalF2Config,
    #[error("coset order {m} of the shift must exceed 3n = {}", 3 * .n)]
    OrderTooSmall { m: String, n: usize },
    #[error("T_0^* is infinite; only the structural description is available: {formula}")]
    InfiniteT0Star { formula: String },
    #[error("operation needs a totally ramified algebra or a graded field")]
    UnsupportedAlgebra,
    #[error("shift vector is not of the form (0, d, 2d, ..., (n-1)d)")]
    UnsupportedShift,

    // oracle
    #[error("projected group size {projected} exceeds budget {budget}")]
    SizeBudgetExceeded { projected: String, budget: u64 },
    #[error("brute-force oracles need a finite coefficient field")]
    InfiniteCoefficientField,

    // inputs
    #[error("{message} (line {line}, column {column})")]
    Validation {
        message: String,
        line: usize,
        column: usize,
    },
    #[error("{0}")]
    Input(String),
}

impl GdaError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        use GdaError::*;
        match self {
            DimensionMismatch { .. } => "DimensionMismatch",
            NotASubgroup => "NotASubgroup",
            DependentGenerators => "DependentGenerators",
            NotPrime(_) => "NotPrime",
            FieldOutOfRange(_) => "FieldOutOfRange",
            ZeroElement => "ZeroElement",
            Parse { .. } => "Parse",
            NotRootOfUnity { .. } => "NotRootOfUnity",
            InvalidCommutation { .. } => "InvalidCommutation",
            InfiniteIndexRadical => "InfiniteIndexRadical",
            NonSquareIndex(_) => "NonSquareIndex",
            DegreeOutsideGammaE(_) => "DegreeOutsideGammaE",
            ZeroCoefficient => "ZeroCoefficient",
            WrongDegree { .. } => "WrongDegree",
            SamePosition => "SamePosition",
            NotHomogeneous => "NotHomogeneous",
            NotDegreeZero => "NotDegreeZero",
            Singular { .. } => "Singular",
            WrongSize { .. } => "WrongSize",
            ExceptionalF2Config => "ExceptionalF2Config",
            OrderTooSmall { .. } => "OrderTooSmall",
            InfiniteT0Star { .. } => "InfiniteT0Star",
            UnsupportedAlgebra => "UnsupportedAlgebra",
            UnsupportedShift => "UnsupportedShift",
            SizeBudgetExceeded { .. } => "SizeBudgetExceeded",
            InfiniteCoefficientField => "InfiniteCoefficientField",
            Validation { .. } => "Validation",
            Input(_) => "Input",
        }
    }

    /// Process exit status: 1 for domain errors, 2 for parse and validation.
    pub fn exit_code(&self) -> i32 {
        use GdaError::*;
        match self {
            Parse { .. }
            | Validation { .. }
            | Input(_)
            | DimensionMismatch { .. }
            | DependentGenerators
            | NotPrime(_)
            | FieldOutOfRange(_)
            | NotRootOfUnity { .. }
            | InvalidCommutation { .. }
            | InfiniteIndexRadical
            | NonSquareIndex(_)
            | DegreeOutsideGammaE(_)
            | WrongSize { .. } => 2,
            _ => 1,
        }
    }
}
