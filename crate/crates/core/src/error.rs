use crate::numerics::C64;

/// Errors raised by the solvers and their input validation.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matrix is singular to working precision")]
    SingularMatrix,
    #[error("eigensolver failed to converge: {0}")]
    ConvergenceFailure(&'static str),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),
    #[error("symmetry violation: relative defect {0:.3e}")]
    SymmetryViolation(f64),
    #[error("factorization failure: {0}")]
    FactorizationFailure(String),
    #[error("bad indices: {0}")]
    BadIndices(String),

    #[error("lambda must be nonzero")]
    ZeroLambda,
    #[error("A0 symmetry violation: relative defect {0:.3e}")]
    A0SymmetryViolation(f64),
    #[error("leading coefficient A1 is singular (sigma_min/sigma_max = {0:.3e})")]
    SingularA1(f64),
    #[error("T is singular")]
    SingularT,
    #[error("W = [X; -X T^-1] is singular")]
    SingularW,
    #[error("pair residual {0:.3e} exceeds tolerance")]
    ResidualTooLarge(f64),
    #[error("X T^-1 S X* is singular")]
    SingularLeadingBlock,
    #[error("parameter matrix is not in the admissible space: {0}")]
    NotAdmissible(String),

    #[error("no nonsingular element found after {0} attempts")]
    NoNonsingularFound(usize),
    #[error("inconsistent linear constraints: residual {0:.3e}")]
    Inconsistent(f64),
    #[error("invalid PJCF: {0}")]
    InvalidPjcf(String),

    #[error("pairing failure at eigenvalue {0}")]
    PairingFailure(C64),
    #[error("target not found: {0}")]
    TargetNotFound(C64),
    #[error("ambiguous target: {0} matches several eigenvalues")]
    AmbiguousTarget(C64),
    #[error("pairing not closed: partner of {0} is not selected")]
    PairingNotClosed(C64),
    #[error("spectra overlap at {0}")]
    SpectraOverlap(C64),
    #[error("defective or clustered eigenvalue at {0}")]
    Defective(C64),
    #[error("matrix must be diagonal: {0}")]
    NotDiagonal(&'static str),

    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("rank condition violated: {0}")]
    RankDeficient(String),
    #[error("random draws kept producing rank-deficient factors")]
    RetryExhausted,
    #[error("nonsingularity check failed after {0} attempts")]
    NonsingularityRetryExhausted(usize),
    #[error("remaining eigenvalue conflict: {0}")]
    RemainingEigenvalueConflict(String),

    #[error("S1 precursor matrix is singular")]
    SingularS1Precursor,
    #[error("Xi singular after {0} attempts")]
    XiSingularRetryExhausted(usize),

    #[error("structure violation: {0}")]
    StructureViolation(String),
    #[error("singular input")]
    SingularInput,
    #[error("not jointly block diagonalizable: {0}")]
    NotJbDiagonalizable(String),
    #[error("geometric multiplicity violation: {0}")]
    GeomMultViolation(String),

    #[error("parse: {0}")]
    Parse(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-readable tag, used by the CLI's JSON diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::SingularMatrix => "singular matrix",
            Error::ConvergenceFailure(_) => "convergence failure",
            Error::DimensionMismatch(_) => "dimension mismatch",
            Error::NonFinite => "non-finite",
            Error::NotHermitian(_) => "not hermitian",
            Error::SymmetryViolation(_) => "symmetry violation",
            Error::FactorizationFailure(_) => "factorization failure",
            Error::BadIndices(_) => "bad indices",
            Error::ZeroLambda => "zero lambda",
            Error::A0SymmetryViolation(_) => "A0 symmetry violation",
            Error::SingularA1(_) => "singular A1",
            Error::SingularT => "singular T",
            Error::SingularW => "singular W",
            Error::ResidualTooLarge(_) => "residual too large",
            Error::SingularLeadingBlock => "singular leading block",
            Error::NotAdmissible(_) => "not admissible",
            Error::NoNonsingularFound(_) => "no nonsingular found",
            Error::Inconsistent(_) => "inconsistent",
            Error::InvalidPjcf(_) => "invalid pjcf",
            Error::PairingFailure(_) => "pairing failure",
            Error::TargetNotFound(_) => "target not found",
            Error::AmbiguousTarget(_) => "ambiguous target",
            Error::PairingNotClosed(_) => "pairing not closed",
            Error::SpectraOverlap(_) => "spectra overlap",
            Error::Defective(_) => "defective",
            Error::NotDiagonal(_) => "not diagonal",
            Error::NoSolution(_) => "no solution",
            Error::Infeasible(_) => "infeasible",
            Error::RankDeficient(_) => "rank deficient",
            Error::RetryExhausted => "retry exhausted",
            Error::NonsingularityRetryExhausted(_) => "nonsingularity retry exhausted",
            Error::RemainingEigenvalueConflict(_) => "remaining eigenvalue conflict",
            Error::SingularS1Precursor => "singular S1 precursor",
            Error::XiSingularRetryExhausted(_) => "xi singular retry exhausted",
            Error::StructureViolation(_) => "structure violation",
            Error::SingularInput => "singular input",
            Error::NotJbDiagonalizable(_) => "not jbd",
            Error::GeomMultViolation(_) => "geometric multiplicity",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }

    /// Domain failures exit with 2, internal ones with 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) | Error::ConvergenceFailure(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
