use thiserror::Error;

/// Problems with a series specification. Indices are 1-based, matching the
/// row/column numbering users write in spec files.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("row {0} of A is zero")]
    ZeroRow(usize),
    #[error("column {0} of A is zero")]
    ZeroColumn(usize),
    #[error("exponent {name}_{index} must be a positive integer")]
    NonPositiveExponent { name: &'static str, index: usize },
    #[error("dimension mismatch: {what} has length {found}, expected {expected}")]
    DimensionMismatch {
        what: String,
        expected: usize,
        found: usize,
    },
    #[error("A must have at least one row and one column")]
    EmptyMatrix,
    #[error("subset J must be non-empty")]
    EmptySubset,
    #[error("subset index {index} outside 1..={r}")]
    SubsetOutOfRange { index: usize, r: usize },
    #[error("could not parse spec: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("basis vectors are linearly dependent")]
    SingularBasis,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("vector set has rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },
    #[error("no orientation vector certified after {tried} candidates")]
    ExhaustedCandidates { tried: usize },
    #[error("orientation vector pairs to zero with a dual vector")]
    ZeroPairing,
    #[error("integer overflow in exact arithmetic")]
    Overflow,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("series shapes differ: {left} vs {right}")]
    CapMismatch { left: String, right: String },
    #[error("constant term {constant:e} is too small to invert (threshold {threshold:e})")]
    NonUnitSeries { constant: f64, threshold: f64 },
    #[error("multi-index {index:?} exceeds caps {caps:?} (total {total})")]
    CapExceeded {
        index: Vec<usize>,
        caps: Vec<usize>,
        total: usize,
    },
    #[error("geometric factor has zero denominator")]
    SingularConfiguration,
    #[error("variable {var} outside series with {nvars} variables")]
    UnknownVariable { var: usize, nvars: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenFunError {
    #[error("functional vectors span rank {rank}, expected {expected}")]
    RankDeficientLambda { rank: usize, expected: usize },
    #[error(
        "singular configuration: basis {basis:?}, functional {functional}, outer tuple {outer:?}"
    )]
    SingularConfiguration {
        basis: Vec<String>,
        functional: String,
        outer: Vec<i64>,
    },
    #[error("exponent vector has length {found}, expected {expected}")]
    ExponentMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    GenFun(#[from] GenFunError),
    #[error("convergence of the hypothesis sums is not established: {0}")]
    ConvergenceUnknown(String),
    #[error("truncation bound must be at least 1")]
    ZeroBound,
    #[error("residual {residual:e} exceeds tolerance {tol:e} (slack {slack:e}, inconclusive: {inconclusive})")]
    ToleranceExceeded {
        residual: f64,
        tol: f64,
        slack: f64,
        inconclusive: bool,
    },
}
