//! Multiple Dirichlet series
//!
//! ```text
//! zeta(h, k, y, A) = sum_{m in N^r} prod_j e(m_j y_j) / m_j^{h_j} * prod_i 1 / (a_i . m)^{k_i}
//! ```
//!
//! evaluated two independent ways: by direct truncated summation with fitted tail
//! extrapolation, and through the parity identity whose right-hand side is built from
//! lower-depth sums and Taylor coefficients of a lattice generating function.
//!
//! Module map:
//! - [`model`]: problem statement, matrix validation, subset contexts, convergence check.
//! - [`linalg`]: exact rational/integer linear algebra (dual bases, Smith form, cosets,
//!   the orientation vector and multi-dimensional fractional parts).
//! - [`mpseries`] and [`bernoulli`]: truncated multivariate power series over `Complex64`.
//! - [`genfun`]: the functional set attached to a subset, basis enumeration, and the
//!   generating function with its coefficients.
//! - [`evaluator`]: direct sums, the per-subset terms, the identity right-hand side and
//!   the verifier.
//! - [`oracles`]: independent closed forms used by the test suite and `selftest`.

pub mod bernoulli;
pub mod error;
pub mod evaluator;
pub mod extrapolate;
pub mod genfun;
pub mod linalg;
pub mod model;
pub mod mpseries;
pub mod oracles;
pub mod phase;
pub mod summation;

pub use error::{EvalError, GenFunError, LinalgError, SeriesError, SpecError};
pub use evaluator::{
    rhs_total, term_t, verify_parity, zeta_direct, CorollaryCheck, EvalOptions, ParityCase,
    PartialSum, RhsTotal, SubsetTerm, TermValue, Verdict, VerificationReport,
};
pub use genfun::{
    build_lambda, compute_g, enumerate_bases, extract_d, AffineFunctional, GeneratingFunction,
    GfAssembly, RhoChoice, SingularPolicy, Tag,
};
pub use model::{
    convergence_check, subset_context, validate_spec, ConvergenceStatus, ConvergenceVerdict,
    SeriesSpec, SpecFile, SubsetContext,
};

/// Exact rational scalar used by every sign or membership decision.
pub type Rational = num_rational::BigRational;
