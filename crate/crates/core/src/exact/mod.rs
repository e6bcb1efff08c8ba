//! Exact rational, quadratic and multiquadratic arithmetic.
//!
//! All coefficients are arbitrary-precision rationals. Radicands are signed
//! squarefree integers, with `1` keying the rational part and `-1` allowed
//! so that imaginary quadratic fields live in the same compositum.

mod multiquad;
mod quad;
mod squarefree;

pub use multiquad::{mq_field_degree, radicand_rank, MultiQuadElement};
pub use quad::{quad_pow, QuadElement};
pub use squarefree::{is_squarefree, squarefree_decompose, SquarefreeDecomposition};

use num_bigint::BigInt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("zero has no squarefree decomposition")]
    ZeroInput,
    #[error("{0} is not squarefree")]
    NotSquarefree(BigInt),
    #[error("radicand {0} is not allowed here")]
    BadRadicand(BigInt),
    #[error("element does not satisfy x^2 = t*x - n for the supplied trace and norm")]
    InconsistentMinimalPolynomial,
    #[error("negative power of an element with zero norm")]
    ZeroNorm,
    #[error("radicand {0} appears more than once")]
    DuplicateRadicand(BigInt),
    #[error("coefficient and radicand lists differ in length")]
    LengthMismatch,
    #[error("elements of Q(sqrt {0}) and Q(sqrt {1}) cannot be combined in a single quadratic field")]
    FieldMismatch(BigInt, BigInt),
}
