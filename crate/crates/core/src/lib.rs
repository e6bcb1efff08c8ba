//! Unit root L-functions of the ordinary family of elliptic curves over the
//! ordinary locus of `X_1(Np)`, computed from the class-number trace formula
//! for the characteristic series of `U_p`.
//!
//! The pipeline is:
//!
//! * [`trace`] enumerates the imaginary quadratic units `gamma` of norm `p^m`
//!   together with the orders containing them, and sums
//!   `h(O) B_N(O, gamma) gamma^k / (gamma^2 - p^m)` into `A_m(k)`;
//! * [`series`] turns the `A_m(k)` into `D(k, T) = exp(sum A_m(k) T^m / m)`
//!   and reads off Newton polygons;
//! * [`analysis`] checks `L = D(k+2, T) / D(k, pT)` against the exponential
//!   of `C_m(k) = sum h B gamma^k`, the congruences between weights, the field
//!   generated by the exact `C_m(k)`, and produces pole certificates.

pub mod analysis;
pub(crate) mod arith;
pub mod exact;
pub mod orders;
pub mod padic;
pub mod series;
pub mod trace;

pub use exact::{MultiQuadElement, QuadElement};
pub use orders::{ClassNumberCache, OrderSpec};
pub use padic::{PadicEmbedding, PadicScalar};
pub use series::{NewtonPolygon, PadicSeries};
pub use trace::{FamilyParams, LSeriesResult, Route, TraceEngine, TraceTerm};
