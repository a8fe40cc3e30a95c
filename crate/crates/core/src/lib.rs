//! Exact-arithmetic computations in the K3 lattice `3H + 2(-E8)`.
//!
//! The crate builds the rank-22 even unimodular lattice of signature
//! (3,19), certifies integer isometries and their membership in `O+`,
//! decides whether any root (a vector of square -2) is orthogonal to a
//! given positive 3-plane, and verifies an affine one-parameter family of
//! marked pairs against every hypothesis needed for its quotient
//! construction — all over exact scalars, with machine-checkable JSON
//! certificates.
//!
//! The scalar tower is generic: the lattice layer works over any
//! [`scalar::Scalar`] ring. Concrete aliases for the three instantiations
//! used throughout are exported at the crate root.

pub mod encode;
pub mod family;
pub mod isometry;
pub mod lattice;
pub mod matrix;
pub mod multiquadratic;
pub mod period;
pub mod polynomial;
pub mod roots;
pub mod scalar;

pub use multiquadratic::{MultiquadraticNumber, Sign};
pub use polynomial::ScalarPolynomial;

/// Arbitrary-precision integer used everywhere.
pub type Int = num_bigint::BigInt;
/// Arbitrary-precision rational used everywhere.
pub type Rational = num_rational::BigRational;

/// Vector with rational coordinates.
pub type RatVector = lattice::ScalarVector<Rational>;
/// Vector with multiquadratic coordinates (a concrete point of `L_R`).
pub type MqVector = lattice::ScalarVector<MultiquadraticNumber>;
/// Vector whose coordinates are polynomials in the family parameter.
pub type PolyVector = lattice::ScalarVector<ScalarPolynomial>;
