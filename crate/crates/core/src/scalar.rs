//! The scalar-ring abstraction the lattice layer is generic over.
//!
//! Pairings, isometry application and family algebra are written once
//! against this trait and instantiated at the exact scalar tower
//! rationals -> multiquadratic numbers -> polynomials in the family
//! parameter. Floating-point types are deliberately not instances: every
//! decision path in this crate is exact.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::multiquadratic::MultiquadraticNumber;
use crate::polynomial::ScalarPolynomial;

pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Zero
    + One
    + std::ops::Neg<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::AddAssign
{
    fn from_integer(n: &BigInt) -> Self;
    fn from_rational(q: &BigRational) -> Self;
}

impl Scalar for BigRational {
    fn from_integer(n: &BigInt) -> Self {
        BigRational::from(n.clone())
    }
    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }
}

impl Scalar for MultiquadraticNumber {
    fn from_integer(n: &BigInt) -> Self {
        MultiquadraticNumber::from_rational(BigRational::from(n.clone()))
    }
    fn from_rational(q: &BigRational) -> Self {
        MultiquadraticNumber::from_rational(q.clone())
    }
}

impl Scalar for ScalarPolynomial {
    fn from_integer(n: &BigInt) -> Self {
        ScalarPolynomial::from_rational(BigRational::from(n.clone()))
    }
    fn from_rational(q: &BigRational) -> Self {
        ScalarPolynomial::from_rational(q.clone())
    }
}
