//! Polynomials in the family parameter `s` with multiquadratic coefficients.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::multiquadratic::MultiquadraticNumber;

/// Dense coefficient list, lowest degree first, trailing zeros trimmed.
/// The zero polynomial has an empty list.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ScalarPolynomial {
    coeffs: Vec<MultiquadraticNumber>,
}

impl ScalarPolynomial {
    pub fn from_coeffs(coeffs: Vec<MultiquadraticNumber>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    pub fn constant(c: MultiquadraticNumber) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn from_rational(q: BigRational) -> Self {
        Self::constant(MultiquadraticNumber::from_rational(q))
    }

    pub fn from_integer(n: i64) -> Self {
        Self::constant(MultiquadraticNumber::from_integer(n))
    }

    /// The indeterminate `s`.
    pub fn s() -> Self {
        Self::from_coeffs(vec![MultiquadraticNumber::zero(), MultiquadraticNumber::one()])
    }

    fn trim(&mut self) {
        while self.coeffs.last().map_or(false, |c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coefficient(&self, degree: usize) -> MultiquadraticNumber {
        self.coeffs.get(degree).cloned().unwrap_or_else(MultiquadraticNumber::zero)
    }

    pub fn coefficients(&self) -> &[MultiquadraticNumber] {
        &self.coeffs
    }

    pub fn as_constant(&self) -> Option<MultiquadraticNumber> {
        match self.coeffs.len() {
            0 => Some(MultiquadraticNumber::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    /// Exact Horner evaluation at a rational parameter value.
    pub fn evaluate(&self, s: &BigRational) -> MultiquadraticNumber {
        let mut acc = MultiquadraticNumber::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.scale(s) + c;
        }
        acc
    }

    /// Substitution `s -> s + shift`, exact.
    pub fn compose_shift(&self, shift: &BigRational) -> Self {
        // Horner form again: p(s + σ) built from the top coefficient down.
        let shift_poly = Self::from_coeffs(vec![
            MultiquadraticNumber::from_rational(shift.clone()),
            MultiquadraticNumber::one(),
        ]);
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * shift_poly.clone() + Self::constant(c.clone());
        }
        acc
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|c| c.scale(q)).collect())
    }

    pub fn scale_mq(&self, m: &MultiquadraticNumber) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|c| c * m).collect())
    }
}

impl Add for ScalarPolynomial {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        if rhs.coeffs.len() > self.coeffs.len() {
            self.coeffs
                .resize(rhs.coeffs.len(), MultiquadraticNumber::zero());
        }
        for (i, c) in rhs.coeffs.into_iter().enumerate() {
            self.coeffs[i] += c;
        }
        self.trim();
        self
    }
}

impl AddAssign for ScalarPolynomial {
    fn add_assign(&mut self, rhs: Self) {
        *self = std::mem::take(self) + rhs;
    }
}

impl Sub for ScalarPolynomial {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl SubAssign for ScalarPolynomial {
    fn sub_assign(&mut self, rhs: Self) {
        *self = std::mem::take(self) - rhs;
    }
}

impl Neg for ScalarPolynomial {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for ScalarPolynomial {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Self::zero();
        }
        let mut out = vec![MultiquadraticNumber::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::from_coeffs(out)
    }
}

impl MulAssign for ScalarPolynomial {
    fn mul_assign(&mut self, rhs: Self) {
        *self = std::mem::take(self) * rhs;
    }
}

impl Zero for ScalarPolynomial {
    fn zero() -> Self {
        Self::default()
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl One for ScalarPolynomial {
    fn one() -> Self {
        Self::constant(MultiquadraticNumber::one())
    }
}

impl fmt::Display for ScalarPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*s")?,
                _ => write!(f, "({c})*s^{k}")?,
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    poly: Vec<MultiquadraticNumber>,
}

impl Serialize for ScalarPolynomial {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        PolyJson { poly: self.coeffs.clone() }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for ScalarPolynomial {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let raw = PolyJson::deserialize(de)?;
        Ok(Self::from_coeffs(raw.poly))
    }
}

impl From<BigInt> for ScalarPolynomial {
    fn from(n: BigInt) -> Self {
        Self::from_rational(BigRational::from(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn sqrt2() -> MultiquadraticNumber {
        MultiquadraticNumber::sqrt_prime(2).unwrap()
    }

    #[test]
    fn evaluation_examples() {
        // s^2 + 1 at 0 -> 1
        let p = ScalarPolynomial::s() * ScalarPolynomial::s() + ScalarPolynomial::from_integer(1);
        assert_eq!(p.evaluate(&rat(0, 1)), MultiquadraticNumber::from_integer(1));
        // s*sqrt2 at 1/2 -> sqrt2/2
        let p = ScalarPolynomial::s().scale_mq(&sqrt2());
        assert_eq!(p.evaluate(&rat(1, 2)), sqrt2().scale(&rat(1, 2)));
        // 2s - 1 at 1/2 -> 0
        let p = ScalarPolynomial::s().scale(&rat(2, 1)) - ScalarPolynomial::from_integer(1);
        assert!(p.evaluate(&rat(1, 2)).is_zero());
    }

    #[test]
    fn leading_coefficient_invariant() {
        let p = ScalarPolynomial::from_coeffs(vec![
            MultiquadraticNumber::one(),
            MultiquadraticNumber::zero(),
        ]);
        assert_eq!(p.degree(), Some(0));
        assert!(ScalarPolynomial::zero().degree().is_none());
    }

    #[test]
    fn shift_composition() {
        // p(s) = s^2 - 3s; p(s+2) = s^2 + s - 2
        let s = ScalarPolynomial::s();
        let p = s.clone() * s.clone() - s.clone().scale(&rat(3, 1));
        let q = p.compose_shift(&rat(2, 1));
        let expect = s.clone() * s.clone() + s.clone() - ScalarPolynomial::from_integer(2);
        assert_eq!(q, expect);
        // shifting by zero is identity
        assert_eq!(p.compose_shift(&rat(0, 1)), p);
    }

    #[test]
    fn evaluation_is_ring_homomorphism() {
        let s = ScalarPolynomial::s();
        let p = s.clone().scale_mq(&sqrt2()) + ScalarPolynomial::from_integer(3);
        let q = s.clone() * s.clone() - ScalarPolynomial::constant(sqrt2());
        let at = rat(7, 3);
        let lhs = (p.clone() * q.clone()).evaluate(&at);
        let rhs = p.evaluate(&at) * q.evaluate(&at);
        assert_eq!(lhs, rhs);
        let lhs = (p.clone() + q.clone()).evaluate(&at);
        let rhs = p.evaluate(&at) + q.evaluate(&at);
        assert_eq!(lhs, rhs);
    }
}
