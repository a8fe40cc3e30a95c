//! Exact arithmetic in multiquadratic extensions of the rationals.
//!
//! A value is a finite sum `Σ q_S · sqrt(Π S)` over square-free sets `S`
//! of distinct primes, with rational coefficients `q_S`. The monomials
//! `sqrt(Π S)` are linearly independent over the rationals, so equality
//! is coefficient-map equality and the representation is canonical once
//! the prime lists are kept sorted.
//!
//! Sign determination never touches floating point: it refines outwardable
//! rational intervals around each radical until the interval for the whole
//! value excludes zero.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::encode;

/// Sorted list of distinct primes; the empty list is the rational monomial.
pub type Radicand = Vec<u64>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RadicalError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("duplicate prime {0} in radicand")]
    DuplicatePrime(u64),
}

/// Deterministic Miller-Rabin, exact for all u64 inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut r = 0u32;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    let mul_mod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let pow_mod = |mut base: u64, mut exp: u64| {
        let mut acc = 1u64;
        base %= n;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = mul_mod(acc, base);
            }
            base = mul_mod(base, base);
            exp >>= 1;
        }
        acc
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..r - 1 {
            x = mul_mod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn validate_radicand(primes: &[u64]) -> Result<Radicand, RadicalError> {
    let mut sorted = primes.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(RadicalError::DuplicatePrime(w[0]));
        }
    }
    for &p in &sorted {
        if !is_prime(p) {
            return Err(RadicalError::NotPrime(p));
        }
    }
    Ok(sorted)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

/// Element of the multiquadratic field; zero terms are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct MultiquadraticNumber {
    terms: BTreeMap<Radicand, BigRational>,
}

impl MultiquadraticNumber {
    pub fn from_rational(q: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(Vec::new(), q);
        }
        Self { terms }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(BigRational::from(BigInt::from(n)))
    }

    /// `q * sqrt(p1 * .. * pk)` for distinct primes `p1..pk`.
    pub fn radical_term(primes: &[u64], coef: BigRational) -> Result<Self, RadicalError> {
        let rad = validate_radicand(primes)?;
        let mut terms = BTreeMap::new();
        if !coef.is_zero() {
            terms.insert(rad, coef);
        }
        Ok(Self { terms })
    }

    /// `sqrt(p)` for a prime `p`.
    pub fn sqrt_prime(p: u64) -> Result<Self, RadicalError> {
        Self::radical_term(&[p], BigRational::one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Radicand, &BigRational)> {
        self.terms.iter()
    }

    pub fn is_zero_value(&self) -> bool {
        self.terms.is_empty()
    }

    /// The rational coefficient of the trivial monomial.
    pub fn rational_part(&self) -> BigRational {
        self.terms.get(&Vec::new()).cloned().unwrap_or_else(BigRational::zero)
    }

    /// `Some(q)` iff the value is rational.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        self.as_rational().is_some()
    }

    /// The value with all rational terms removed.
    pub fn irrational_part(&self) -> Self {
        let mut terms = self.terms.clone();
        terms.remove(&Vec::new());
        Self { terms }
    }

    /// All primes appearing in any radicand, sorted.
    pub fn generators(&self) -> Vec<u64> {
        let mut out: Vec<u64> = Vec::new();
        for rad in self.terms.keys() {
            for &p in rad {
                if let Err(pos) = out.binary_search(&p) {
                    out.insert(pos, p);
                }
            }
        }
        out
    }

    /// Coefficient of a given radicand (empty slice = rational part).
    pub fn coefficient(&self, primes: &[u64]) -> BigRational {
        self.terms.get(primes).cloned().unwrap_or_else(BigRational::zero)
    }

    fn insert_term(&mut self, rad: Radicand, coef: BigRational) {
        if coef.is_zero() {
            return;
        }
        match self.terms.entry(rad) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coef);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coef;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        if q.is_zero() {
            return Self::default();
        }
        Self {
            terms: self
                .terms
                .iter()
                .map(|(rad, c)| (rad.clone(), c * q))
                .collect(),
        }
    }

    /// Multiplicative inverse; `None` for zero. Works by conjugating away
    /// one prime at a time: with `a = b + sqrt(p)·c`, the product
    /// `a·(b − sqrt(p)·c) = b² − p·c²` lives in the subfield without `p`.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero_value() {
            return None;
        }
        if let Some(q) = self.as_rational() {
            return Some(Self::from_rational(q.recip()));
        }
        let p = *self.generators().first().expect("irrational value has a generator");
        let conj = self.conjugate(p);
        let norm = self.clone() * conj.clone();
        debug_assert!(
            !norm.generators().contains(&p),
            "conjugation must remove the prime"
        );
        let norm_inv = norm
            .inv()
            .expect("norm of a nonzero multiquadratic value is nonzero");
        Some(conj * norm_inv)
    }

    /// Negates every term whose radicand contains `p`.
    fn conjugate(&self, p: u64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(rad, c)| {
                    if rad.contains(&p) {
                        (rad.clone(), -c.clone())
                    } else {
                        (rad.clone(), c.clone())
                    }
                })
                .collect(),
        }
    }

    /// Exact sign by outward-rounded interval refinement with doubling
    /// precision. Terminates for every input because a nonzero value is
    /// bounded away from zero.
    pub fn sign(&self) -> Sign {
        if self.terms.is_empty() {
            return Sign::Zero;
        }
        if let Some(q) = self.as_rational() {
            return if q.is_positive() { Sign::Positive } else { Sign::Negative };
        }
        let mut bits: u32 = 32;
        loop {
            let (lo, hi) = self.interval(bits);
            if lo.is_positive() {
                return Sign::Positive;
            }
            if hi.is_negative() {
                return Sign::Negative;
            }
            bits *= 2;
        }
    }

    /// Rational enclosure `[lo, hi]` of the value, each radical bounded to
    /// `2^-bits`.
    fn interval(&self, bits: u32) -> (BigRational, BigRational) {
        let mut lo = BigRational::zero();
        let mut hi = BigRational::zero();
        for (rad, coef) in &self.terms {
            if rad.is_empty() {
                lo += coef;
                hi += coef;
                continue;
            }
            let (rlo, rhi) = sqrt_interval(rad, bits);
            if coef.is_positive() {
                lo += coef * &rlo;
                hi += coef * &rhi;
            } else {
                lo += coef * &rhi;
                hi += coef * &rlo;
            }
        }
        (lo, hi)
    }

    pub fn is_positive_value(&self) -> bool {
        self.sign() == Sign::Positive
    }

    pub fn is_negative_value(&self) -> bool {
        self.sign() == Sign::Negative
    }
}

/// `[r/2^bits, (r+1)/2^bits]` with `r = floor(sqrt(rad · 4^bits))`.
fn sqrt_interval(rad: &[u64], bits: u32) -> (BigRational, BigRational) {
    let mut product = BigUint::one();
    for &p in rad {
        product *= BigUint::from(p);
    }
    let scaled = product << (2 * bits);
    let root = scaled.sqrt();
    let denom = BigInt::from(BigUint::one() << bits);
    let lo = BigRational::new(BigInt::from(root.clone()), denom.clone());
    let hi = BigRational::new(BigInt::from(root + BigUint::one()), denom);
    (lo, hi)
}

impl PartialOrd for MultiquadraticNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MultiquadraticNumber {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.clone() - other.clone()).sign() {
            Sign::Negative => Ordering::Less,
            Sign::Zero => Ordering::Equal,
            Sign::Positive => Ordering::Greater,
        }
    }
}

impl Add for MultiquadraticNumber {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (rad, coef) in rhs.terms {
            self.insert_term(rad, coef);
        }
        self
    }
}

impl<'a> Add<&'a MultiquadraticNumber> for MultiquadraticNumber {
    type Output = Self;
    fn add(mut self, rhs: &'a Self) -> Self {
        for (rad, coef) in &rhs.terms {
            self.insert_term(rad.clone(), coef.clone());
        }
        self
    }
}

impl AddAssign for MultiquadraticNumber {
    fn add_assign(&mut self, rhs: Self) {
        for (rad, coef) in rhs.terms {
            self.insert_term(rad, coef);
        }
    }
}

impl Sub for MultiquadraticNumber {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl SubAssign for MultiquadraticNumber {
    fn sub_assign(&mut self, rhs: Self) {
        *self += -rhs;
    }
}

impl Neg for MultiquadraticNumber {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            terms: self.terms.into_iter().map(|(r, c)| (r, -c)).collect(),
        }
    }
}

impl Mul for MultiquadraticNumber {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl MulAssign for MultiquadraticNumber {
    fn mul_assign(&mut self, rhs: Self) {
        *self = &*self * &rhs;
    }
}

impl<'a, 'b> Mul<&'b MultiquadraticNumber> for &'a MultiquadraticNumber {
    type Output = MultiquadraticNumber;
    fn mul(self, rhs: &'b MultiquadraticNumber) -> MultiquadraticNumber {
        let mut out = MultiquadraticNumber::default();
        for (ra, ca) in &self.terms {
            for (rb, cb) in &rhs.terms {
                // sqrt(ΠS)·sqrt(ΠT) = Π(S∩T) · sqrt(Π(SΔT))
                let mut shared = BigUint::one();
                let mut sym: Radicand = Vec::with_capacity(ra.len() + rb.len());
                let (mut i, mut j) = (0usize, 0usize);
                while i < ra.len() && j < rb.len() {
                    match ra[i].cmp(&rb[j]) {
                        Ordering::Less => {
                            sym.push(ra[i]);
                            i += 1;
                        }
                        Ordering::Greater => {
                            sym.push(rb[j]);
                            j += 1;
                        }
                        Ordering::Equal => {
                            shared *= BigUint::from(ra[i]);
                            i += 1;
                            j += 1;
                        }
                    }
                }
                sym.extend_from_slice(&ra[i..]);
                sym.extend_from_slice(&rb[j..]);
                let coef = ca * cb * BigRational::from(BigInt::from(shared));
                out.insert_term(sym, coef);
            }
        }
        out
    }
}

impl Zero for MultiquadraticNumber {
    fn zero() -> Self {
        Self::default()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for MultiquadraticNumber {
    fn one() -> Self {
        Self::from_rational(BigRational::one())
    }
}

impl fmt::Display for MultiquadraticNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (rad, coef) in &self.terms {
            let cs = encode::rational_to_string(coef);
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if rad.is_empty() {
                write!(f, "{cs}")?;
            } else {
                let prod: u128 = rad.iter().map(|&p| p as u128).product();
                if coef.is_one() {
                    write!(f, "sqrt({prod})")?;
                } else {
                    write!(f, "{cs}*sqrt({prod})")?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    primes: Vec<u64>,
    #[serde(with = "encode::rational_string")]
    coef: BigRational,
}

#[derive(Serialize, Deserialize)]
struct MqJson {
    terms: Vec<TermJson>,
}

impl Serialize for MultiquadraticNumber {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let terms = self
            .terms
            .iter()
            .map(|(rad, coef)| TermJson { primes: rad.clone(), coef: coef.clone() })
            .collect();
        MqJson { terms }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for MultiquadraticNumber {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let raw = MqJson::deserialize(de)?;
        let mut out = MultiquadraticNumber::default();
        for term in raw.terms {
            let rad = validate_radicand(&term.primes).map_err(D::Error::custom)?;
            out.insert_term(rad, term.coef);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn sqrt(p: u64) -> MultiquadraticNumber {
        MultiquadraticNumber::sqrt_prime(p).unwrap()
    }

    fn int(n: i64) -> MultiquadraticNumber {
        MultiquadraticNumber::from_integer(n)
    }

    #[test]
    fn primality() {
        assert!(is_prime(2));
        assert!(is_prime(19));
        assert!(is_prime(7919));
        assert!(!is_prime(1));
        assert!(!is_prime(91));
        assert!(!is_prime(561)); // Carmichael
        assert!(is_prime(2_147_483_647));
    }

    #[test]
    fn addition_cancels() {
        // (sqrt2 + sqrt3) + (-sqrt3) = sqrt2
        let v = (sqrt(2) + sqrt(3)) + (-sqrt(3));
        assert_eq!(v, sqrt(2));
        // 0 + x = x
        let x = sqrt(5).scale(&rat(3, 7)) + int(2);
        assert_eq!(MultiquadraticNumber::zero() + x.clone(), x);
        // (1 + sqrt2) + (1 - sqrt2) = 2
        let v = (int(1) + sqrt(2)) + (int(1) - sqrt(2));
        assert_eq!(v, int(2));
    }

    #[test]
    fn multiplication_table() {
        assert_eq!(sqrt(2) * sqrt(2), int(2));
        let v = sqrt(2) * sqrt(3);
        assert_eq!(v, MultiquadraticNumber::radical_term(&[2, 3], rat(1, 1)).unwrap());
        // (1+sqrt2)(1-sqrt2) = -1
        let v = (int(1) + sqrt(2)) * (int(1) - sqrt(2));
        assert_eq!(v, int(-1));
        // sqrt6 * sqrt10 = 2 sqrt15
        let s6 = MultiquadraticNumber::radical_term(&[2, 3], rat(1, 1)).unwrap();
        let s10 = MultiquadraticNumber::radical_term(&[2, 5], rat(1, 1)).unwrap();
        let s15 = MultiquadraticNumber::radical_term(&[3, 5], rat(2, 1)).unwrap();
        assert_eq!(s6 * s10, s15);
    }

    #[test]
    fn sign_determination() {
        assert_eq!(MultiquadraticNumber::zero().sign(), Sign::Zero);
        // 4 - sqrt6 > 0 since 6 < 16
        let v = int(4) - sqrt(2) * sqrt(3);
        assert_eq!(v.sign(), Sign::Positive);
        // 2 - sqrt2 - sqrt3 < 0
        let v = int(2) - sqrt(2) - sqrt(3);
        assert_eq!(v.sign(), Sign::Negative);
        // tight: sqrt(2)+sqrt(3) vs sqrt(5)+... (3.146 vs 3.142-ish would be nicer,
        // but exercise a near-cancellation anyway)
        let v = sqrt(2) + sqrt(3) - MultiquadraticNumber::radical_term(&[2, 3], rat(1, 1)).unwrap()
            - MultiquadraticNumber::from_rational(rat(697, 1000));
        // sqrt2+sqrt3-sqrt6 = 0.6968...
        assert_eq!(v.sign(), Sign::Negative);
        let w = sqrt(2) + sqrt(3) - MultiquadraticNumber::radical_term(&[2, 3], rat(1, 1)).unwrap()
            - MultiquadraticNumber::from_rational(rat(696, 1000));
        assert_eq!(w.sign(), Sign::Positive);
    }

    #[test]
    fn sign_of_square_is_positive() {
        let v = sqrt(2).scale(&rat(-3, 5)) + sqrt(7) - int(9);
        assert_eq!((v.clone() * v).sign(), Sign::Positive);
    }

    #[test]
    fn inverse_of_nonzero() {
        let v = int(1) + sqrt(2) + sqrt(3).scale(&rat(2, 5));
        let inv = v.inv().unwrap();
        assert_eq!(v * inv, MultiquadraticNumber::one());
        assert!(MultiquadraticNumber::zero().inv().is_none());
        // rational inverse
        assert_eq!(int(4).inv().unwrap(), MultiquadraticNumber::from_rational(rat(1, 4)));
    }

    #[test]
    fn ordering_is_total_and_exact() {
        assert!(sqrt(2) < sqrt(3));
        assert!(sqrt(2) + sqrt(3) > sqrt(5));
        assert_eq!(sqrt(7).cmp(&sqrt(7)), Ordering::Equal);
    }

    #[test]
    fn rejects_bad_radicands() {
        assert_eq!(
            MultiquadraticNumber::radical_term(&[4], rat(1, 1)).unwrap_err(),
            RadicalError::NotPrime(4)
        );
        assert_eq!(
            MultiquadraticNumber::radical_term(&[3, 3], rat(1, 1)).unwrap_err(),
            RadicalError::DuplicatePrime(3)
        );
    }

    #[test]
    fn json_roundtrip_and_shape() {
        let v = sqrt(2).scale(&rat(1, 2)) + int(-3)
            + MultiquadraticNumber::radical_term(&[2, 3], rat(7, 5)).unwrap();
        let js = serde_json::to_string(&v).unwrap();
        assert_eq!(
            js,
            r#"{"terms":[{"primes":[],"coef":"-3"},{"primes":[2],"coef":"1/2"},{"primes":[2,3],"coef":"7/5"}]}"#
        );
        let back: MultiquadraticNumber = serde_json::from_str(&js).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn generators_are_sorted_and_deduplicated() {
        let v = MultiquadraticNumber::radical_term(&[5, 2], rat(1, 1)).unwrap()
            + MultiquadraticNumber::radical_term(&[3, 5], rat(1, 1)).unwrap();
        assert_eq!(v.generators(), vec![2, 3, 5]);
    }
}
