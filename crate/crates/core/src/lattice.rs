//! Integer lattices with symmetric bilinear forms.
//!
//! Builds the hyperbolic plane `H`, the negative `E8` form, and the K3
//! lattice `3H + 2(-E8)` with the fixed basis order
//! `(u, v | x, y | z, t | e8a1..e8a8 | e8b1..e8b8)`. Pairings are computed
//! exactly for integer vectors and for vectors over any exact scalar ring.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::encode;
use crate::matrix::{self, IntMatrix};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum LatticeError {
    #[error("gram matrix is not symmetric at ({0},{1})")]
    NotSymmetric(usize, usize),
    #[error("vector length {got} does not match lattice rank {rank}")]
    DimensionMismatch { got: usize, rank: usize },
    #[error("bilinear form is degenerate")]
    Degenerate,
}

/// An integer lattice presented by a symmetric Gram matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GramLattice {
    pub rank: usize,
    #[serde(with = "gram_serde")]
    pub gram: IntMatrix,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub basis_labels: Option<Vec<String>>,
}

mod gram_serde {
    use super::*;
    use serde::de::Error as _;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &IntMatrix, ser: S) -> Result<S::Ok, S::Error> {
        // small entries as plain JSON integers, oversized ones as strings
        let rows: Vec<Vec<serde_json::Value>> = m
            .iter()
            .map(|row| {
                row.iter()
                    .map(|x| match i64::try_from(x.clone()) {
                        Ok(v) => serde_json::Value::from(v),
                        Err(_) => serde_json::Value::from(x.to_string()),
                    })
                    .collect()
            })
            .collect();
        serde::Serialize::serialize(&rows, ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<IntMatrix, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Entry {
            Num(i64),
            Str(String),
        }
        let rows: Vec<Vec<Entry>> = serde::Deserialize::deserialize(de)?;
        rows.into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|e| match e {
                        Entry::Num(v) => Ok(BigInt::from(v)),
                        Entry::Str(s) => encode::parse_int(&s).map_err(D::Error::custom),
                    })
                    .collect()
            })
            .collect()
    }
}

impl GramLattice {
    pub fn new(gram: IntMatrix, basis_labels: Option<Vec<String>>) -> Result<Self, LatticeError> {
        let rank = gram.len();
        for (i, row) in gram.iter().enumerate() {
            if row.len() != rank {
                return Err(LatticeError::DimensionMismatch { got: row.len(), rank });
            }
            for j in 0..rank {
                if gram[i][j] != gram[j][i] {
                    return Err(LatticeError::NotSymmetric(i, j));
                }
            }
        }
        if let Some(labels) = &basis_labels {
            assert_eq!(labels.len(), rank, "one label per basis vector");
        }
        Ok(Self { rank, gram, basis_labels })
    }

    pub fn label(&self, i: usize) -> String {
        self.basis_labels
            .as_ref()
            .map(|l| l[i].clone())
            .unwrap_or_else(|| format!("b{i}"))
    }

    pub fn determinant(&self) -> BigInt {
        matrix::bareiss_determinant(&self.gram)
    }

    pub fn is_unimodular(&self) -> bool {
        self.determinant().abs().is_one()
    }

    /// Even iff every diagonal entry is even: the off-diagonal part of
    /// `x^T G x` always contributes `2 Σ_{i<j} g_ij x_i x_j`.
    pub fn is_even(&self) -> bool {
        self.gram
            .iter()
            .enumerate()
            .all(|(i, row)| (&row[i] % BigInt::from(2)).is_zero())
    }

    /// Signature `(positive, negative)` via exact congruence
    /// diagonalization; degenerate forms are rejected.
    pub fn signature(&self) -> Result<(usize, usize), LatticeError> {
        let inertia = matrix::congruence_inertia(&matrix::int_to_rat(&self.gram));
        if inertia.zero > 0 {
            return Err(LatticeError::Degenerate);
        }
        Ok((inertia.positive, inertia.negative))
    }

    /// Exact pairing of two integer vectors.
    pub fn inner_int(&self, x: &IntVector, y: &IntVector) -> Result<BigInt, LatticeError> {
        self.check_len(x.coords.len())?;
        self.check_len(y.coords.len())?;
        let mut acc = BigInt::zero();
        for (i, xi) in x.coords.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.coords.iter().enumerate() {
                if yj.is_zero() || self.gram[i][j].is_zero() {
                    continue;
                }
                acc += xi * &self.gram[i][j] * yj;
            }
        }
        Ok(acc)
    }

    /// Exact pairing over any exact scalar ring: `x^T G y`.
    pub fn inner<T: Scalar>(&self, x: &ScalarVector<T>, y: &ScalarVector<T>) -> Result<T, LatticeError> {
        self.check_len(x.coords.len())?;
        self.check_len(y.coords.len())?;
        let mut acc = T::zero();
        for (i, xi) in x.coords.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.coords.iter().enumerate() {
                if yj.is_zero() || self.gram[i][j].is_zero() {
                    continue;
                }
                acc += xi.clone() * T::from_integer(&self.gram[i][j]) * yj.clone();
            }
        }
        Ok(acc)
    }

    /// `G x` as a scalar vector; the i-th entry is the linear form
    /// `δ -> <δ, x>` evaluated on the i-th basis vector.
    pub fn gram_times<T: Scalar>(&self, x: &ScalarVector<T>) -> Result<ScalarVector<T>, LatticeError> {
        self.check_len(x.coords.len())?;
        let coords = (0..self.rank)
            .map(|i| {
                let mut acc = T::zero();
                for (j, xj) in x.coords.iter().enumerate() {
                    if xj.is_zero() || self.gram[i][j].is_zero() {
                        continue;
                    }
                    acc += T::from_integer(&self.gram[i][j]) * xj.clone();
                }
                acc
            })
            .collect();
        Ok(ScalarVector { coords })
    }

    fn check_len(&self, got: usize) -> Result<(), LatticeError> {
        if got != self.rank {
            Err(LatticeError::DimensionMismatch { got, rank: self.rank })
        } else {
            Ok(())
        }
    }
}

/// The hyperbolic plane: Gram [[0,1],[1,0]] in the basis {u, v}.
pub fn hyperbolic_h() -> GramLattice {
    let gram = vec![
        vec![BigInt::zero(), BigInt::one()],
        vec![BigInt::one(), BigInt::zero()],
    ];
    GramLattice::new(gram, Some(vec!["u".into(), "v".into()])).expect("H is symmetric")
}

/// Bourbaki numbering: chain 1-3-4-5-6-7-8 with node 2 attached to node 4.
const E8_EDGES: [(usize, usize); 7] = [(0, 2), (1, 3), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7)];

/// The negative-definite E8 form: diagonal -2, and -1 at Dynkin-adjacent
/// pairs (the E8 intersection form has +2/+1 there; this is its negation).
pub fn minus_e8() -> GramLattice {
    let mut gram = vec![vec![BigInt::zero(); 8]; 8];
    for i in 0..8 {
        gram[i][i] = BigInt::from(-2);
    }
    for &(i, j) in &E8_EDGES {
        gram[i][j] = BigInt::from(-1);
        gram[j][i] = BigInt::from(-1);
    }
    let labels = (1..=8).map(|i| format!("e8_{i}")).collect();
    GramLattice::new(gram, Some(labels)).expect("-E8 is symmetric")
}

/// Block-diagonal direct sum; labels are concatenated.
pub fn direct_sum(parts: &[&GramLattice]) -> GramLattice {
    let rank: usize = parts.iter().map(|p| p.rank).sum();
    let mut gram = vec![vec![BigInt::zero(); rank]; rank];
    let mut labels = Vec::with_capacity(rank);
    let mut off = 0usize;
    for part in parts {
        for i in 0..part.rank {
            for j in 0..part.rank {
                gram[off + i][off + j] = part.gram[i][j].clone();
            }
            labels.push(part.label(i));
        }
        off += part.rank;
    }
    GramLattice::new(gram, Some(labels)).expect("direct sum of symmetric forms")
}

/// Index of the first coordinate of each block of the K3 lattice.
pub const FIRST_E8_OFFSET: usize = 6;
pub const SECOND_E8_OFFSET: usize = 14;
pub const K3_RANK: usize = 22;

/// Basis coordinates of the six hyperbolic generators.
pub const U: usize = 0;
pub const V: usize = 1;
pub const X: usize = 2;
pub const Y: usize = 3;
pub const Z: usize = 4;
pub const T: usize = 5;

/// The K3 lattice `3H + 2(-E8)`, rank 22, even, unimodular, signature (3,19),
/// in the basis order `(u, v | x, y | z, t | e8a1..8 | e8b1..8)`.
pub fn k3_lattice() -> GramLattice {
    let h = hyperbolic_h();
    let e8 = minus_e8();
    let mut lat = direct_sum(&[&h, &h, &h, &e8, &e8]);
    let labels: Vec<String> = ["u", "v", "x", "y", "z", "t"]
        .iter()
        .map(|s| s.to_string())
        .chain((1..=8).map(|i| format!("e8a{i}")))
        .chain((1..=8).map(|i| format!("e8b{i}")))
        .collect();
    lat.basis_labels = Some(labels);
    lat
}

/// Integer lattice vector.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntVector {
    pub coords: Vec<BigInt>,
}

impl IntVector {
    pub fn zero(rank: usize) -> Self {
        Self { coords: vec![BigInt::zero(); rank] }
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        Self { coords: coords.iter().map(|&v| BigInt::from(v)).collect() }
    }

    pub fn basis(i: usize, rank: usize) -> Self {
        let mut v = Self::zero(rank);
        v.coords[i] = BigInt::one();
        v
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn neg(&self) -> Self {
        Self { coords: self.coords.iter().map(|c| -c).collect() }
    }

    /// Sum of squared coordinates: the tie-break key for canonical
    /// witness selection.
    pub fn coord_norm(&self) -> BigInt {
        self.coords.iter().map(|c| c * c).sum()
    }

    pub fn to_scalar<T: Scalar>(&self) -> ScalarVector<T> {
        ScalarVector {
            coords: self.coords.iter().map(|c| T::from_integer(c)).collect(),
        }
    }
}

impl Serialize for IntVector {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let strs: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        strs.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for IntVector {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Entry {
            Num(i64),
            Str(String),
        }
        let raw: Vec<Entry> = Vec::deserialize(de)?;
        let coords = raw
            .into_iter()
            .map(|e| match e {
                Entry::Num(v) => Ok(BigInt::from(v)),
                Entry::Str(s) => encode::parse_int(&s).map_err(D::Error::custom),
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { coords })
    }
}

impl fmt::Display for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// Vector with coordinates in an exact scalar ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalarVector<T> {
    pub coords: Vec<T>,
}

impl<T: Scalar> ScalarVector<T> {
    pub fn zero(rank: usize) -> Self {
        Self { coords: (0..rank).map(|_| T::zero()).collect() }
    }

    pub fn from_coords(coords: Vec<T>) -> Self {
        Self { coords }
    }

    /// Linear combination of basis vectors: `Σ coef_i · b_{idx_i}`.
    pub fn combination(rank: usize, terms: &[(T, usize)]) -> Self {
        let mut v = Self::zero(rank);
        for (coef, idx) in terms {
            v.coords[*idx] += coef.clone();
        }
        v
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.coords.len(), other.coords.len());
        let mut out = self.clone();
        for (a, b) in out.coords.iter_mut().zip(&other.coords) {
            *a += b.clone();
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.coords.len(), other.coords.len());
        Self {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Self { coords: self.coords.iter().map(|c| -c.clone()).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// Places an 8-coordinate vector into one of the two `-E8` blocks of
    /// a rank-22 vector.
    pub fn embed_e8_block(block: E8Block, small: &[T]) -> Self {
        assert_eq!(small.len(), 8);
        let mut v = Self::zero(K3_RANK);
        let off = match block {
            E8Block::First => FIRST_E8_OFFSET,
            E8Block::Second => SECOND_E8_OFFSET,
        };
        for (i, c) in small.iter().enumerate() {
            v.coords[off + i] = c.clone();
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum E8Block {
    First,
    Second,
}

impl crate::lattice::ScalarVector<crate::polynomial::ScalarPolynomial> {
    /// Evaluates every polynomial coordinate at a rational parameter.
    pub fn evaluate(&self, s: &BigRational) -> ScalarVector<crate::multiquadratic::MultiquadraticNumber> {
        ScalarVector {
            coords: self.coords.iter().map(|p| p.evaluate(s)).collect(),
        }
    }

    /// Substitutes `s -> s + shift` in every coordinate.
    pub fn compose_shift(&self, shift: &BigRational) -> Self {
        Self {
            coords: self.coords.iter().map(|p| p.compose_shift(shift)).collect(),
        }
    }
}

impl crate::lattice::ScalarVector<crate::multiquadratic::MultiquadraticNumber> {
    /// Lifts a constant vector to polynomial coordinates.
    pub fn to_poly(&self) -> ScalarVector<crate::polynomial::ScalarPolynomial> {
        ScalarVector {
            coords: self
                .coords
                .iter()
                .map(|c| crate::polynomial::ScalarPolynomial::constant(c.clone()))
                .collect(),
        }
    }
}

impl<T: fmt::Display> fmt::Display for ScalarVector<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiquadratic::MultiquadraticNumber;
    use crate::polynomial::ScalarPolynomial;

    #[test]
    fn hyperbolic_pairings() {
        let h = hyperbolic_h();
        let u = IntVector::from_i64(&[1, 0]);
        let v = IntVector::from_i64(&[0, 1]);
        assert_eq!(h.inner_int(&u, &v).unwrap(), BigInt::one());
        assert_eq!(h.inner_int(&u, &u).unwrap(), BigInt::zero());
        let upv = IntVector::from_i64(&[1, 1]);
        assert_eq!(h.inner_int(&upv, &upv).unwrap(), BigInt::from(2));
    }

    #[test]
    fn minus_e8_shape() {
        let e8 = minus_e8();
        assert_eq!(e8.determinant(), BigInt::one());
        for i in 0..8 {
            assert_eq!(e8.gram[i][i], BigInt::from(-2));
            let b = IntVector::basis(i, 8);
            assert_eq!(e8.inner_int(&b, &b).unwrap(), BigInt::from(-2));
        }
        assert_eq!(e8.signature().unwrap(), (0, 8));
    }

    #[test]
    fn k3_regressions() {
        let l = k3_lattice();
        assert_eq!(l.rank, 22);
        assert!(l.is_even());
        assert!(l.is_unimodular());
        assert_eq!(l.determinant(), BigInt::from(-1));
        assert_eq!(l.signature().unwrap(), (3, 19));
    }

    #[test]
    fn signatures_by_exact_diagonalization() {
        assert_eq!(hyperbolic_h().signature().unwrap(), (1, 1));
        assert_eq!(minus_e8().signature().unwrap(), (0, 8));
    }

    #[test]
    fn block_orthogonality() {
        let l = k3_lattice();
        let u = IntVector::basis(U, 22);
        let e8a1 = IntVector::basis(FIRST_E8_OFFSET, 22);
        let e8b1 = IntVector::basis(SECOND_E8_OFFSET, 22);
        assert!(l.inner_int(&u, &e8a1).unwrap().is_zero());
        assert!(l.inner_int(&e8a1, &e8b1).unwrap().is_zero());
    }

    #[test]
    fn symbolic_family_pairings() {
        // <2u + v + s·y, 2u + v + s·y> = 4
        let l = k3_lattice();
        let s = ScalarPolynomial::s();
        let kappa = ScalarVector::combination(
            22,
            &[
                (ScalarPolynomial::from_integer(2), U),
                (ScalarPolynomial::from_integer(1), V),
                (s.clone(), Y),
            ],
        );
        let n = l.inner(&kappa, &kappa).unwrap();
        assert_eq!(n, ScalarPolynomial::from_integer(4));
        // <2u+v+sy, x - s·u + 2y> = 0 identically
        let w1 = ScalarVector::combination(
            22,
            &[
                (ScalarPolynomial::from_integer(1), X),
                (-s.clone(), U),
                (ScalarPolynomial::from_integer(2), Y),
            ],
        );
        assert!(l.inner(&kappa, &w1).unwrap().is_zero());
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let l = k3_lattice();
        let short = IntVector::from_i64(&[1, 2, 3]);
        assert!(matches!(
            l.inner_int(&short, &short),
            Err(LatticeError::DimensionMismatch { got: 3, rank: 22 })
        ));
    }

    #[test]
    fn poly_vector_evaluation() {
        let s = ScalarPolynomial::s();
        let v = ScalarVector::combination(4, &[(s.clone(), 1), (ScalarPolynomial::from_integer(3), 2)]);
        let at = BigRational::new(BigInt::from(1), BigInt::from(2));
        let ev = v.evaluate(&at);
        assert_eq!(
            ev.coords[1],
            MultiquadraticNumber::from_rational(at.clone())
        );
        assert_eq!(ev.coords[2], MultiquadraticNumber::from_integer(3));
    }

    #[test]
    fn lattice_json_roundtrip() {
        let h = hyperbolic_h();
        let js = serde_json::to_string(&h).unwrap();
        let back: GramLattice = serde_json::from_str(&js).unwrap();
        assert_eq!(back, h);
        assert!(js.contains("\"rank\":2"));
        assert!(js.contains("\"gram\":[[0,1],[1,0]]"));
    }
}
