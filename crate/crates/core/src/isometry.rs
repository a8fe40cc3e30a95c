//! Integer isometries of a Gram lattice and the `O+` orientation test.
//!
//! An isometry is a square integer matrix `M` with `M^T G M = G`, acting
//! on column coordinate vectors. Membership in `O+` (the subgroup
//! preserving the orientation of positive 3-planes) is decided exactly:
//! project the image of a fixed rational positive 3-plane back onto that
//! plane and take the sign of the resulting 3x3 determinant.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::encode;
use crate::lattice::{self, GramLattice, IntVector, ScalarVector};
use crate::matrix::{self, IntMatrix};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum IsometryError {
    #[error("matrix is {got}x{cols}, lattice rank is {rank}")]
    DimensionMismatch { got: usize, cols: usize, rank: usize },
    #[error("matrix does not preserve the bilinear form")]
    NotAnIsometry,
    #[error("orientation test requires the K3 lattice")]
    NotK3,
}

/// Returns true iff `m^T · gram · m = gram` exactly.
pub fn is_isometry(m: &IntMatrix, lat: &GramLattice) -> Result<bool, IsometryError> {
    check_shape(m, lat)?;
    let prod = matrix::mat_mul_int(&matrix::mat_mul_int(&matrix::transpose(m), &lat.gram), m);
    Ok(prod == lat.gram)
}

fn check_shape(m: &IntMatrix, lat: &GramLattice) -> Result<(), IsometryError> {
    if m.len() != lat.rank || m.iter().any(|r| r.len() != lat.rank) {
        return Err(IsometryError::DimensionMismatch {
            got: m.len(),
            cols: m.first().map_or(0, |r| r.len()),
            rank: lat.rank,
        });
    }
    Ok(())
}

/// A certified isometry of a fixed ambient lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeIsometry {
    matrix: IntMatrix,
    ambient: GramLattice,
}

#[derive(Serialize, Deserialize)]
struct IsometryJson {
    matrix: Vec<Vec<serde_json::Value>>,
}

impl LatticeIsometry {
    /// Validates the isometry condition before accepting the matrix.
    pub fn new(matrix: IntMatrix, ambient: &GramLattice) -> Result<Self, IsometryError> {
        if !is_isometry(&matrix, ambient)? {
            return Err(IsometryError::NotAnIsometry);
        }
        Ok(Self { matrix, ambient: ambient.clone() })
    }

    pub fn identity(ambient: &GramLattice) -> Self {
        Self {
            matrix: matrix::identity_int(ambient.rank),
            ambient: ambient.clone(),
        }
    }

    pub fn neg_identity(ambient: &GramLattice) -> Self {
        let mut m = matrix::identity_int(ambient.rank);
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = BigInt::from(-1);
        }
        Self { matrix: m, ambient: ambient.clone() }
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn ambient(&self) -> &GramLattice {
        &self.ambient
    }

    pub fn determinant(&self) -> BigInt {
        matrix::bareiss_determinant(&self.matrix)
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.ambient.rank, other.ambient.rank);
        Self {
            matrix: matrix::mat_mul_int(&self.matrix, &other.matrix),
            ambient: self.ambient.clone(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::identity(&self.ambient);
        for _ in 0..k {
            acc = self.compose(&acc);
        }
        acc
    }

    pub fn apply_int(&self, v: &IntVector) -> IntVector {
        assert_eq!(v.coords.len(), self.ambient.rank);
        IntVector { coords: matrix::mat_vec_int(&self.matrix, &v.coords) }
    }

    /// Matrix-vector product over any exact scalar ring.
    pub fn apply<T: Scalar>(&self, v: &ScalarVector<T>) -> ScalarVector<T> {
        assert_eq!(v.coords.len(), self.ambient.rank);
        let coords = self
            .matrix
            .iter()
            .map(|row| {
                let mut acc = T::zero();
                for (c, x) in row.iter().zip(&v.coords) {
                    if c.is_zero() || x.is_zero() {
                        continue;
                    }
                    acc += T::from_integer(c) * x.clone();
                }
                acc
            })
            .collect();
        ScalarVector { coords }
    }

    /// True iff the isometry preserves the orientation of positive
    /// 3-planes. Uses the reference plane spanned by `u+v`, `x+y`, `z+t`
    /// (mutually orthogonal, each of norm 2): the matrix of
    /// `project_onto_P ∘ m` restricted to `P` is rational, and membership
    /// in `O+` is the positivity of its determinant.
    pub fn is_o_plus(&self) -> Result<bool, IsometryError> {
        if self.ambient.gram != lattice::k3_lattice().gram {
            return Err(IsometryError::NotK3);
        }
        let rank = self.ambient.rank;
        let plane = [
            plane_vector(rank, lattice::U, lattice::V),
            plane_vector(rank, lattice::X, lattice::Y),
            plane_vector(rank, lattice::Z, lattice::T),
        ];
        let two = BigRational::from(BigInt::from(2));
        let mut proj = vec![vec![BigRational::zero(); 3]; 3];
        for (j, p) in plane.iter().enumerate() {
            let image = self.apply_int(p);
            for (i, q) in plane.iter().enumerate() {
                let pairing = self
                    .ambient
                    .inner_int(&image, q)
                    .expect("plane vectors have ambient rank");
                // <p_i, p_i> = 2, so the projection coefficient is <.,p_i>/2
                proj[i][j] = BigRational::from(pairing) / two.clone();
            }
        }
        let det = det3(&proj);
        Ok(det.is_positive())
    }
}

fn plane_vector(rank: usize, a: usize, b: usize) -> IntVector {
    let mut v = IntVector::zero(rank);
    v.coords[a] = BigInt::one();
    v.coords[b] = BigInt::one();
    v
}

fn det3(m: &[Vec<BigRational>]) -> BigRational {
    &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
        - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
        + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
}

impl Serialize for LatticeIsometry {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let rows = self
            .matrix
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
        IsometryJson { matrix: rows }.serialize(ser)
    }
}

/// Parses the `{"matrix": [[...]]}` shape; the caller must still validate
/// against a lattice with [`LatticeIsometry::new`].
pub fn parse_isometry_matrix(json: &str) -> Result<IntMatrix, String> {
    let raw: IsometryJson = serde_json::from_str(json).map_err(|e| e.to_string())?;
    raw.matrix
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|v| match v {
                    serde_json::Value::Number(n) => n
                        .as_i64()
                        .map(BigInt::from)
                        .ok_or_else(|| format!("non-integer entry {n}")),
                    serde_json::Value::String(s) => {
                        encode::parse_int(&s).map_err(|e| e.to_string())
                    }
                    other => Err(format!("unexpected matrix entry {other}")),
                })
                .collect()
        })
        .collect()
}

/// The generator `phi` of the translation subgroup used by the built-in
/// family: on the first two hyperbolic blocks it sends
/// `u -> u, v -> v + y, x -> x - u, y -> y`, and it is the identity on the
/// third hyperbolic block and both `-E8` blocks.
pub fn phi() -> LatticeIsometry {
    let lat = lattice::k3_lattice();
    let mut m = matrix::identity_int(lat.rank);
    // columns hold images of basis vectors
    m[lattice::Y][lattice::V] = BigInt::one(); // v -> v + y
    m[lattice::U][lattice::X] = BigInt::from(-1); // x -> x - u
    LatticeIsometry::new(m, &lat).expect("phi preserves the form")
}

/// The involution exchanging the two `-E8` blocks (an isometry, used as a
/// negative control in equivariance tests).
pub fn swap_e8_blocks() -> LatticeIsometry {
    let lat = lattice::k3_lattice();
    let mut m = matrix::identity_int(lat.rank);
    for i in 0..8 {
        let a = lattice::FIRST_E8_OFFSET + i;
        let b = lattice::SECOND_E8_OFFSET + i;
        m[a][a] = BigInt::zero();
        m[b][b] = BigInt::zero();
        m[a][b] = BigInt::one();
        m[b][a] = BigInt::one();
    }
    LatticeIsometry::new(m, &lat).expect("block swap preserves the form")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{k3_lattice, IntVector, T, U, V, X, Y, Z};
    use crate::polynomial::ScalarPolynomial;

    #[test]
    fn identity_is_isometry_doubling_is_not() {
        let lat = k3_lattice();
        let id = matrix::identity_int(22);
        assert!(is_isometry(&id, &lat).unwrap());
        let mut dbl = matrix::identity_int(22);
        dbl[U][U] = BigInt::from(2);
        assert!(!is_isometry(&dbl, &lat).unwrap());
    }

    #[test]
    fn phi_is_certified() {
        let g = phi();
        assert!(is_isometry(g.matrix(), g.ambient()).unwrap());
        assert!(g.is_o_plus().unwrap());
        assert_eq!(g.determinant(), BigInt::one());
    }

    #[test]
    fn phi_images() {
        let g = phi();
        let v = IntVector::basis(V, 22);
        let img = g.apply_int(&v);
        let mut expect = IntVector::zero(22);
        expect.coords[V] = BigInt::one();
        expect.coords[Y] = BigInt::one();
        assert_eq!(img, expect); // v -> v + y
        let z = IntVector::basis(Z, 22);
        assert_eq!(g.apply_int(&z), z); // identity on the third block
    }

    #[test]
    fn phi_on_symbolic_vector() {
        // phi(2u + v + s·y) = 2u + v + (s+1)·y
        let g = phi();
        let s = ScalarPolynomial::s();
        let kappa = ScalarVector::combination(
            22,
            &[
                (ScalarPolynomial::from_integer(2), U),
                (ScalarPolynomial::from_integer(1), V),
                (s.clone(), Y),
            ],
        );
        let image = g.apply(&kappa);
        let expect = ScalarVector::combination(
            22,
            &[
                (ScalarPolynomial::from_integer(2), U),
                (ScalarPolynomial::from_integer(1), V),
                (s + ScalarPolynomial::from_integer(1), Y),
            ],
        );
        assert_eq!(image, expect);
    }

    #[test]
    fn orientation_flags() {
        let lat = k3_lattice();
        assert!(LatticeIsometry::identity(&lat).is_o_plus().unwrap());
        assert!(!LatticeIsometry::neg_identity(&lat).is_o_plus().unwrap());
        assert!(swap_e8_blocks().is_o_plus().unwrap());
    }

    #[test]
    fn o_plus_is_multiplicative() {
        let cases = [phi(), LatticeIsometry::neg_identity(&k3_lattice()), swap_e8_blocks()];
        for a in &cases {
            for b in &cases {
                let lhs = a.compose(b).is_o_plus().unwrap();
                let rhs = a.is_o_plus().unwrap() == b.is_o_plus().unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn isometries_preserve_pairings() {
        let lat = k3_lattice();
        let g = phi().compose(&swap_e8_blocks());
        let x = IntVector::from_i64(&[1, -2, 3, 0, 1, 1, 2, 0, 0, 1, 0, 0, 0, -1, 0, 0, 2, 0, 1, 0, 0, 3]);
        let y = IntVector::from_i64(&[0, 1, 1, 1, -1, 2, 0, 0, 1, 0, 0, 2, 0, 0, 1, -1, 0, 0, 0, 0, 1, 0]);
        let before = lat.inner_int(&x, &y).unwrap();
        let after = lat
            .inner_int(&g.apply_int(&x), &g.apply_int(&y))
            .unwrap();
        assert_eq!(before, after);
    }

    #[test]
    fn phi_has_infinite_order_prefix() {
        let lat = k3_lattice();
        let id = LatticeIsometry::identity(&lat);
        let g = phi();
        let mut acc = g.clone();
        for _ in 1..=10 {
            assert_ne!(acc, id);
            acc = acc.compose(&g);
        }
    }

    #[test]
    fn rejects_non_isometry() {
        let lat = k3_lattice();
        let mut bad = matrix::identity_int(22);
        bad[U][U] = BigInt::from(3);
        assert!(matches!(
            LatticeIsometry::new(bad, &lat),
            Err(IsometryError::NotAnIsometry)
        ));
    }

    #[test]
    fn json_shape_roundtrip() {
        let g = phi();
        let js = serde_json::to_string(&g).unwrap();
        let m = parse_isometry_matrix(&js).unwrap();
        assert_eq!(&m, g.matrix());
    }
}
