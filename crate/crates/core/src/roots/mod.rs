//! Deciding whether a root (an integer vector of square -2) is orthogonal
//! to a given collection of vectors.
//!
//! The pipeline: expand each orthogonality pairing over the monomial basis
//! of the multiquadratic field (and over powers of the family parameter in
//! symbolic mode) into integer linear forms, extract the integer kernel by
//! exact column elimination, certify that the Gram form restricted to the
//! kernel is negative definite, and enumerate the finitely many vectors of
//! the requested norm. Every witness is re-verified through an independent
//! pairing computation before it is returned.

pub mod enumerate;
pub mod symbolic;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::lattice::{GramLattice, IntVector};
use crate::matrix;
use crate::multiquadratic::{MultiquadraticNumber, Radicand, Sign};
use crate::{MqVector, PolyVector};

#[derive(Debug, Error)]
pub enum RootSearchError {
    #[error("vector length {got} does not match lattice rank {rank}")]
    DimensionMismatch { got: usize, rank: usize },
    #[error("input vectors do not span a positive 3-plane (minor {0} fails)")]
    NotPositivePlane(usize),
    #[error("form restricted to the kernel is not negative definite; the search would be infinite")]
    IndefiniteRestriction,
    #[error("enumeration target must be negative, got {0}")]
    InvalidTarget(BigInt),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// One integer linear form `Σ coeffs_i · δ_i = 0`, tagged with where it
/// came from: the input vector index, the power of the parameter, and the
/// radicand whose coefficient produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConstraintForm {
    pub coeffs: IntVector,
    pub source: usize,
    pub s_power: usize,
    pub radicand: Radicand,
}

/// The split orthogonality system: an integer vector `δ` pairs to zero
/// with every input vector iff it annihilates every form.
#[derive(Debug, Clone, Default, Serialize)]
pub struct LinearConstraintSystem {
    pub forms: Vec<ConstraintForm>,
    pub rank: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitMode<'a> {
    /// Treat the parameter as a formal indeterminate: powers of `s` split
    /// into separate forms.
    Symbolic,
    /// Evaluate the coordinates at a rational parameter value first.
    AtSample(&'a BigRational),
}

/// Expands `<δ, w> = 0` for each input vector over the monomial basis.
/// Soundness rests on the linear independence of `sqrt(Π S)` monomials
/// over the rationals (and of powers of a formal parameter).
pub fn split_constraints(
    vectors: &[PolyVector],
    lat: &GramLattice,
    mode: SplitMode<'_>,
) -> Result<LinearConstraintSystem, RootSearchError> {
    let mut forms = Vec::new();
    for (source, w) in vectors.iter().enumerate() {
        if w.coords.len() != lat.rank {
            return Err(RootSearchError::DimensionMismatch { got: w.coords.len(), rank: lat.rank });
        }
        match mode {
            SplitMode::Symbolic => {
                let gw = lat.gram_times(w).expect("length checked");
                let max_deg = gw
                    .coords
                    .iter()
                    .filter_map(|p| p.degree())
                    .max()
                    .unwrap_or(0);
                for power in 0..=max_deg {
                    let coeff_vec: Vec<MultiquadraticNumber> =
                        gw.coords.iter().map(|p| p.coefficient(power)).collect();
                    push_radicand_forms(&mut forms, &coeff_vec, source, power);
                }
            }
            SplitMode::AtSample(s) => {
                let evaluated = w.evaluate(s);
                let gw = lat.gram_times(&evaluated).expect("length checked");
                push_radicand_forms(&mut forms, &gw.coords, source, 0);
            }
        }
    }
    Ok(LinearConstraintSystem { forms, rank: lat.rank })
}

/// Convenience for constant (already evaluated) vectors.
pub fn split_constraints_const(
    vectors: &[MqVector],
    lat: &GramLattice,
) -> Result<LinearConstraintSystem, RootSearchError> {
    let polys: Vec<PolyVector> = vectors.iter().map(|v| v.to_poly()).collect();
    split_constraints(&polys, lat, SplitMode::Symbolic)
}

/// For one multiquadratic coefficient vector, emits one integer form per
/// radicand present, scaled to clear denominators.
fn push_radicand_forms(
    forms: &mut Vec<ConstraintForm>,
    coeffs: &[MultiquadraticNumber],
    source: usize,
    s_power: usize,
) {
    use std::collections::BTreeSet;
    let mut radicands: BTreeSet<Radicand> = BTreeSet::new();
    for c in coeffs {
        for (rad, _) in c.terms() {
            radicands.insert(rad.clone());
        }
    }
    for rad in radicands {
        let rat_coeffs: Vec<BigRational> = coeffs.iter().map(|c| c.coefficient(&rad)).collect();
        let mut denom_lcm = BigInt::one();
        for q in &rat_coeffs {
            denom_lcm = denom_lcm.lcm(q.denom());
        }
        let ints: Vec<BigInt> = rat_coeffs
            .iter()
            .map(|q| (q * BigRational::from(denom_lcm.clone())).to_integer())
            .collect();
        if ints.iter().all(|c| c.is_zero()) {
            continue;
        }
        forms.push(ConstraintForm {
            coeffs: IntVector { coords: ints },
            source,
            s_power,
            radicand: rad,
        });
    }
}

/// Basis of the integer solution sublattice of a constraint system.
#[derive(Debug, Clone, Serialize)]
pub struct KernelBasis {
    pub basis: Vec<IntVector>,
    pub rank: usize,
}

pub fn kernel_lattice(sys: &LinearConstraintSystem) -> KernelBasis {
    let rows: Vec<Vec<BigInt>> = sys.forms.iter().map(|f| f.coeffs.coords.clone()).collect();
    let split = matrix::column_kernel_split(&rows, sys.rank);
    let basis: Vec<IntVector> = split
        .kernel
        .into_iter()
        .map(|coords| IntVector { coords })
        .collect();
    let rank = basis.len();
    KernelBasis { basis, rank }
}

/// Gram matrix of the ambient form restricted to a sublattice basis.
pub fn restricted_gram(basis: &[IntVector], lat: &GramLattice) -> Vec<Vec<BigInt>> {
    let r = basis.len();
    let mut g = vec![vec![BigInt::zero(); r]; r];
    for i in 0..r {
        for j in i..r {
            let v = lat
                .inner_int(&basis[i], &basis[j])
                .expect("kernel vectors have ambient rank");
            g[i][j] = v.clone();
            g[j][i] = v;
        }
    }
    g
}

/// Options for the enumeration kernel.
#[derive(Debug, Clone, Copy)]
pub struct EnumOptions {
    /// Run LLL on the restricted form first. Pure performance switch: the
    /// returned set is identical either way (asserted in tests).
    pub reduce_basis: bool,
}

impl Default for EnumOptions {
    fn default() -> Self {
        Self { reduce_basis: true }
    }
}

/// Exact LDL pivots of the negated restricted form: the negative
/// definiteness certificate attached to search results.
#[derive(Debug, Clone, Serialize)]
pub struct DefinitenessCertificate {
    /// Pivots of the LDL^T decomposition of the negated restricted Gram
    /// matrix, all positive, as fraction strings.
    pub pivots: Vec<String>,
}

/// Complete list of sublattice vectors of a given negative norm, returned
/// in ambient coordinates, sorted canonically.
pub fn enumerate_norm(
    kernel: &KernelBasis,
    lat: &GramLattice,
    target: &BigInt,
    opts: EnumOptions,
) -> Result<(Vec<IntVector>, DefinitenessCertificate), RootSearchError> {
    if !target.is_negative() {
        return Err(RootSearchError::InvalidTarget(target.clone()));
    }
    let restricted = restricted_gram(&kernel.basis, lat);
    let negated: Vec<Vec<BigInt>> = restricted
        .iter()
        .map(|row| row.iter().map(|x| -x).collect())
        .collect();
    let dec = matrix::ldlt_positive_definite(&matrix::int_to_rat(&negated))
        .ok_or(RootSearchError::IndefiniteRestriction)?;
    let cert = DefinitenessCertificate {
        pivots: dec.diag.iter().map(crate::encode::rational_to_string).collect(),
    };
    let bound = -target;
    let mut found = Vec::new();
    if !kernel.basis.is_empty() {
        let (search_gram, transform) = if opts.reduce_basis {
            let u = matrix::lll_unimodular(&negated);
            let reduced =
                matrix::mat_mul_int(&matrix::mat_mul_int(&matrix::transpose(&u), &negated), &u);
            (reduced, Some(u))
        } else {
            (negated.clone(), None)
        };
        for y in enumerate::vectors_of_norm(&search_gram, &bound) {
            let in_kernel_coords = match &transform {
                Some(u) => matrix::mat_vec_int(u, &y),
                None => y,
            };
            // ambient coordinates: Σ y_i · basis_i
            let mut ambient = vec![BigInt::zero(); lat.rank];
            for (c, b) in in_kernel_coords.iter().zip(&kernel.basis) {
                if c.is_zero() {
                    continue;
                }
                for (a, x) in ambient.iter_mut().zip(&b.coords) {
                    *a += c * x;
                }
            }
            found.push(IntVector { coords: ambient });
        }
    }
    found.sort_by_key(|v| (v.coord_norm(), v.coords.clone()));
    Ok((found, cert))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchOutcome {
    Empty,
    Witness,
}

/// Result of a root search, with enough data to replay the certificate.
#[derive(Debug, Clone, Serialize)]
pub struct RootSearchResult {
    pub outcome: SearchOutcome,
    /// Canonical witness (smallest coordinate norm, then lexicographic),
    /// present iff the outcome is `Witness`.
    pub witness: Option<IntVector>,
    /// Total number of roots found.
    pub count: usize,
    pub kernel_rank: usize,
    pub kernel_basis: Vec<IntVector>,
    pub definiteness: DefinitenessCertificate,
    /// The enumerated norm, as a string.
    pub bound: String,
    /// Full witness list (only retained on request).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub all_witnesses: Option<Vec<IntVector>>,
}

/// Decides whether any root `δ² = -2` is orthogonal to all the given
/// vectors, evaluated at the given parameter value.
pub fn find_roots_orthogonal_to(
    vectors: &[PolyVector],
    at: &BigRational,
    lat: &GramLattice,
    opts: EnumOptions,
    keep_all: bool,
) -> Result<RootSearchResult, RootSearchError> {
    let evaluated: Vec<MqVector> = vectors.iter().map(|v| v.evaluate(at)).collect();
    find_roots_orthogonal_to_const(&evaluated, lat, opts, keep_all)
}

/// Same, for already-evaluated (constant) vectors.
pub fn find_roots_orthogonal_to_const(
    vectors: &[MqVector],
    lat: &GramLattice,
    opts: EnumOptions,
    keep_all: bool,
) -> Result<RootSearchResult, RootSearchError> {
    if vectors.len() == 3 {
        check_positive_plane(vectors, lat)?;
    }
    let sys = split_constraints_const(vectors, lat)?;
    let kernel = kernel_lattice(&sys);
    let target = BigInt::from(-2);
    let (roots, cert) = enumerate_norm(&kernel, lat, &target, opts)?;

    // Independent re-verification of every reported root through the
    // multiquadratic pairing path (not the split-form path).
    for delta in &roots {
        let norm = lat.inner_int(delta, delta).map_err(internal)?;
        if norm != target {
            return Err(RootSearchError::Internal(format!(
                "enumerated vector has norm {norm}, expected {target}"
            )));
        }
        let dm: MqVector = delta.to_scalar();
        for w in vectors {
            let pairing = lat.inner(&dm, w).map_err(internal)?;
            if pairing.sign() != Sign::Zero {
                return Err(RootSearchError::Internal(
                    "enumerated vector is not orthogonal to an input vector".into(),
                ));
            }
        }
    }

    let count = roots.len();
    let witness = roots.first().cloned();
    Ok(RootSearchResult {
        outcome: if count == 0 { SearchOutcome::Empty } else { SearchOutcome::Witness },
        witness,
        count,
        kernel_rank: kernel.rank,
        kernel_basis: kernel.basis,
        definiteness: cert,
        bound: target.to_string(),
        all_witnesses: if keep_all { Some(roots) } else { None },
    })
}

fn internal(e: crate::lattice::LatticeError) -> RootSearchError {
    RootSearchError::Internal(e.to_string())
}

/// The Gram matrix of the three vectors must be positive definite,
/// checked by exact signs of leading principal minors.
fn check_positive_plane(vectors: &[MqVector], lat: &GramLattice) -> Result<(), RootSearchError> {
    let mut g = vec![vec![MultiquadraticNumber::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            g[i][j] = lat.inner(&vectors[i], &vectors[j]).map_err(|e| match e {
                crate::lattice::LatticeError::DimensionMismatch { got, rank } => {
                    RootSearchError::DimensionMismatch { got, rank }
                }
                other => RootSearchError::Internal(other.to_string()),
            })?;
        }
    }
    let m1 = g[0][0].clone();
    if m1.sign() != Sign::Positive {
        return Err(RootSearchError::NotPositivePlane(1));
    }
    let m2 = g[0][0].clone() * g[1][1].clone() - g[0][1].clone() * g[1][0].clone();
    if m2.sign() != Sign::Positive {
        return Err(RootSearchError::NotPositivePlane(2));
    }
    let m3 = g[0][0].clone() * (g[1][1].clone() * g[2][2].clone() - g[1][2].clone() * g[2][1].clone())
        - g[0][1].clone() * (g[1][0].clone() * g[2][2].clone() - g[1][2].clone() * g[2][0].clone())
        + g[0][2].clone() * (g[1][0].clone() * g[2][1].clone() - g[1][1].clone() * g[2][0].clone());
    if m3.sign() != Sign::Positive {
        return Err(RootSearchError::NotPositivePlane(3));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{self, k3_lattice, minus_e8, IntVector, ScalarVector};
    use crate::polynomial::ScalarPolynomial;

    fn poly_comb(terms: &[(i64, usize)]) -> PolyVector {
        ScalarVector::combination(
            22,
            &terms
                .iter()
                .map(|&(c, i)| (ScalarPolynomial::from_integer(c), i))
                .collect::<Vec<_>>(),
        )
    }

    #[test]
    fn split_single_hyperbolic_vector() {
        // vectors = {u}: single form "coefficient of v equals 0"
        let lat = k3_lattice();
        let u = poly_comb(&[(1, lattice::U)]);
        let sys = split_constraints(&[u], &lat, SplitMode::Symbolic).unwrap();
        assert_eq!(sys.forms.len(), 1);
        let f = &sys.forms[0];
        assert!(f.radicand.is_empty());
        assert_eq!(f.s_power, 0);
        let mut expect = vec![BigInt::zero(); 22];
        expect[lattice::V] = BigInt::one();
        assert_eq!(f.coeffs.coords, expect);
    }

    #[test]
    fn kernel_ranks() {
        let lat = k3_lattice();
        // empty system -> full rank 22
        let sys = LinearConstraintSystem { forms: vec![], rank: 22 };
        assert_eq!(kernel_lattice(&sys).rank, 22);
        // {δ_v = 0} -> rank 21
        let u = poly_comb(&[(1, lattice::U)]);
        let sys = split_constraints(&[u], &lat, SplitMode::Symbolic).unwrap();
        assert_eq!(kernel_lattice(&sys).rank, 21);
    }

    #[test]
    fn e8_root_count_is_240() {
        let e8 = minus_e8();
        let full = KernelBasis {
            basis: (0..8).map(|i| IntVector::basis(i, 8)).collect(),
            rank: 8,
        };
        let (roots, cert) =
            enumerate_norm(&full, &e8, &BigInt::from(-2), EnumOptions::default()).unwrap();
        assert_eq!(roots.len(), 240);
        assert!(cert.pivots.len() == 8);
        // closed under negation
        for r in &roots {
            assert!(roots.contains(&r.neg()));
        }
        // reduction switch must not change the set
        let (unreduced, _) =
            enumerate_norm(&full, &e8, &BigInt::from(-2), EnumOptions { reduce_basis: false })
                .unwrap();
        assert_eq!(roots, unreduced);
    }

    #[test]
    fn rank_one_norm_minus_four_has_no_roots() {
        // lattice spanned by a norm -4 vector: norms are -4k^2
        let lat = k3_lattice();
        let mut v = IntVector::zero(22);
        v.coords[lattice::Z] = BigInt::one();
        v.coords[lattice::T] = BigInt::from(-2); // (z - 2t)^2 = -4
        let kb = KernelBasis { basis: vec![v], rank: 1 };
        let (roots, _) = enumerate_norm(&kb, &lat, &BigInt::from(-2), EnumOptions::default()).unwrap();
        assert!(roots.is_empty());
    }

    #[test]
    fn indefinite_restriction_is_detected() {
        let lat = k3_lattice();
        let kb = KernelBasis {
            basis: vec![IntVector::basis(lattice::U, 22), IntVector::basis(lattice::V, 22)],
            rank: 2,
        };
        assert!(matches!(
            enumerate_norm(&kb, &lat, &BigInt::from(-2), EnumOptions::default()),
            Err(RootSearchError::IndefiniteRestriction)
        ));
    }

    #[test]
    fn positive_target_rejected() {
        let lat = k3_lattice();
        let kb = KernelBasis { basis: vec![], rank: 0 };
        assert!(matches!(
            enumerate_norm(&kb, &lat, &BigInt::from(2), EnumOptions::default()),
            Err(RootSearchError::InvalidTarget(_))
        ));
    }

    #[test]
    fn trivial_plane_has_witness() {
        // {u+v, x+y, z+t}: every -E8 root is orthogonal to all three
        let lat = k3_lattice();
        let vectors = vec![
            poly_comb(&[(1, lattice::U), (1, lattice::V)]),
            poly_comb(&[(1, lattice::X), (1, lattice::Y)]),
            poly_comb(&[(1, lattice::Z), (1, lattice::T)]),
        ];
        let s0 = BigRational::zero();
        let res =
            find_roots_orthogonal_to(&vectors, &s0, &lat, EnumOptions::default(), false).unwrap();
        assert_eq!(res.outcome, SearchOutcome::Witness);
        assert_eq!(res.count, 480); // 240 roots in each -E8 block
        assert_eq!(res.kernel_rank, 19);
        let w = res.witness.unwrap();
        assert_eq!(lat.inner_int(&w, &w).unwrap(), BigInt::from(-2));
    }

    #[test]
    fn non_positive_plane_rejected() {
        let lat = k3_lattice();
        let vectors = vec![
            poly_comb(&[(1, lattice::U)]),
            poly_comb(&[(1, lattice::X), (1, lattice::Y)]),
            poly_comb(&[(1, lattice::Z), (1, lattice::T)]),
        ];
        let s0 = BigRational::zero();
        assert!(matches!(
            find_roots_orthogonal_to(&vectors, &s0, &lat, EnumOptions::default(), false),
            Err(RootSearchError::NotPositivePlane(1))
        ));
    }
}
