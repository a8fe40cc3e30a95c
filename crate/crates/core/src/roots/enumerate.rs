//! Fincke-Pohst enumeration of all vectors of a fixed positive norm.
//!
//! Given the Gram matrix of a positive definite integer form, lists every
//! integer vector with `x^T G x = target`, by branch-and-bound over the
//! exact LDL^T decomposition: the form splits as `Σ_i d_i (x_i + c_i)^2`
//! with rational `d_i > 0`, so each level contributes a bounded integer
//! interval. All bound computations are exact rational arithmetic.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::matrix::{self, Ldlt};

/// All `x != 0` with `x^T gram x == target`, in lexicographic order.
/// `gram` must be positive definite (callers certify this first);
/// `target` must be positive.
pub fn vectors_of_norm(gram: &[Vec<BigInt>], target: &BigInt) -> Vec<Vec<BigInt>> {
    let n = gram.len();
    assert!(target.is_positive(), "enumeration target must be positive");
    if n == 0 {
        return Vec::new();
    }
    let dec = matrix::ldlt_positive_definite(&matrix::int_to_rat(gram))
        .expect("vectors_of_norm requires a positive definite Gram matrix");
    let budget = BigRational::from(target.clone());
    let mut out = Vec::new();
    let mut coords = vec![BigInt::zero(); n];
    // c[i] = Σ_{j>i} L[j][i] x_j, maintained incrementally per level
    let shifts = vec![BigRational::zero(); n];
    descend(&dec, n, budget, shifts, &mut coords, &mut out);
    out.sort();
    out
}

fn descend(
    dec: &Ldlt,
    level: usize,
    budget: BigRational,
    shifts: Vec<BigRational>,
    coords: &mut Vec<BigInt>,
    out: &mut Vec<Vec<BigInt>>,
) {
    if level == 0 {
        if budget.is_zero() && coords.iter().any(|c| !c.is_zero()) {
            out.push(coords.clone());
        }
        return;
    }
    let i = level - 1;
    let d = &dec.diag[i];
    let c = &shifts[i];
    // integers x with d (x + c)^2 <= budget
    let bound = &budget / d;
    let (lo, hi) = integer_interval(c, &bound);
    let mut x = lo;
    while x <= hi {
        let off = BigRational::from(x.clone()) + c;
        let used = d * &off * &off;
        let remaining = &budget - &used;
        if !remaining.is_negative() {
            coords[i] = x.clone();
            let mut next_shifts = shifts.clone();
            for j in 0..i {
                let t = &dec.lower[i][j] * BigRational::from(x.clone());
                next_shifts[j] += t;
            }
            descend(dec, i, remaining, next_shifts, coords, out);
            coords[i] = BigInt::zero();
        }
        x += 1;
    }
}

/// Exact integer endpoints of `{ x : (x + c)^2 <= r }`; empty when r < 0
/// is signalled by `lo > hi`.
fn integer_interval(c: &BigRational, r: &BigRational) -> (BigInt, BigInt) {
    if r.is_negative() {
        return (BigInt::one(), BigInt::zero());
    }
    // sqrt bounds via integer square root of numerator*denominator
    let num = r.numer().to_biguint().expect("nonnegative");
    let den = r.denom().to_biguint().expect("positive");
    let root = (num * &den).sqrt();
    let approx = BigRational::new(BigInt::from(root), BigInt::from(den));
    // hi = floor(-c + sqrt(r)), adjusted by exact checks
    let mut hi = (&approx - c).floor().to_integer();
    while sq_le(&(&hi + 1), c, r) {
        hi += 1;
    }
    while !sq_le(&hi, c, r) {
        hi -= 1;
    }
    let mut lo = (-&approx - c).ceil().to_integer();
    while sq_le(&(&lo - 1), c, r) {
        lo -= 1;
    }
    while !sq_le(&lo, c, r) {
        lo += 1;
    }
    (lo, hi)
}

fn sq_le(x: &BigInt, c: &BigRational, r: &BigRational) -> bool {
    let v = BigRational::from(x.clone()) + c;
    &v * &v <= *r
}

/// Independent oracle: plain box search with per-coordinate bounds
/// `x_i^2 <= target * (G^{-1})_ii` (sharp for positive definite forms).
/// Exponential, only suitable for small ranks; used to cross-check the
/// branch-and-bound enumeration.
pub fn vectors_of_norm_boxsearch(gram: &[Vec<BigInt>], target: &BigInt) -> Vec<Vec<BigInt>> {
    let n = gram.len();
    assert!(target.is_positive());
    if n == 0 {
        return Vec::new();
    }
    let inv = matrix::rational_inverse(&matrix::int_to_rat(gram))
        .expect("positive definite matrices are invertible");
    let bounds: Vec<i64> = (0..n)
        .map(|i| {
            let b = BigRational::from(target.clone()) * &inv[i][i];
            // floor(sqrt(b))
            let num = b.numer().to_biguint().unwrap_or_else(BigUint::zero);
            let den = b.denom().to_biguint().expect("positive");
            let root = (num * &den).sqrt() / den;
            root.to_i64().expect("box bound fits in i64") + 1
        })
        .collect();
    let gi: Vec<Vec<i64>> = gram
        .iter()
        .map(|row| row.iter().map(|x| x.to_i64().expect("small gram entries")).collect())
        .collect();
    let t = target.to_i64().expect("small target");
    let mut out = Vec::new();
    let mut x: Vec<i64> = bounds.iter().map(|&b| -b).collect();
    loop {
        // evaluate x^T G x
        let mut norm = 0i64;
        for i in 0..n {
            if x[i] == 0 {
                continue;
            }
            norm += gi[i][i] * x[i] * x[i];
            for j in i + 1..n {
                norm += 2 * gi[i][j] * x[i] * x[j];
            }
        }
        if norm == t && x.iter().any(|&v| v != 0) {
            out.push(x.iter().map(|&v| BigInt::from(v)).collect::<Vec<_>>());
        }
        // odometer increment over the box
        let mut k = 0;
        loop {
            if k == n {
                out.sort();
                return out;
            }
            if x[k] < bounds[k] {
                x[k] += 1;
                break;
            }
            x[k] = -bounds[k];
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gram(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect()
    }

    #[test]
    fn diagonal_form_roots() {
        // x^2*2 + y^2*2 = 2 -> (+-1, 0), (0, +-1)
        let g = gram(&[&[2, 0], &[0, 2]]);
        let vs = vectors_of_norm(&g, &BigInt::from(2));
        assert_eq!(vs.len(), 4);
        let box_vs = vectors_of_norm_boxsearch(&g, &BigInt::from(2));
        assert_eq!(vs, box_vs);
    }

    #[test]
    fn norm_four_rank_one() {
        // single vector of norm 4: 4k^2 = 2 unsolvable
        let g = gram(&[&[4]]);
        assert!(vectors_of_norm(&g, &BigInt::from(2)).is_empty());
        assert_eq!(vectors_of_norm(&g, &BigInt::from(4)).len(), 2);
    }

    #[test]
    fn skew_basis_agrees_with_box() {
        let g = gram(&[&[5, 3, 1], &[3, 4, 2], &[1, 2, 6]]);
        for t in [1i64, 2, 3, 4, 5, 6] {
            let a = vectors_of_norm(&g, &BigInt::from(t));
            let b = vectors_of_norm_boxsearch(&g, &BigInt::from(t));
            assert_eq!(a, b, "target {t}");
        }
    }

    #[test]
    fn interval_endpoints_exact() {
        let c = BigRational::new(BigInt::from(1), BigInt::from(3));
        let r = BigRational::new(BigInt::from(9), BigInt::from(4));
        // (x + 1/3)^2 <= 9/4 -> x in [-1.833, 1.166] -> [-1, 1]
        let (lo, hi) = integer_interval(&c, &r);
        assert_eq!(lo, BigInt::from(-1));
        assert_eq!(hi, BigInt::from(1));
        let empty = integer_interval(&c, &BigRational::from(BigInt::from(-1)));
        assert!(empty.0 > empty.1);
    }

    #[test]
    fn results_closed_under_negation() {
        let g = gram(&[&[2, 1], &[1, 2]]);
        let vs = vectors_of_norm(&g, &BigInt::from(2));
        for v in &vs {
            let neg: Vec<BigInt> = v.iter().map(|x| -x).collect();
            assert!(vs.contains(&neg));
        }
        assert_eq!(vs.len(), 6); // A2 root system
    }
}
