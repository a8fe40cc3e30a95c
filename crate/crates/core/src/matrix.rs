//! Exact integer and rational dense linear algebra.
//!
//! Everything here is deterministic and exact: Bareiss determinants,
//! column-style Hermite elimination for integer kernels, congruence
//! diagonalization for signatures, LDL^T decompositions for definiteness
//! certificates, and a Gram-based LLL reduction used as an enumeration
//! preprocessing switch. No floating point anywhere.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type IntMatrix = Vec<Vec<BigInt>>;
pub type RatMatrix = Vec<Vec<BigRational>>;

pub fn identity_int(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

pub fn transpose<T: Clone>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    if m.is_empty() {
        return Vec::new();
    }
    let rows = m.len();
    let cols = m[0].len();
    (0..cols)
        .map(|j| (0..rows).map(|i| m[i][j].clone()).collect())
        .collect()
}

pub fn mat_mul_int(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> IntMatrix {
    let n = a.len();
    let k = if n > 0 { a[0].len() } else { 0 };
    let m = if b.is_empty() { 0 } else { b[0].len() };
    assert_eq!(k, b.len(), "matrix dimension mismatch");
    let mut out = vec![vec![BigInt::zero(); m]; n];
    for i in 0..n {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..m {
                let t = &a[i][l] * &b[l][j];
                out[i][j] += t;
            }
        }
    }
    out
}

pub fn mat_vec_int(a: &[Vec<BigInt>], v: &[BigInt]) -> Vec<BigInt> {
    a.iter()
        .map(|row| {
            let mut acc = BigInt::zero();
            for (c, x) in row.iter().zip(v) {
                acc += c * x;
            }
            acc
        })
        .collect()
}

pub fn int_to_rat(m: &[Vec<BigInt>]) -> RatMatrix {
    m.iter()
        .map(|row| row.iter().map(|x| BigRational::from(x.clone())).collect())
        .collect()
}

/// Fraction-free Bareiss determinant.
pub fn bareiss_determinant(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    assert!(m.iter().all(|r| r.len() == n), "determinant needs a square matrix");
    let mut a: IntMatrix = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = num / &prev; // exact division, Bareiss invariant
            }
        }
        for i in k + 1..n {
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

/// Result of column elimination on an integer matrix `A` (rows x cols):
/// a unimodular `U` with `A·U` in column echelon form, split into the
/// columns spanning the kernel of `A` and the complementary columns.
#[derive(Debug, Clone)]
pub struct KernelSplit {
    /// Basis of `{ x : A x = 0 }` over the integers (saturated sublattice).
    pub kernel: Vec<Vec<BigInt>>,
    /// The remaining columns of `U`; together with `kernel` they form a
    /// basis of the full integer lattice of rank `cols`.
    pub complement: Vec<Vec<BigInt>>,
}

/// Integer kernel via column Hermite elimination with full transform
/// tracking. Deterministic: pivots are chosen by minimal absolute value,
/// ties broken by column index.
pub fn column_kernel_split(rows: &[Vec<BigInt>], cols: usize) -> KernelSplit {
    let mut a: IntMatrix = rows.to_vec();
    for r in &a {
        assert_eq!(r.len(), cols, "constraint row has wrong length");
    }
    let mut u = identity_int(cols);
    let mut lead = 0usize;
    for r in 0..a.len() {
        if lead == cols {
            break;
        }
        loop {
            // Locate the active column with the smallest nonzero entry.
            let mut pivot: Option<usize> = None;
            for c in lead..cols {
                if a[r][c].is_zero() {
                    continue;
                }
                pivot = match pivot {
                    None => Some(c),
                    Some(p) if a[r][c].abs() < a[r][p].abs() => Some(c),
                    keep => keep,
                };
            }
            let Some(p) = pivot else { break };
            let mut reduced_any = false;
            for c in lead..cols {
                if c == p || a[r][c].is_zero() {
                    continue;
                }
                let q = &a[r][c] / &a[r][p];
                if !q.is_zero() {
                    for row in a.iter_mut() {
                        let t = &row[p] * &q;
                        row[c] -= t;
                    }
                    for row in u.iter_mut() {
                        let t = &row[p] * &q;
                        row[c] -= t;
                    }
                }
                if !a[r][c].is_zero() {
                    reduced_any = true;
                }
            }
            if !reduced_any {
                // Single nonzero entry left in this row: lock it as a pivot.
                if p != lead {
                    for row in a.iter_mut() {
                        row.swap(p, lead);
                    }
                    for row in u.iter_mut() {
                        row.swap(p, lead);
                    }
                }
                lead += 1;
                break;
            }
        }
    }
    let kernel = (lead..cols)
        .map(|c| u.iter().map(|row| row[c].clone()).collect())
        .collect();
    let complement = (0..lead)
        .map(|c| u.iter().map(|row| row[c].clone()).collect())
        .collect();
    KernelSplit { kernel, complement }
}

/// Solves `A x = b` over the integers. Returns one solution if any exists.
pub fn integer_solve(rows: &[Vec<BigInt>], rhs: &[BigInt], cols: usize) -> Option<Vec<BigInt>> {
    // Homogenize: solutions of A x = b correspond to kernel vectors of
    // [A | -b] with last coordinate 1.
    assert_eq!(rows.len(), rhs.len());
    let aug: Vec<Vec<BigInt>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut row = r.clone();
            row.push(-b.clone());
            row
        })
        .collect();
    let split = column_kernel_split(&aug, cols + 1);
    // Find a kernel combination whose last coordinate is 1. The last
    // coordinates of the kernel basis generate an ideal (g); solvable iff
    // g divides 1.
    let lasts: Vec<BigInt> = split.kernel.iter().map(|v| v[cols].clone()).collect();
    // Run a small extended-gcd accumulation over the basis.
    let mut combo = vec![BigInt::zero(); cols + 1];
    let mut g = BigInt::zero();
    for (v, l) in split.kernel.iter().zip(&lasts) {
        if l.is_zero() {
            continue;
        }
        if g.is_zero() {
            combo = v.clone();
            g = l.clone();
            continue;
        }
        let (d, x, y) = extended_gcd(&g, l);
        combo = combo
            .iter()
            .zip(v)
            .map(|(a, b)| a * &x + b * &y)
            .collect();
        g = d;
    }
    if g.is_zero() {
        return None;
    }
    if !(&g).is_one() && !(-&g).is_one() {
        return None;
    }
    if (-&g).is_one() {
        combo = combo.iter().map(|x| -x).collect();
    }
    Some(combo[..cols].to_vec())
}

/// Extended gcd: returns (g, x, y) with a*x + b*y = g, g >= 0.
pub fn extended_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut x0, mut x1) = (BigInt::one(), BigInt::zero());
    let (mut y0, mut y1) = (BigInt::zero(), BigInt::one());
    while !r1.is_zero() {
        let q = &r0 / &r1;
        let r = &r0 - &q * &r1;
        r0 = std::mem::replace(&mut r1, r);
        let x = &x0 - &q * &x1;
        x0 = std::mem::replace(&mut x1, x);
        let y = &y0 - &q * &y1;
        y0 = std::mem::replace(&mut y1, y);
    }
    if r0.is_negative() {
        (-r0, -x0, -y0)
    } else {
        (r0, x0, y0)
    }
}

/// Inertia of a symmetric rational matrix: counts of positive, negative
/// and zero diagonal entries after an exact congruence diagonalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

/// Exact symmetric Gaussian elimination by congruence. Zero diagonal
/// entries are repaired by adding a row/column with a nonzero off-diagonal
/// pairing (the hyperbolic pivot trick); genuinely null directions stay
/// zero and are counted as such.
pub fn congruence_inertia(g: &RatMatrix) -> Inertia {
    let n = g.len();
    let mut a = g.to_vec();
    for (i, r) in a.iter().enumerate() {
        assert_eq!(r.len(), n);
        for j in 0..n {
            debug_assert_eq!(r[j], g[j][i], "congruence_inertia needs a symmetric matrix");
        }
    }
    let mut inertia = Inertia { positive: 0, negative: 0, zero: 0 };
    for i in 0..n {
        if a[i][i].is_zero() {
            if let Some(j) = (i + 1..n).find(|&j| !a[j][j].is_zero()) {
                swap_sym(&mut a, i, j);
            } else if let Some(j) = (i + 1..n).find(|&j| !a[i][j].is_zero()) {
                // both diagonals zero, off-diagonal nonzero: row/col add
                add_sym(&mut a, i, j);
            }
        }
        if a[i][i].is_zero() {
            inertia.zero += 1;
            continue;
        }
        if a[i][i].is_positive() {
            inertia.positive += 1;
        } else {
            inertia.negative += 1;
        }
        for j in i + 1..n {
            if a[i][j].is_zero() {
                continue;
            }
            let f = &a[i][j] / &a[i][i];
            for k in i..n {
                let t = &f * &a[i][k];
                a[j][k] -= t.clone();
            }
            for k in i..n {
                let t = &f * &a[k][i];
                a[k][j] -= t;
            }
        }
    }
    inertia
}

fn swap_sym(a: &mut RatMatrix, i: usize, j: usize) {
    a.swap(i, j);
    for row in a.iter_mut() {
        row.swap(i, j);
    }
}

fn add_sym(a: &mut RatMatrix, i: usize, j: usize) {
    let n = a.len();
    for k in 0..n {
        let t = a[j][k].clone();
        a[i][k] += t;
    }
    for k in 0..n {
        let t = a[k][j].clone();
        a[k][i] += t;
    }
}

/// Unit-lower-triangular L and positive diagonal D with `M = L D L^T`.
/// Returns `None` as soon as a pivot fails to be positive, i.e. iff `M`
/// is not positive definite.
#[derive(Debug, Clone)]
pub struct Ldlt {
    pub lower: RatMatrix,
    pub diag: Vec<BigRational>,
}

pub fn ldlt_positive_definite(m: &RatMatrix) -> Option<Ldlt> {
    let n = m.len();
    let mut lower = vec![vec![BigRational::zero(); n]; n];
    let mut diag = vec![BigRational::zero(); n];
    for j in 0..n {
        let mut d = m[j][j].clone();
        for k in 0..j {
            d -= &lower[j][k] * &lower[j][k] * &diag[k];
        }
        if !d.is_positive() {
            return None;
        }
        diag[j] = d;
        lower[j][j] = BigRational::one();
        for i in j + 1..n {
            let mut v = m[i][j].clone();
            for k in 0..j {
                v -= &lower[i][k] * &lower[j][k] * &diag[k];
            }
            lower[i][j] = v / &diag[j];
        }
    }
    Some(Ldlt { lower, diag })
}

/// Gauss-Jordan inverse of a rational matrix; `None` when singular.
pub fn rational_inverse(m: &RatMatrix) -> Option<RatMatrix> {
    let n = m.len();
    let mut a = m.to_vec();
    let mut inv: RatMatrix = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].clone();
        for j in 0..n {
            a[col][j] /= p.clone();
            inv[col][j] /= p.clone();
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                let t = &f * &a[col][j];
                a[r][j] -= t;
                let t = &f * &inv[col][j];
                inv[r][j] -= t;
            }
        }
    }
    Some(inv)
}

/// Gram-based LLL with the classic Lovász constant 3/4, computed entirely
/// in exact rationals. Input must be the Gram matrix of a positive
/// definite form; returns a unimodular `U` such that `U^T G U` is the Gram
/// matrix of the reduced basis.
pub fn lll_unimodular(gram: &[Vec<BigInt>]) -> IntMatrix {
    let n = gram.len();
    if n <= 1 {
        return identity_int(n);
    }
    let mut g = int_to_rat(gram);
    let mut u = identity_int(n);
    let three_quarters = BigRational::new(BigInt::from(3), BigInt::from(4));

    // column operation b_c -= q * b_other on both U and the Gram matrix
    fn col_sub(g: &mut RatMatrix, u: &mut IntMatrix, c: usize, other: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        let qr = BigRational::from(q.clone());
        let n = g.len();
        for k in 0..n {
            let t = &qr * &g[other][k];
            g[c][k] -= t;
        }
        for k in 0..n {
            let t = &qr * &g[k][other];
            g[k][c] -= t;
        }
        for row in u.iter_mut() {
            let t = &row[other] * q;
            row[c] -= t;
        }
    }

    fn gso(g: &RatMatrix) -> (RatMatrix, Vec<BigRational>) {
        let n = g.len();
        let mut mu = vec![vec![BigRational::zero(); n]; n];
        let mut b = vec![BigRational::zero(); n];
        let mut c = vec![vec![BigRational::zero(); n]; n]; // <b_i, b*_j>
        for i in 0..n {
            for j in 0..i {
                let mut v = g[i][j].clone();
                for k in 0..j {
                    v -= &mu[j][k] * &c[i][k];
                }
                c[i][j] = v;
                mu[i][j] = &c[i][j] / &b[j];
            }
            let mut v = g[i][i].clone();
            for k in 0..i {
                v -= &mu[i][k] * &c[i][k];
            }
            b[i] = v;
        }
        (mu, b)
    }

    fn round_nearest(q: &BigRational) -> BigInt {
        // round half toward even is unnecessary; nearest with half up
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        (q + half).floor().to_integer()
    }

    let mut k = 1usize;
    let (mut mu, mut b) = gso(&g);
    while k < n {
        // size-reduce column k
        for j in (0..k).rev() {
            let q = round_nearest(&mu[k][j]);
            if !q.is_zero() {
                col_sub(&mut g, &mut u, k, j, &q);
                let r = gso(&g);
                mu = r.0;
                b = r.1;
            }
        }
        let cond = (&three_quarters - &mu[k][k - 1] * &mu[k][k - 1]) * &b[k - 1];
        if b[k] < cond {
            for row in g.iter_mut() {
                row.swap(k - 1, k);
            }
            g.swap(k - 1, k);
            for row in u.iter_mut() {
                row.swap(k - 1, k);
            }
            let r = gso(&g);
            mu = r.0;
            b = r.1;
            k = k.max(2) - 1;
        } else {
            k += 1;
        }
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn int_mat(rows: &[&[i64]]) -> IntMatrix {
        rows.iter().map(|r| r.iter().map(|&v| bi(v)).collect()).collect()
    }

    #[test]
    fn bareiss_small_cases() {
        assert_eq!(bareiss_determinant(&int_mat(&[&[2]])), bi(2));
        assert_eq!(bareiss_determinant(&int_mat(&[&[0, 1], &[1, 0]])), bi(-1));
        assert_eq!(
            bareiss_determinant(&int_mat(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 10]])),
            bi(-3)
        );
        assert_eq!(
            bareiss_determinant(&int_mat(&[&[1, 2], &[2, 4]])),
            bi(0)
        );
    }

    #[test]
    fn kernel_of_single_form() {
        let rows = int_mat(&[&[0, 1, 0]]);
        let split = column_kernel_split(&rows, 3);
        assert_eq!(split.kernel.len(), 2);
        for v in &split.kernel {
            assert!(v[1].is_zero());
        }
        assert_eq!(split.complement.len(), 1);
    }

    #[test]
    fn kernel_annihilates_and_has_right_rank() {
        let rows = int_mat(&[&[2, 4, 6, 0], &[1, 2, 3, 1], &[3, 6, 9, 1]]);
        let split = column_kernel_split(&rows, 4);
        // rank of the system is 2 (third row = first-ish combos)
        assert_eq!(split.kernel.len(), 2);
        for v in &split.kernel {
            for r in &rows {
                let dot: BigInt = r.iter().zip(v).map(|(a, b)| a * b).sum();
                assert!(dot.is_zero());
            }
        }
        // kernel + complement must be unimodular together
        let mut full: Vec<Vec<BigInt>> = Vec::new();
        for c in split.complement.iter().chain(split.kernel.iter()) {
            full.push(c.clone());
        }
        let m = transpose(&full);
        let d = bareiss_determinant(&m);
        assert!(d.abs() == bi(1).into());
    }

    #[test]
    fn kernel_is_saturated_primitive() {
        // x + y even-style trap: [2, 2] has kernel (1, -1), not (2, -2)
        let rows = int_mat(&[&[2, 2]]);
        let split = column_kernel_split(&rows, 2);
        assert_eq!(split.kernel.len(), 1);
        let v = &split.kernel[0];
        let g = extended_gcd(&v[0], &v[1]).0;
        assert!(g.is_one());
    }

    #[test]
    fn integer_solve_works_and_detects_unsolvable() {
        // 2x + 4y = 6 solvable; 2x + 4y = 3 not
        let rows = int_mat(&[&[2, 4]]);
        let sol = integer_solve(&rows, &[bi(6)], 2).unwrap();
        assert_eq!(&sol[0] * 2 + &sol[1] * 4, bi(6));
        assert!(integer_solve(&rows, &[bi(3)], 2).is_none());
    }

    #[test]
    fn inertia_of_hyperbolic_and_definite_forms() {
        let h = int_to_rat(&int_mat(&[&[0, 1], &[1, 0]]));
        assert_eq!(
            congruence_inertia(&h),
            Inertia { positive: 1, negative: 1, zero: 0 }
        );
        let d = int_to_rat(&int_mat(&[&[2, 0], &[0, -3]]));
        assert_eq!(
            congruence_inertia(&d),
            Inertia { positive: 1, negative: 1, zero: 0 }
        );
        let z = int_to_rat(&int_mat(&[&[0, 0], &[0, 5]]));
        assert_eq!(
            congruence_inertia(&z),
            Inertia { positive: 1, negative: 0, zero: 1 }
        );
    }

    #[test]
    fn ldlt_accepts_pd_rejects_others() {
        let pd = int_to_rat(&int_mat(&[&[2, 1], &[1, 2]]));
        let dec = ldlt_positive_definite(&pd).unwrap();
        assert!(dec.diag.iter().all(|d| d.is_positive()));
        let indef = int_to_rat(&int_mat(&[&[0, 1], &[1, 0]]));
        assert!(ldlt_positive_definite(&indef).is_none());
        let nd = int_to_rat(&int_mat(&[&[-2, 0], &[0, -2]]));
        assert!(ldlt_positive_definite(&nd).is_none());
    }

    #[test]
    fn inverse_roundtrip() {
        let m = int_to_rat(&int_mat(&[&[2, 1], &[1, 1]]));
        let inv = rational_inverse(&m).unwrap();
        let prod_00 = &m[0][0] * &inv[0][0] + &m[0][1] * &inv[1][0];
        assert_eq!(prod_00, BigRational::one());
        let sing = int_to_rat(&int_mat(&[&[1, 2], &[2, 4]]));
        assert!(rational_inverse(&sing).is_none());
    }

    #[test]
    fn lll_transform_is_unimodular_and_preserves_det() {
        let g = int_mat(&[&[10, 3, 1], &[3, 7, 2], &[1, 2, 5]]);
        let u = lll_unimodular(&g);
        assert!(bareiss_determinant(&u).abs().is_one());
        let gt = mat_mul_int(&mat_mul_int(&transpose(&u), &g), &u);
        assert_eq!(bareiss_determinant(&gt), bareiss_determinant(&g));
        // still positive definite
        assert!(ldlt_positive_definite(&int_to_rat(&gt)).is_some());
    }
}
