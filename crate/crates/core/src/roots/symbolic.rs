//! Symbolic proof that a one-parameter affine family of 3-planes is never
//! orthogonal to a root, for any real value of the parameter.
//!
//! Sampling can falsify but never prove the universal statement, so the
//! parameter `s` is handled symbolically with an explicit case split:
//!
//! * **rational `s`** — every orthogonality pairing splits by radicand
//!   into polynomials in `s` with integer linear-form coefficients. The
//!   parameter-free forms cut out a sublattice; each parameter-linear
//!   group `A(δ) + s·B(δ) = 0` contributes the integer consequence
//!   `A_j·B_k - A_k·B_j = 0` for every pair of groups (they share the
//!   same `s`). A small search then looks for rational multipliers `λ`
//!   making `Q + Σ λ·R` negative semidefinite, where `Q` is the
//!   restricted norm form; on the solution set this combination equals
//!   `Q = -2`, so emptiness of the definite part at norm -2 closes the
//!   branch — by a parity (even = odd) contradiction when one is visible,
//!   by certified enumeration otherwise.
//! * **irrational `s`** — only splits that stay valid for an arbitrary
//!   irrational (possibly multiquadratic!) value are applied: fully
//!   parameter-free pairings split by radicand, and pairings with purely
//!   rational coefficients split over `{1, s}`. The norm form restricted
//!   to the resulting sublattice is negative semidefinite; the finitely
//!   many norm -2 classes modulo its radical are checked one by one
//!   against the deferred pairings.
//!
//! Failure (a residual system the procedure cannot close, or an actual
//! witness) is a first-class outcome, not an error.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::lattice::{GramLattice, IntVector};
use crate::matrix::{self, RatMatrix};
use crate::multiquadratic::{MultiquadraticNumber, Radicand};
use crate::polynomial::ScalarPolynomial;
use crate::roots::enumerate;
use crate::PolyVector;

/// One machine-checkable deduction step.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum TraceStep {
    ConstraintTable {
        groups: Vec<GroupSummary>,
    },
    Branch {
        parameter_class: String,
    },
    ForcedZeroBlock {
        block: String,
        forced_by: Vec<FormProvenance>,
    },
    Kernel {
        context: String,
        forms: usize,
        rank: usize,
    },
    ParameterPairs {
        pairs: Vec<PairSummary>,
        note: String,
    },
    Multiplier {
        lambda: Vec<String>,
    },
    SemidefiniteDiagonal {
        diagonal: Vec<String>,
    },
    ResidualQuadratic {
        lhs_diag_coeffs: Vec<String>,
        lhs_vars: Vec<String>,
        lhs_cross_terms: usize,
        rhs: String,
        equation: String,
    },
    ParityContradiction {
        lhs_parity: String,
        rhs_parity: String,
        equation: String,
    },
    EnumerationEmpty {
        bound: String,
        rank: usize,
    },
    CandidateClasses {
        count: usize,
        radical_rank: usize,
    },
    CandidatesRejected {
        count: usize,
        reason: String,
    },
    BranchProved {
        parameter_class: String,
    },
    Note {
        text: String,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct GroupSummary {
    pub source: usize,
    pub radicand: Radicand,
    pub degrees: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairSummary {
    pub source: usize,
    pub radicand: Radicand,
    pub constant_form: String,
    pub linear_form: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct FormProvenance {
    pub source: usize,
    pub radicand: Radicand,
}

#[derive(Debug, Clone, Serialize)]
pub struct ObstructionTrace {
    pub steps: Vec<TraceStep>,
}

/// Witness surfaced by a failed proof: a concrete root together with the
/// parameter values at which it is orthogonal to the family.
#[derive(Debug, Clone, Serialize)]
pub struct SymbolicWitness {
    pub delta: IntVector,
    /// `None` means the root works for every parameter value in the
    /// branch it was found in.
    pub parameter: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ObstructionOutcome {
    pub proved: bool,
    pub trace: ObstructionTrace,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<SymbolicWitness>,
}

/// A pairing `<δ, w_i>` expanded by radicand: for each radicand, the
/// polynomial `Σ_k s^k · L_k(δ)` of integer linear forms, scaled by one
/// common denominator so the group faithfully represents the equation.
#[derive(Debug, Clone)]
struct FormGroup {
    source: usize,
    radicand: Radicand,
    /// index = power of s; zero forms are kept to preserve degrees.
    forms: Vec<Vec<BigInt>>,
}

impl FormGroup {
    fn max_degree(&self) -> usize {
        self.forms
            .iter()
            .enumerate()
            .rev()
            .find(|(_, f)| f.iter().any(|c| !c.is_zero()))
            .map(|(k, _)| k)
            .unwrap_or(0)
    }
}

fn build_groups(vectors: &[PolyVector], lat: &GramLattice) -> Vec<FormGroup> {
    use std::collections::BTreeSet;
    let mut out = Vec::new();
    for (source, w) in vectors.iter().enumerate() {
        let gw = lat.gram_times(w).expect("ambient rank");
        let max_deg = gw.coords.iter().filter_map(|p| p.degree()).max().unwrap_or(0);
        let mut radicands: BTreeSet<Radicand> = BTreeSet::new();
        for p in &gw.coords {
            for c in p.coefficients() {
                for (rad, _) in c.terms() {
                    radicands.insert(rad.clone());
                }
            }
        }
        for rad in radicands {
            // one common denominator across the whole group
            let mut denom_lcm = BigInt::one();
            for p in &gw.coords {
                for k in 0..=max_deg {
                    let q = p.coefficient(k).coefficient(&rad);
                    denom_lcm = denom_lcm.lcm(q.denom());
                }
            }
            let mut forms = Vec::new();
            for k in 0..=max_deg {
                let row: Vec<BigInt> = gw
                    .coords
                    .iter()
                    .map(|p| {
                        let q = p.coefficient(k).coefficient(&rad);
                        (q * BigRational::from(denom_lcm.clone())).to_integer()
                    })
                    .collect();
                forms.push(row);
            }
            while forms.len() > 1 && forms.last().map_or(false, |f| f.iter().all(|c| c.is_zero())) {
                forms.pop();
            }
            if forms.iter().all(|f| f.iter().all(|c| c.is_zero())) {
                continue;
            }
            out.push(FormGroup { source, radicand: rad, forms });
        }
    }
    out
}

/// Renders an integer vector as a combination of basis labels.
fn render_combination(coords: &[BigInt], lat: &GramLattice) -> String {
    let mut parts = Vec::new();
    for (i, c) in coords.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let label = lat.label(i);
        let part = if c.is_one() {
            label
        } else if (-c).is_one() {
            format!("-{label}")
        } else {
            format!("{c}*{label}")
        };
        parts.push(part);
    }
    if parts.is_empty() {
        return "0".into();
    }
    let mut s = parts[0].clone();
    for p in &parts[1..] {
        if let Some(stripped) = p.strip_prefix('-') {
            s.push_str(" - ");
            s.push_str(stripped);
        } else {
            s.push_str(" + ");
            s.push_str(p);
        }
    }
    s
}

/// Renders a linear form on δ-coordinates, e.g. `d[u] + 2*d[v]`.
fn render_form(coeffs: &[BigInt], lat: &GramLattice) -> String {
    let mut parts = Vec::new();
    for (i, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let label = format!("d[{}]", lat.label(i));
        let part = if c.is_one() {
            label
        } else if (-c).is_one() {
            format!("-{label}")
        } else {
            format!("{c}*{label}")
        };
        parts.push(part);
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ").replace("+ -", "- ")
    }
}

const LAMBDA_CANDIDATES: [(i64, i64); 21] = [
    (0, 1),
    (1, 1),
    (-1, 1),
    (2, 1),
    (-2, 1),
    (3, 1),
    (-3, 1),
    (4, 1),
    (-4, 1),
    (1, 2),
    (-1, 2),
    (3, 2),
    (-3, 2),
    (5, 1),
    (-5, 1),
    (6, 1),
    (-6, 1),
    (8, 1),
    (-8, 1),
    (5, 2),
    (-5, 2),
];

/// Entry point: attempt a symbolic proof that no root is orthogonal to
/// the family spanned by `vectors` (polynomials in one parameter) for any
/// real parameter value.
pub fn prove_no_roots(vectors: &[PolyVector], lat: &GramLattice) -> ObstructionOutcome {
    let mut steps = Vec::new();
    let groups = build_groups(vectors, lat);
    steps.push(TraceStep::ConstraintTable {
        groups: groups
            .iter()
            .map(|g| GroupSummary {
                source: g.source,
                radicand: g.radicand.clone(),
                degrees: (0..g.forms.len())
                    .filter(|&k| g.forms[k].iter().any(|c| !c.is_zero()))
                    .collect(),
            })
            .collect(),
    });

    let rational = prove_rational_branch(vectors, lat, &groups, &mut steps);
    let irrational = prove_irrational_branch(vectors, lat, &groups, &mut steps);

    let proved = rational.proved && irrational.proved;
    let residual = match (&rational.residual, &irrational.residual) {
        (None, None) => None,
        (a, b) => {
            let mut parts = Vec::new();
            if let Some(r) = a {
                parts.push(format!("rational branch: {r}"));
            }
            if let Some(r) = b {
                parts.push(format!("irrational branch: {r}"));
            }
            Some(parts.join("; "))
        }
    };
    let witness = rational.witness.or(irrational.witness);
    ObstructionOutcome {
        proved,
        trace: ObstructionTrace { steps },
        residual,
        witness,
    }
}

struct BranchResult {
    proved: bool,
    residual: Option<String>,
    witness: Option<SymbolicWitness>,
}

impl BranchResult {
    fn proved() -> Self {
        Self { proved: true, residual: None, witness: None }
    }
    fn failed(residual: String, witness: Option<SymbolicWitness>) -> Self {
        Self { proved: false, residual: Some(residual), witness }
    }
}

// ---------------------------------------------------------------------
// rational branch
// ---------------------------------------------------------------------

fn prove_rational_branch(
    _vectors: &[PolyVector],
    lat: &GramLattice,
    groups: &[FormGroup],
    steps: &mut Vec<TraceStep>,
) -> BranchResult {
    steps.push(TraceStep::Branch { parameter_class: "rational".into() });

    let mut plain: Vec<Vec<BigInt>> = Vec::new();
    let mut plain_prov: Vec<FormProvenance> = Vec::new();
    let mut pairs: Vec<(FormGroup, Vec<BigInt>, Vec<BigInt>)> = Vec::new(); // (group, A, B)
    for g in groups {
        match g.max_degree() {
            0 => {
                plain.push(g.forms[0].clone());
                plain_prov.push(FormProvenance { source: g.source, radicand: g.radicand.clone() });
            }
            1 => {
                let a = g.forms[0].clone();
                let b = g.forms[1].clone();
                pairs.push((g.clone(), a, b));
            }
            d => {
                return BranchResult::failed(
                    format!(
                        "pairing of vector #{} at radicand {:?} has degree {d} in the parameter; \
                         only affine parameter dependence is supported",
                        g.source, g.radicand
                    ),
                    None,
                );
            }
        }
    }

    let split = matrix::column_kernel_split(&plain, lat.rank);
    let basis: Vec<IntVector> = split
        .kernel
        .iter()
        .map(|c| IntVector { coords: c.clone() })
        .collect();
    steps.push(TraceStep::Kernel {
        context: "parameter-free forms (rational branch)".into(),
        forms: plain.len(),
        rank: basis.len(),
    });
    record_forced_blocks(&basis, &plain, &plain_prov, lat, steps);

    if basis.is_empty() {
        steps.push(TraceStep::BranchProved { parameter_class: "rational".into() });
        return BranchResult::proved();
    }

    // restricted norm form and restricted pair forms
    let q0 = super::restricted_gram(&basis, lat);
    let restrict = |form: &[BigInt]| -> Vec<BigInt> {
        basis
            .iter()
            .map(|b| form.iter().zip(&b.coords).map(|(f, x)| f * x).sum())
            .collect()
    };
    let pair_forms: Vec<(usize, Vec<BigInt>, Vec<BigInt>)> = pairs
        .iter()
        .map(|(g, a, b)| (g.source, restrict(a), restrict(b)))
        .collect();

    if !pairs.is_empty() {
        let pair_sources: Vec<usize> = pairs.iter().map(|(g, _, _)| g.source).collect();
        let plain_sources: Vec<usize> = {
            let mut v: Vec<usize> = plain_prov
                .iter()
                .map(|p| p.source)
                .filter(|s| !pair_sources.contains(s))
                .collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        steps.push(TraceStep::ParameterPairs {
            pairs: pairs
                .iter()
                .map(|(g, a, b)| PairSummary {
                    source: g.source,
                    radicand: g.radicand.clone(),
                    constant_form: render_form(a, lat),
                    linear_form: render_form(b, lat),
                })
                .collect(),
            note: format!(
                "parameter-linear terms occur in the pairings with vectors {:?}; \
                 the pairings with vectors {:?} are parameter-free",
                pair_sources, plain_sources
            ),
        });
    }

    if pair_forms.is_empty() {
        // no parameter dependence left: decide by direct enumeration
        return close_branch_by_enumeration(&basis, &q0, lat, "rational", steps);
    }

    // resultant quadrics A_j B_k - A_k B_j on the kernel coordinates
    let r = basis.len();
    let mut resultants: Vec<RatMatrix> = Vec::new();
    for j in 0..pair_forms.len() {
        for k in j + 1..pair_forms.len() {
            let (_, aj, bj) = &pair_forms[j];
            let (_, ak, bk) = &pair_forms[k];
            let mut m = vec![vec![BigRational::zero(); r]; r];
            let half = BigRational::new(BigInt::one(), BigInt::from(2));
            for p in 0..r {
                for q in 0..r {
                    let v = &aj[p] * &bk[q] + &aj[q] * &bk[p] - &ak[p] * &bj[q] - &ak[q] * &bj[p];
                    m[p][q] = BigRational::from(v) * &half;
                }
            }
            resultants.push(m);
        }
    }

    // search rational multipliers making Q + Σ λ R negative semidefinite
    let lambda_tuples = multiplier_tuples(resultants.len());
    let q0r = matrix::int_to_rat(&q0);
    let mut first_residual: Option<String> = None;
    for tuple in &lambda_tuples {
        let mut g = q0r.clone();
        for (lam, m) in tuple.iter().zip(&resultants) {
            for p in 0..r {
                for q in 0..r {
                    let t = lam * &m[p][q];
                    g[p][q] += t;
                }
            }
        }
        let inertia = matrix::congruence_inertia(&g);
        if inertia.positive > 0 {
            continue;
        }
        // scale to an integer matrix
        let mut denom_lcm = BigInt::one();
        for row in &g {
            for e in row {
                denom_lcm = denom_lcm.lcm(e.denom());
            }
        }
        let gi: Vec<Vec<BigInt>> = g
            .iter()
            .map(|row| {
                row.iter()
                    .map(|e| (e * BigRational::from(denom_lcm.clone())).to_integer())
                    .collect()
            })
            .collect();
        // radical of the combined form, then its definite part
        let rad_split = matrix::column_kernel_split(&gi, r);
        let comp = &rad_split.complement;
        let dim = comp.len();
        let mut gp = vec![vec![BigInt::zero(); dim]; dim];
        for p in 0..dim {
            for q in 0..dim {
                let mut acc = BigInt::zero();
                for a in 0..r {
                    for b in 0..r {
                        acc += &comp[p][a] * &gi[a][b] * &comp[q][b];
                    }
                }
                gp[p][q] = acc;
            }
        }
        let neg_gp: Vec<Vec<BigInt>> = gp.iter().map(|row| row.iter().map(|x| -x).collect()).collect();
        if matrix::ldlt_positive_definite(&matrix::int_to_rat(&neg_gp)).is_none() {
            continue;
        }
        let target = BigInt::from(2) * &denom_lcm; // (-G)(y) = 2µ
        let sols = if dim == 0 {
            Vec::new()
        } else {
            enumerate::vectors_of_norm(&neg_gp, &target)
        };
        if !sols.is_empty() {
            if first_residual.is_none() {
                first_residual = Some(format!(
                    "with multipliers {:?} the combined form is negative semidefinite but the \
                     residual equation has {} integer solution classes",
                    tuple.iter().map(crate::encode::rational_to_string).collect::<Vec<_>>(),
                    sols.len()
                ));
            }
            continue;
        }
        // proof complete; present the residual equation
        steps.push(TraceStep::Multiplier {
            lambda: tuple.iter().map(crate::encode::rational_to_string).collect(),
        });
        let diag = matrix::congruence_inertia(&g);
        steps.push(TraceStep::SemidefiniteDiagonal {
            diagonal: vec![format!(
                "inertia: {} negative, {} zero, 0 positive",
                diag.negative, diag.zero
            )],
        });
        present_residual(&neg_gp, &target, comp, &basis, lat, steps);
        steps.push(TraceStep::BranchProved { parameter_class: "rational".into() });
        return BranchResult::proved();
    }

    BranchResult::failed(
        first_residual.unwrap_or_else(|| {
            "no rational multiplier in the search set makes the combined quadric negative \
             semidefinite"
                .into()
        }),
        None,
    )
}

fn multiplier_tuples(n: usize) -> Vec<Vec<BigRational>> {
    let lams: Vec<BigRational> = LAMBDA_CANDIDATES
        .iter()
        .map(|&(p, q)| BigRational::new(BigInt::from(p), BigInt::from(q)))
        .collect();
    match n {
        0 => vec![Vec::new()],
        1 => lams.iter().map(|l| vec![l.clone()]).collect(),
        2 => {
            let mut out = Vec::new();
            for a in &lams {
                for b in &lams {
                    out.push(vec![a.clone(), b.clone()]);
                }
            }
            out
        }
        // beyond two resultants only scan the diagonal λ·(1,..,1)
        _ => lams.iter().map(|l| vec![l.clone(); n]).collect(),
    }
}

/// Emits the normalized residual equation `lhs(y) = rhs` and, when the
/// left side is visibly even against an odd right side, the parity step.
fn present_residual(
    neg_gp: &[Vec<BigInt>],
    target: &BigInt,
    comp: &[Vec<BigInt>],
    basis: &[IntVector],
    lat: &GramLattice,
    steps: &mut Vec<TraceStep>,
) {
    let dim = neg_gp.len();
    // normalize by the gcd of all matrix entries and the target
    let mut g0 = target.clone();
    for row in neg_gp {
        for e in row {
            g0 = g0.gcd(e);
        }
    }
    if g0.is_zero() {
        g0 = BigInt::one();
    }
    let norm_m: Vec<Vec<BigInt>> = neg_gp
        .iter()
        .map(|row| row.iter().map(|e| e / &g0).collect())
        .collect();
    let rhs = target / &g0;
    // ambient renderings of the residual variables
    let vars: Vec<String> = comp
        .iter()
        .map(|c| {
            let mut ambient = vec![BigInt::zero(); lat.rank];
            for (coef, b) in c.iter().zip(basis) {
                if coef.is_zero() {
                    continue;
                }
                for (a, x) in ambient.iter_mut().zip(&b.coords) {
                    *a += coef * x;
                }
            }
            render_combination(&ambient, lat)
        })
        .collect();
    let mut cross = 0usize;
    for p in 0..dim {
        for q in p + 1..dim {
            if !norm_m[p][q].is_zero() {
                cross += 1;
            }
        }
    }
    let mut eq_parts = Vec::new();
    for p in 0..dim {
        if !norm_m[p][p].is_zero() {
            eq_parts.push(format!("{}*d[{}]^2", norm_m[p][p], vars[p]));
        }
        for q in p + 1..dim {
            if !norm_m[p][q].is_zero() {
                let c = &norm_m[p][q] * BigInt::from(2);
                eq_parts.push(format!("{}*d[{}]*d[{}]", c, vars[p], vars[q]));
            }
        }
    }
    let equation = format!("{} = {}", eq_parts.join(" + "), rhs);
    steps.push(TraceStep::ResidualQuadratic {
        lhs_diag_coeffs: (0..dim).map(|p| norm_m[p][p].to_string()).collect(),
        lhs_vars: vars,
        lhs_cross_terms: cross,
        rhs: rhs.to_string(),
        equation: equation.clone(),
    });
    // parity: all entries even forces even values; odd right side closes it
    let two = BigInt::from(2);
    let all_even = norm_m
        .iter()
        .all(|row| row.iter().all(|e| (e % &two).is_zero()));
    let rhs_odd = !(&rhs % &two).is_zero();
    if all_even && rhs_odd {
        steps.push(TraceStep::ParityContradiction {
            lhs_parity: "even".into(),
            rhs_parity: "odd".into(),
            equation,
        });
    } else {
        steps.push(TraceStep::EnumerationEmpty {
            bound: rhs.to_string(),
            rank: dim,
        });
    }
}

fn close_branch_by_enumeration(
    basis: &[IntVector],
    q0: &[Vec<BigInt>],
    lat: &GramLattice,
    class: &str,
    steps: &mut Vec<TraceStep>,
) -> BranchResult {
    let neg: Vec<Vec<BigInt>> = q0.iter().map(|row| row.iter().map(|x| -x).collect()).collect();
    if matrix::ldlt_positive_definite(&matrix::int_to_rat(&neg)).is_none() {
        return BranchResult::failed(
            format!(
                "no parameter-linear constraints remain and the restricted form of rank {} is \
                 not negative definite; the root condition cannot be decided by enumeration",
                basis.len()
            ),
            None,
        );
    }
    let sols = enumerate::vectors_of_norm(&neg, &BigInt::from(2));
    if sols.is_empty() {
        steps.push(TraceStep::EnumerationEmpty { bound: "2".into(), rank: basis.len() });
        steps.push(TraceStep::BranchProved { parameter_class: class.into() });
        return BranchResult::proved();
    }
    let delta = ambient_vector(&sols[0], basis, lat.rank);
    BranchResult::failed(
        format!(
            "{} roots are orthogonal to the family for every {} parameter value",
            sols.len(),
            class
        ),
        Some(SymbolicWitness { delta, parameter: None }),
    )
}

fn ambient_vector(coords: &[BigInt], basis: &[IntVector], rank: usize) -> IntVector {
    let mut ambient = vec![BigInt::zero(); rank];
    for (c, b) in coords.iter().zip(basis) {
        if c.is_zero() {
            continue;
        }
        for (a, x) in ambient.iter_mut().zip(&b.coords) {
            *a += c * x;
        }
    }
    IntVector { coords: ambient }
}

/// Records, per labeled block of the K3 lattice, when the parameter-free
/// forms pin the whole block to zero.
fn record_forced_blocks(
    basis: &[IntVector],
    plain: &[Vec<BigInt>],
    prov: &[FormProvenance],
    lat: &GramLattice,
    steps: &mut Vec<TraceStep>,
) {
    if lat.rank != crate::lattice::K3_RANK {
        return;
    }
    let blocks = [
        ("e8a", crate::lattice::FIRST_E8_OFFSET, crate::lattice::SECOND_E8_OFFSET),
        ("e8b", crate::lattice::SECOND_E8_OFFSET, crate::lattice::K3_RANK),
    ];
    for (name, lo, hi) in blocks {
        let forced = basis
            .iter()
            .all(|b| b.coords[lo..hi].iter().all(|c| c.is_zero()));
        if !forced {
            continue;
        }
        let forced_by: Vec<FormProvenance> = plain
            .iter()
            .zip(prov)
            .filter(|(form, _)| {
                let support_in_block = form[lo..hi].iter().any(|c| !c.is_zero());
                let support_outside = form
                    .iter()
                    .enumerate()
                    .any(|(i, c)| !c.is_zero() && (i < lo || i >= hi));
                support_in_block && !support_outside
            })
            .map(|(_, p)| p.clone())
            .collect();
        steps.push(TraceStep::ForcedZeroBlock {
            block: name.into(),
            forced_by,
        });
    }
}

// ---------------------------------------------------------------------
// irrational branch
// ---------------------------------------------------------------------

fn prove_irrational_branch(
    vectors: &[PolyVector],
    lat: &GramLattice,
    groups: &[FormGroup],
    steps: &mut Vec<TraceStep>,
) -> BranchResult {
    steps.push(TraceStep::Branch { parameter_class: "irrational".into() });

    // classify whole source equations
    let n_sources = vectors.len();
    let mut source_max_deg = vec![0usize; n_sources];
    let mut source_has_irrational = vec![false; n_sources];
    for g in groups {
        source_max_deg[g.source] = source_max_deg[g.source].max(g.max_degree());
        if !g.radicand.is_empty() {
            source_has_irrational[g.source] = true;
        }
    }
    let mut collected: Vec<Vec<BigInt>> = Vec::new();
    let mut deferred: Vec<usize> = Vec::new();
    for source in 0..n_sources {
        let sgroups: Vec<&FormGroup> = groups.iter().filter(|g| g.source == source).collect();
        if sgroups.is_empty() {
            continue;
        }
        if source_max_deg[source] == 0 {
            // parameter-free equation: split by radicand unconditionally
            for g in &sgroups {
                collected.push(g.forms[0].clone());
            }
        } else if !source_has_irrational[source] && source_max_deg[source] <= 1 {
            // purely rational coefficients, affine in s: {1, s} split is
            // valid for every irrational s
            for g in &sgroups {
                for f in &g.forms {
                    if f.iter().any(|c| !c.is_zero()) {
                        collected.push(f.clone());
                    }
                }
            }
        } else {
            deferred.push(source);
        }
    }

    let split = matrix::column_kernel_split(&collected, lat.rank);
    let basis: Vec<IntVector> = split
        .kernel
        .iter()
        .map(|c| IntVector { coords: c.clone() })
        .collect();
    steps.push(TraceStep::Kernel {
        context: "splittable forms (irrational branch)".into(),
        forms: collected.len(),
        rank: basis.len(),
    });
    if basis.is_empty() {
        steps.push(TraceStep::BranchProved { parameter_class: "irrational".into() });
        return BranchResult::proved();
    }

    let q2 = super::restricted_gram(&basis, lat);
    let inertia = matrix::congruence_inertia(&matrix::int_to_rat(&q2));
    if inertia.positive > 0 {
        return BranchResult::failed(
            format!(
                "the norm form restricted to the splittable kernel (rank {}) has {} positive \
                 directions; the candidate set is infinite",
                basis.len(),
                inertia.positive
            ),
            None,
        );
    }

    // radical and definite part
    let r = basis.len();
    let rad_split = matrix::column_kernel_split(&q2, r);
    let radical = &rad_split.kernel;
    let comp = &rad_split.complement;
    let dim = comp.len();
    let mut qp = vec![vec![BigInt::zero(); dim]; dim];
    for p in 0..dim {
        for q in 0..dim {
            let mut acc = BigInt::zero();
            for a in 0..r {
                for b in 0..r {
                    acc += &comp[p][a] * &q2[a][b] * &comp[q][b];
                }
            }
            qp[p][q] = acc;
        }
    }
    let neg_qp: Vec<Vec<BigInt>> = qp.iter().map(|row| row.iter().map(|x| -x).collect()).collect();
    if matrix::ldlt_positive_definite(&matrix::int_to_rat(&neg_qp)).is_none() {
        return BranchResult::failed(
            "definite part of the restricted norm form failed its certificate".into(),
            None,
        );
    }
    let classes = if dim == 0 {
        Vec::new()
    } else {
        enumerate::vectors_of_norm(&neg_qp, &BigInt::from(2))
    };
    steps.push(TraceStep::CandidateClasses {
        count: classes.len(),
        radical_rank: radical.len(),
    });
    if classes.is_empty() {
        steps.push(TraceStep::BranchProved { parameter_class: "irrational".into() });
        return BranchResult::proved();
    }

    // ambient radical directions (free integer coordinates in each class)
    let radical_dirs: Vec<IntVector> = radical
        .iter()
        .map(|c| ambient_vector(c, &basis, lat.rank))
        .collect();

    let mut rejected = 0usize;
    let mut reject_reasons: Vec<String> = Vec::new();
    for class in &classes {
        // class representative in ambient coordinates
        let comp_ambient: Vec<IntVector> = comp
            .iter()
            .map(|c| ambient_vector(c, &basis, lat.rank))
            .collect();
        let delta0 = {
            let mut acc = IntVector::zero(lat.rank);
            for (c, b) in class.iter().zip(&comp_ambient) {
                for (a, x) in acc.coords.iter_mut().zip(&b.coords) {
                    *a += c * x;
                }
            }
            acc
        };
        match check_class(&delta0, &radical_dirs, &deferred, vectors, lat) {
            ClassVerdict::Rejected(reason) => {
                rejected += 1;
                if reject_reasons.len() < 3 && !reject_reasons.contains(&reason) {
                    reject_reasons.push(reason);
                }
            }
            ClassVerdict::Witness { delta, parameter } => {
                return BranchResult::failed(
                    "a candidate class satisfies every deferred pairing".into(),
                    Some(SymbolicWitness { delta, parameter }),
                );
            }
            ClassVerdict::Undecided(reason) => {
                return BranchResult::failed(reason, None);
            }
        }
    }
    steps.push(TraceStep::CandidatesRejected {
        count: rejected,
        reason: reject_reasons.join("; "),
    });
    steps.push(TraceStep::BranchProved { parameter_class: "irrational".into() });
    BranchResult::proved()
}

enum ClassVerdict {
    Rejected(String),
    Witness { delta: IntVector, parameter: Option<String> },
    Undecided(String),
}

/// Decides whether some `δ = delta0 + Σ t_j·radical_j` (integer `t`) and
/// some irrational `s` satisfy every deferred pairing.
fn check_class(
    delta0: &IntVector,
    radical_dirs: &[IntVector],
    deferred: &[usize],
    vectors: &[PolyVector],
    lat: &GramLattice,
) -> ClassVerdict {
    if deferred.is_empty() {
        return ClassVerdict::Witness { delta: delta0.clone(), parameter: None };
    }
    // the pairing of δ with w_i, as affine data in t:
    //   p(s) + Σ t_j q_j(s), polynomials in s with multiquadratic coeffs
    let pair = |v: &IntVector, w: &PolyVector| -> ScalarPolynomial {
        let vp: PolyVector = v.to_scalar();
        lat.inner(&vp, w).expect("ambient rank")
    };

    if radical_dirs.is_empty() {
        // fully concrete: intersect the solution sets over s
        let mut pinned: Option<MultiquadraticNumber> = None;
        for &i in deferred {
            let p = pair(delta0, &vectors[i]);
            if p.degree().map_or(0, |d| d) > 1 {
                return ClassVerdict::Undecided(format!(
                    "deferred pairing with vector #{i} has degree > 1 in the parameter"
                ));
            }
            let c0 = p.coefficient(0);
            let c1 = p.coefficient(1);
            if c1.is_zero_value() {
                if !c0.is_zero_value() {
                    return ClassVerdict::Rejected(format!(
                        "pairing with vector #{i} is the nonzero constant {c0}"
                    ));
                }
                continue; // identically satisfied
            }
            let s_star = (-c0) * c1.inv().expect("nonzero");
            match &pinned {
                None => pinned = Some(s_star),
                Some(prev) if *prev == s_star => {}
                Some(_) => {
                    return ClassVerdict::Rejected(
                        "deferred pairings pin the parameter to two different values".into(),
                    )
                }
            }
        }
        match pinned {
            None => ClassVerdict::Witness { delta: delta0.clone(), parameter: None },
            Some(s_star) => {
                if s_star.is_rational() {
                    ClassVerdict::Rejected(format!(
                        "the pinned parameter value {s_star} is rational, contradicting the branch"
                    ))
                } else {
                    ClassVerdict::Witness {
                        delta: delta0.clone(),
                        parameter: Some(s_star.to_string()),
                    }
                }
            }
        }
    } else {
        // affine in the radical coordinates t; supported shape: every
        // deferred pairing parameter-linear coefficient vanishes
        // identically on the class, leaving a parameter-free affine
        // system over t that splits by radicand.
        let mut rows: Vec<Vec<BigInt>> = Vec::new();
        let mut rhs: Vec<BigInt> = Vec::new();
        for &i in deferred {
            let p0 = pair(delta0, &vectors[i]);
            if p0.degree().map_or(0, |d| d) > 1 {
                return ClassVerdict::Undecided(format!(
                    "deferred pairing with vector #{i} has degree > 1 in the parameter"
                ));
            }
            let qs: Vec<ScalarPolynomial> =
                radical_dirs.iter().map(|d| pair(d, &vectors[i])).collect();
            let lin_const = p0.coefficient(1);
            let lin_dirs_zero = qs.iter().all(|q| q.coefficient(1).is_zero_value());
            if !lin_const.is_zero_value() || !lin_dirs_zero {
                return ClassVerdict::Undecided(format!(
                    "deferred pairing with vector #{i} stays parameter-dependent on a class \
                     with free radical coordinates"
                ));
            }
            // parameter-free equation: γ0 + Σ t_j β0_j = 0, split by radicand
            let gamma = p0.coefficient(0);
            let betas: Vec<MultiquadraticNumber> =
                qs.iter().map(|q| q.coefficient(0)).collect();
            let mut radicands: std::collections::BTreeSet<Radicand> =
                gamma.terms().map(|(rad, _)| rad.clone()).collect();
            for b in &betas {
                for (rad, _) in b.terms() {
                    radicands.insert(rad.clone());
                }
            }
            for rad in radicands {
                let gq = gamma.coefficient(&rad);
                let bqs: Vec<BigRational> = betas.iter().map(|b| b.coefficient(&rad)).collect();
                let mut denom_lcm = gq.denom().clone();
                for b in &bqs {
                    denom_lcm = denom_lcm.lcm(b.denom());
                }
                let scale = BigRational::from(denom_lcm);
                rows.push(bqs.iter().map(|b| (b * &scale).to_integer()).collect());
                rhs.push((-gq * &scale).to_integer());
            }
        }
        match matrix::integer_solve(&rows, &rhs, radical_dirs.len()) {
            Some(t) => {
                let mut delta = delta0.clone();
                for (c, d) in t.iter().zip(radical_dirs) {
                    for (a, x) in delta.coords.iter_mut().zip(&d.coords) {
                        *a += c * x;
                    }
                }
                ClassVerdict::Witness { delta, parameter: None }
            }
            None => ClassVerdict::Rejected(
                "the parameter-free part of a deferred pairing has no integer solution over \
                 the class (an irrational component cannot be cancelled by integers)"
                    .into(),
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{self, k3_lattice, ScalarVector};
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
    fn trivial_family_fails_with_witness() {
        let lat = k3_lattice();
        let vectors = vec![
            poly_comb(&[(1, lattice::U), (1, lattice::V)]),
            poly_comb(&[(1, lattice::X), (1, lattice::Y)]),
            poly_comb(&[(1, lattice::Z), (1, lattice::T)]),
        ];
        let out = prove_no_roots(&vectors, &lat);
        assert!(!out.proved);
        assert!(out.witness.is_some());
        let w = out.witness.unwrap();
        assert_eq!(lat.inner_int(&w.delta, &w.delta).unwrap(), BigInt::from(-2));
    }

    #[test]
    fn render_helpers() {
        let lat = k3_lattice();
        let mut c = vec![BigInt::zero(); 22];
        c[lattice::U] = BigInt::from(-2);
        c[lattice::V] = BigInt::one();
        assert_eq!(render_combination(&c, &lat), "-2*u + v");
        assert_eq!(render_form(&c, &lat), "-2*d[u] + d[v]");
    }
}
