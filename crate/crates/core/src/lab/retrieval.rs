//! Phase and norm retrieval over ℝ by sign-pattern enumeration.
//!
//! `|Ax| = |Ay|` entrywise iff `diag(ε) A x = A y` for some `ε ∈ {±1}^n`,
//! so the solution set is the union of the kernels
//! `K_ε = ker [diag(ε) A, −A]`. Patterns are taken with `ε_0 = +1` since
//! `K_{−ε}` is the reflection `(x, y) ↦ (x, −y)` of `K_ε`.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{problems, SearchBudget, SearchReport, SearchStatus, Strategy, Tracker, Witness};
use crate::error::{LabError, Result};
use crate::frames::Pasf;
use crate::linalg;
use crate::lp::{self, signed_permutations, Exponent, Matrix, Vector};

/// Largest `n` for sign enumeration.
pub const RETRIEVAL_MAX_N: usize = 20;
/// Largest `d` for the signed-permutation search in norm retrieval.
const NORM_SEARCH_MAX_D: usize = 6;
const SAMPLES: usize = 256;
const TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RetrievalSide {
    /// `x ∈ X` measured by `|f_j(x)|`.
    Vector,
    /// `φ ∈ X*` measured by `|φ(τ_j)|`.
    Functional,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RetrievalKind {
    Phase,
    Norm,
}

/// Rows of `Kᵀ` in reduced row-echelon form: a basis of `K` that does not
/// depend on the SVD that produced it.
fn canonical_basis(k: &Matrix) -> Vec<Vector> {
    let mut m = k.transpose();
    let (rows, cols) = m.shape();
    let mut lead = 0;
    for c in 0..cols {
        if lead == rows {
            break;
        }
        let pivot = (lead..rows)
            .max_by(|&a, &b| m[(a, c)].abs().total_cmp(&m[(b, c)].abs()))
            .expect("nonempty");
        if m[(pivot, c)].abs() <= TOL {
            continue;
        }
        m.swap_rows(pivot, lead);
        let pv = m[(lead, c)];
        for j in 0..cols {
            m[(lead, j)] /= pv;
        }
        for i in 0..rows {
            if i != lead {
                let factor = m[(i, c)];
                if factor != 0.0 {
                    for j in 0..cols {
                        m[(i, j)] -= factor * m[(lead, j)];
                    }
                }
            }
        }
        lead += 1;
    }
    // Snap rounding noise so integer kernels come out exactly.
    for x in m.iter_mut() {
        if (*x - x.round()).abs() <= 1e-12 {
            *x = x.round();
        }
    }
    (0..lead).map(|i| m.row(i).transpose()).collect()
}

fn split(v: &Vector, d: usize) -> (Vector, Vector) {
    (v.rows(0, d).into_owned(), v.rows(d, d).into_owned())
}

fn amax(v: &Vector) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

fn is_trivial(x: &Vector, y: &Vector) -> bool {
    amax(&(y - x)) <= TOL * 10.0 || amax(&(y + x)) <= TOL * 10.0
}

fn scaled(x: Vector, y: Vector) -> (Vec<f64>, Vec<f64>) {
    let s = if amax(&x) > 0.0 { amax(&x) } else { amax(&y) };
    ((x / s).as_slice().to_vec(), (y / s).as_slice().to_vec())
}

fn pattern(key: u64, n: usize) -> Vec<i8> {
    (0..n)
        .map(|j| if j > 0 && key >> (n - 1 - j) & 1 == 1 { -1 } else { 1 })
        .collect()
}

fn kernel(a: &Matrix, eps: &[i8]) -> Matrix {
    let (n, d) = a.shape();
    let mut m = DMatrix::zeros(n, 2 * d);
    for i in 0..n {
        for j in 0..d {
            m[(i, j)] = eps[i] as f64 * a[(i, j)];
            m[(i, d + j)] = -a[(i, j)];
        }
    }
    linalg::null_space(&m)
}

/// Runs the sign-pattern procedure on `A = F` (vector side, norm `r`) or
/// `A = Tᵀ` (functional side, dual norm).
pub fn retrieval_check(
    pair: &Pasf,
    side: RetrievalSide,
    kind: RetrievalKind,
    budget: &SearchBudget,
) -> Result<SearchReport> {
    let n = pair.n();
    if n > RETRIEVAL_MAX_N {
        return Err(LabError::Budget(format!(
            "sign enumeration limited to n <= {RETRIEVAL_MAX_N}, got {n}"
        )));
    }
    let (a, norm) = match side {
        RetrievalSide::Vector => (pair.f().clone(), pair.r()),
        RetrievalSide::Functional => (pair.t().transpose(), pair.r().dual()),
    };
    let d = a.ncols();
    let tracker = Tracker::new(budget);
    let problem = match kind {
        RetrievalKind::Phase => problems::PHASE_RETRIEVAL,
        RetrievalKind::Norm => problems::NORM_RETRIEVAL,
    };
    let mut notes = vec![format!("{side:?} side, norm exponent {norm}").to_lowercase()];

    if kind == RetrievalKind::Norm {
        let ker = linalg::null_space(&a);
        if ker.ncols() > 0 {
            let y = linalg::canonical_sign(ker.column(0).into_owned());
            let (x, y) = scaled(DVector::zeros(d), y);
            notes.push("measurement map has a kernel: x = 0 and y in the kernel agree on every measurement".into());
            return Ok(tracker.report(
                problem,
                SearchStatus::RefutedWithWitness,
                Witness::RetrievalCounterexample {
                    x,
                    y,
                    sign_pattern: vec![1; n],
                },
                Strategy::Exhaustive,
                budget.seed,
                notes,
            ));
        }
    }

    let isometries: Option<Vec<Matrix>> = if kind == RetrievalKind::Norm && !norm.is_two() && d <= NORM_SEARCH_MAX_D {
        Some(signed_permutations(d)?.map(|q| q.matrix()).collect())
    } else {
        None
    };
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let total = 1u64 << (n - 1);
    let mut certified = 0u64;
    let mut checked = 0u64;
    for key in 0..total {
        if !tracker.tick(1) {
            break;
        }
        checked += 1;
        let eps = pattern(key, n);
        let k = kernel(&a, &eps);
        let basis = canonical_basis(&k);
        if basis.is_empty() {
            certified += 1;
            continue;
        }
        let graph_ok = |sign: f64| basis.iter().all(|v| {
            let (x, y) = split(v, d);
            amax(&(y - x * sign)) <= TOL * 10.0
        });
        if graph_ok(1.0) || graph_ok(-1.0) {
            certified += 1;
            continue;
        }
        match kind {
            RetrievalKind::Phase => {
                let (x, y) = phase_witness(&basis, d);
                let (x, y) = scaled(x, y);
                return Ok(tracker.report(
                    problem,
                    SearchStatus::RefutedWithWitness,
                    Witness::RetrievalCounterexample { x, y, sign_pattern: eps },
                    Strategy::Exhaustive,
                    budget.seed,
                    notes,
                ));
            }
            RetrievalKind::Norm => match norm_pattern(&basis, d, norm, isometries.as_deref(), &mut rng) {
                NormVerdict::Certified => certified += 1,
                NormVerdict::Unknown => {}
                NormVerdict::Counterexample(x, y) => {
                    let (x, y) = scaled(x, y);
                    return Ok(tracker.report(
                        problem,
                        SearchStatus::RefutedWithWitness,
                        Witness::RetrievalCounterexample { x, y, sign_pattern: eps },
                        Strategy::Exhaustive,
                        budget.seed,
                        notes,
                    ));
                }
            },
        }
    }
    let status = if checked == total && certified == total {
        SearchStatus::HoldsWithWitness
    } else {
        if checked < total {
            notes.push("budget exhausted before all sign patterns were examined".into());
        }
        if certified < checked {
            notes.push(format!(
                "{} sign patterns neither certified nor falsified",
                checked - certified
            ));
        }
        SearchStatus::ExhaustedInconclusive
    };
    Ok(tracker.report(
        problem,
        status,
        Witness::RetrievalCertificate {
            patterns_checked: checked,
            certified_patterns: certified,
        },
        Strategy::Exhaustive,
        budget.seed,
        notes,
    ))
}

/// A kernel element with `y ≠ ±x`: a basis vector if one works, else the
/// sum of a basis vector on `{y = x}` and one on `{y = −x}`.
fn phase_witness(basis: &[Vector], d: usize) -> (Vector, Vector) {
    for v in basis {
        let (x, y) = split(v, d);
        if !is_trivial(&x, &y) {
            return (x, y);
        }
    }
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            let (x, y) = split(&(&basis[i] + &basis[j]), d);
            if !is_trivial(&x, &y) {
                return (x, y);
            }
        }
    }
    unreachable!("a kernel not contained in either graph has a nontrivial element")
}

enum NormVerdict {
    Certified,
    Unknown,
    Counterexample(Vector, Vector),
}

/// Decides `‖y‖ = ‖x‖` on the span of `basis` (pairs `(x, y)` with `y = Lx`).
fn norm_pattern(
    basis: &[Vector],
    d: usize,
    norm: Exponent,
    isometries: Option<&[Matrix]>,
    rng: &mut ChaCha8Rng,
) -> NormVerdict {
    let k = basis.len();
    let mut xs = DMatrix::zeros(d, k);
    let mut ys = DMatrix::zeros(d, k);
    for (c, v) in basis.iter().enumerate() {
        let (x, y) = split(v, d);
        xs.set_column(c, &x);
        ys.set_column(c, &y);
    }
    if norm.is_two() {
        let diff = xs.transpose() * &xs - ys.transpose() * &ys;
        if linalg::max_abs(&diff) <= TOL {
            return NormVerdict::Certified;
        }
        let eig = diff.symmetric_eigen();
        let i = eig.eigenvalues.iamax();
        let c = eig.eigenvectors.column(i).into_owned();
        return NormVerdict::Counterexample(&xs * &c, &ys * &c);
    }
    if let Some(qs) = isometries {
        if qs.iter().any(|q| linalg::max_abs(&(q * &xs - &ys)) <= TOL) {
            return NormVerdict::Certified;
        }
    }
    for _ in 0..SAMPLES {
        let c = DVector::from_iterator(k, (0..k).map(|_| StandardNormal.sample(rng)));
        let x = &xs * &c;
        let y = &ys * &c;
        let (nx, ny) = (lp::vec_norm(&x, norm), lp::vec_norm(&y, norm));
        if (nx - ny).abs() > 1e-9 * nx.max(ny) {
            return NormVerdict::Counterexample(x, y);
        }
    }
    NormVerdict::Unknown
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(data: &[f64], n: usize) -> Pasf {
        let f = DMatrix::from_row_slice(n, 2, data);
        Pasf::new(f.clone(), f.transpose(), Exponent::TWO, Exponent::TWO, "").unwrap()
    }

    #[test]
    fn three_rows_certify_phase() {
        let pair = rows(&[1.0, 0.0, 0.0, 1.0, 1.0, 1.0], 3);
        let rep = retrieval_check(&pair, RetrievalSide::Vector, RetrievalKind::Phase, &SearchBudget::default()).unwrap();
        assert_eq!(rep.status, SearchStatus::HoldsWithWitness);
    }

    #[test]
    fn identity_refuted_with_sign_flip() {
        let pair = rows(&[1.0, 0.0, 0.0, 1.0], 2);
        let rep = retrieval_check(&pair, RetrievalSide::Vector, RetrievalKind::Phase, &SearchBudget::default()).unwrap();
        assert_eq!(rep.status, SearchStatus::RefutedWithWitness);
        match rep.witness {
            Witness::RetrievalCounterexample { x, y, .. } => {
                assert_eq!(x, vec![1.0, 1.0]);
                assert_eq!(y, vec![1.0, -1.0]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn identity_norm_retrieval_holds() {
        for r in [1.0, 2.0, 3.0] {
            let pair = rows(&[1.0, 0.0, 0.0, 1.0], 2).with_exponents(Exponent::TWO, Exponent::new(r).unwrap());
            let rep = retrieval_check(&pair, RetrievalSide::Vector, RetrievalKind::Norm, &SearchBudget::default()).unwrap();
            assert_eq!(rep.status, SearchStatus::HoldsWithWitness, "r = {r}");
        }
    }

    #[test]
    fn single_row_norm_refuted() {
        let pair = rows(&[1.0, 0.0], 1);
        let rep = retrieval_check(&pair, RetrievalSide::Vector, RetrievalKind::Norm, &SearchBudget::default()).unwrap();
        assert_eq!(rep.status, SearchStatus::RefutedWithWitness);
    }
}
