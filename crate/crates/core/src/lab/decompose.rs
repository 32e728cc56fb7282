//! Writing the synthesis matrix of a pair as a combination of p-orthonormal
//! bases.
//!
//! In `(ℝ^d, ‖·‖_p)` with `p ≠ 2` the p-orthonormal bases are exactly the
//! signed-permutation images of the standard pair, so `T` is matched against
//! tuples of signed permutations. For `p = 2` the family is the orthogonal
//! group and the search works from the polar decomposition.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{problems, SearchBudget, SearchReport, SearchStatus, Strategy, Tracker, Witness};
use crate::error::{LabError, Result};
use crate::frames::{is_riesz_basis, Pasf, DEFAULT_TOL};
use crate::linalg;
use crate::lp::{signed_permutations, Matrix};

/// Largest `d` for signed-permutation enumeration.
pub const DECOMPOSITION_MAX_D: usize = 4;
/// Reconstruction tolerance for a witness.
pub const DECOMPOSITION_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecompositionMode {
    /// `T = Σ λ_i Q_i`.
    LinComb,
    /// `T = μ Σ Q_i`.
    MultipleOfSum,
    /// `T = μ (Q + R)` with `R` invertible.
    OnbPlusRiesz,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionWitness {
    /// Row-major `d×d` synthesis matrices of the bases used.
    pub bases: Vec<Vec<f64>>,
    /// `λ_i` for a linear combination, or the single factor `μ`.
    pub coefficients: Vec<f64>,
    /// Row-major `R` for the basis-plus-Riesz form.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub remainder: Option<Vec<f64>>,
    /// Largest entry of the reconstruction error.
    pub error: f64,
    /// Whether the bases are signed permutations (else orthogonal).
    pub signed_permutations: bool,
}

impl DecompositionWitness {
    pub fn basis_matrices(&self) -> Vec<Matrix> {
        let d = (self.bases.first().map_or(0, |b| b.len()) as f64).sqrt() as usize;
        self.bases.iter().map(|b| DMatrix::from_row_slice(d, d, b)).collect()
    }

    /// The matrix the witness represents.
    pub fn reconstruct(&self, mode: DecompositionMode) -> Matrix {
        let qs = self.basis_matrices();
        let d = qs[0].nrows();
        match mode {
            DecompositionMode::LinComb => qs
                .iter()
                .zip(&self.coefficients)
                .fold(DMatrix::zeros(d, d), |acc, (q, l)| acc + q * *l),
            DecompositionMode::MultipleOfSum => qs.iter().fold(DMatrix::zeros(d, d), |acc, q| acc + q) * self.coefficients[0],
            DecompositionMode::OnbPlusRiesz => {
                let r = DMatrix::from_row_slice(d, d, self.remainder.as_deref().unwrap_or(&vec![0.0; d * d]));
                (&qs[0] + r) * self.coefficients[0]
            }
        }
    }
}

fn row_major(m: &Matrix) -> Vec<f64> {
    m.transpose().as_slice().to_vec()
}

fn witness(qs: &[Matrix], coefficients: Vec<f64>, remainder: Option<Matrix>, target: &Matrix, mode: DecompositionMode, exact: bool) -> DecompositionWitness {
    let mut w = DecompositionWitness {
        bases: qs.iter().map(row_major).collect(),
        coefficients,
        remainder: remainder.as_ref().map(row_major),
        error: 0.0,
        signed_permutations: exact,
    };
    w.error = linalg::max_abs(&(w.reconstruct(mode) - target));
    w
}

/// Next `s`-combination of `0..n` in lexicographic order.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let s = c.len();
    let mut i = s;
    while i > 0 {
        i -= 1;
        if c[i] < n - s + i {
            c[i] += 1;
            for j in i + 1..s {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn frob_dot(a: &Matrix, b: &Matrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Least-squares `λ` for `Σ λ_i Q_i ≈ T`; `None` when the `Q_i` are
/// linearly dependent.
fn fit(qs: &[&Matrix], t: &Matrix) -> Option<Vec<f64>> {
    let s = qs.len();
    let gram = DMatrix::from_fn(s, s, |i, j| frob_dot(qs[i], qs[j]));
    let rhs = DVector::from_fn(s, |i, _| frob_dot(qs[i], t));
    gram.lu().solve(&rhs).map(|v| v.as_slice().to_vec())
}

fn invertible(r: &Matrix) -> bool {
    linalg::condition_number(r) <= 1e12
}

/// Exhaustive search over tuples of signed permutations.
fn search_signed(t: &Matrix, mode: DecompositionMode, max_m: usize, tracker: &Tracker) -> Result<Option<DecompositionWitness>> {
    let d = t.nrows();
    let qs: Vec<Matrix> = signed_permutations(d)?.map(|q| q.matrix()).collect();
    let n = qs.len();
    if mode == DecompositionMode::OnbPlusRiesz {
        for mu in [1.0, 0.5, 2.0] {
            for q in &qs {
                if !tracker.tick(1) {
                    return Ok(None);
                }
                let r = t / mu - q;
                if invertible(&r) {
                    return Ok(Some(witness(std::slice::from_ref(q), vec![mu], Some(r), t, mode, true)));
                }
            }
        }
        return Ok(None);
    }
    for s in 1..=max_m.min(n) {
        let mut c: Vec<usize> = (0..s).collect();
        loop {
            if !tracker.tick(1) {
                return Ok(None);
            }
            let chosen: Vec<&Matrix> = c.iter().map(|&i| &qs[i]).collect();
            let found = match mode {
                DecompositionMode::LinComb => fit(&chosen, t).map(|l| (l, None)),
                DecompositionMode::MultipleOfSum => {
                    let sum = chosen.iter().fold(DMatrix::zeros(d, d), |acc, q| acc + *q);
                    let nn = frob_dot(&sum, &sum);
                    (nn > 0.0).then(|| (vec![frob_dot(&sum, t) / nn], None))
                }
                DecompositionMode::OnbPlusRiesz => unreachable!(),
            };
            if let Some((coef, rem)) = found {
                let owned: Vec<Matrix> = chosen.iter().map(|q| (*q).clone()).collect();
                let w = witness(&owned, coef, rem, t, mode, true);
                if w.error <= DECOMPOSITION_TOL {
                    return Ok(Some(w));
                }
            }
            if !next_combination(&mut c, n) {
                break;
            }
        }
    }
    Ok(None)
}

/// Polar factor `U Vᵀ` of `a = U Σ Vᵀ`.
fn polar(a: &Matrix) -> Matrix {
    let svd = a.clone().svd(true, true);
    svd.u.expect("u") * svd.v_t.expect("v_t")
}

fn random_orthogonal(d: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let g = DMatrix::from_fn(d, d, |_, _| StandardNormal.sample(rng));
    polar(&g)
}

/// Singular values grouped into classes of equal value, largest first.
fn sign_pattern_decomposition(t: &Matrix) -> (Vec<Matrix>, Vec<f64>) {
    let d = t.nrows();
    let svd = t.clone().svd(true, true);
    let u = svd.u.expect("u");
    let vt = svd.v_t.expect("v_t");
    let sv = svd.singular_values;
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]));
    let scale = sv.max().max(1.0);
    let mut group = vec![0usize; d];
    let mut values: Vec<f64> = Vec::new();
    for &i in &order {
        match values.iter().position(|&v| (v - sv[i]).abs() <= 1e-9 * scale) {
            Some(g) => group[i] = g,
            None => {
                group[i] = values.len();
                values.push(sv[i]);
            }
        }
    }
    let k = values.len();
    // Column i: +1 on groups below i, −1 from i on (column 0 all +1).
    let sign = |g: usize, i: usize| if i == 0 || g < i { 1.0 } else { -1.0 };
    let system = DMatrix::from_fn(k, k, |g, i| sign(g, i));
    let alpha = system
        .lu()
        .solve(&DVector::from_column_slice(&values))
        .expect("triangular sign system is invertible");
    let qs = (0..k)
        .map(|i| {
            let s = DVector::from_fn(d, |j, _| sign(group[j], i));
            &u * DMatrix::from_diagonal(&s) * &vt
        })
        .collect();
    (qs, alpha.as_slice().to_vec())
}

/// Alternating Procrustes for `T ≈ Σ λ_i Q_i` (or `μ Σ Q_i` when `equal`).
fn procrustes(t: &Matrix, m: usize, equal: bool, rng: &mut ChaCha8Rng) -> (Vec<Matrix>, Vec<f64>) {
    let d = t.nrows();
    let mut qs: Vec<Matrix> = (0..m).map(|_| random_orthogonal(d, rng)).collect();
    let mut lam = vec![frob_dot(t, t).sqrt() / (m as f64 * (d as f64).sqrt()); m];
    for _ in 0..2000 {
        for i in 0..m {
            let others = (0..m)
                .filter(|&j| j != i)
                .fold(DMatrix::zeros(d, d), |acc, j| acc + &qs[j] * lam[j]);
            let resid = t - others;
            qs[i] = polar(&resid);
            if !equal {
                lam[i] = frob_dot(&qs[i], &resid) / d as f64;
            }
        }
        if equal {
            let sum = qs.iter().fold(DMatrix::zeros(d, d), |acc, q| acc + q);
            let nn = frob_dot(&sum, &sum);
            if nn > 0.0 {
                lam = vec![frob_dot(&sum, t) / nn; m];
            }
        }
        let recon = qs.iter().zip(&lam).fold(DMatrix::zeros(d, d), |acc, (q, l)| acc + q * *l);
        if linalg::max_abs(&(recon - t)) <= DECOMPOSITION_TOL * 0.1 {
            break;
        }
    }
    (qs, lam)
}

fn search_orthogonal(t: &Matrix, mode: DecompositionMode, max_m: usize, seed: u64, tracker: &Tracker) -> Option<DecompositionWitness> {
    let d = t.nrows();
    let w = polar(t);
    match mode {
        DecompositionMode::OnbPlusRiesz => {
            for mu in [1.0, 0.5, 2.0] {
                for q in [DMatrix::identity(d, d), w.clone()] {
                    tracker.tick(1);
                    let r = t / mu - &q;
                    if invertible(&r) {
                        return Some(witness(&[q], vec![mu], Some(r), t, mode, false));
                    }
                }
            }
            None
        }
        DecompositionMode::LinComb => {
            let (qs, alpha) = sign_pattern_decomposition(t);
            if qs.len() <= max_m {
                let cand = witness(&qs, alpha, None, t, mode, false);
                if cand.error <= DECOMPOSITION_TOL {
                    return Some(cand);
                }
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for m in 1..=max_m.min(qs.len().saturating_sub(1)) {
                for _ in 0..16 {
                    if !tracker.tick(1) {
                        return None;
                    }
                    let (qs, lam) = procrustes(t, m, false, &mut rng);
                    let cand = witness(&qs, lam, None, t, mode, false);
                    if cand.error <= DECOMPOSITION_TOL {
                        return Some(cand);
                    }
                }
            }
            None
        }
        DecompositionMode::MultipleOfSum => {
            let nn = frob_dot(&w, &w);
            let single = witness(std::slice::from_ref(&w), vec![frob_dot(&w, t) / nn], None, t, mode, false);
            if single.error <= DECOMPOSITION_TOL {
                return Some(single);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for m in 2..=max_m {
                for _ in 0..16 {
                    if !tracker.tick(1) {
                        return None;
                    }
                    let (qs, lam) = procrustes(t, m, true, &mut rng);
                    let cand = witness(&qs, vec![lam[0]], None, t, mode, false);
                    if cand.error <= DECOMPOSITION_TOL {
                        return Some(cand);
                    }
                }
            }
            None
        }
    }
}

/// Decomposes `T` (and, reported alongside, `Fᵀ`) into at most `max_m`
/// p-orthonormal bases. Requires `r = p` and a square pair.
pub fn decomposition_search(pair: &Pasf, mode: DecompositionMode, max_m: usize, budget: &SearchBudget) -> Result<SearchReport> {
    let d = pair.d();
    if pair.n() != d {
        return Err(LabError::Precondition(format!(
            "decomposition needs a square pair, got n = {}, d = {d}",
            pair.n()
        )));
    }
    if pair.p() != pair.r() {
        return Err(LabError::Precondition(format!(
            "decomposition into p-orthonormal bases needs r = p, got p = {}, r = {}",
            pair.p(),
            pair.r()
        )));
    }
    if max_m == 0 {
        return Err(LabError::OutOfRange("M must be at least 1".into()));
    }
    if mode == DecompositionMode::LinComb && !is_riesz_basis(pair, DEFAULT_TOL)?.is_riesz {
        return Err(LabError::Precondition("linear-combination mode needs a Riesz basis".into()));
    }
    let exact = !pair.p().is_two();
    if exact && d > DECOMPOSITION_MAX_D {
        return Err(LabError::Budget(format!(
            "signed-permutation tuples limited to d <= {DECOMPOSITION_MAX_D}, got {d}"
        )));
    }
    let tracker = Tracker::new(budget);
    let run = |m: &Matrix| -> Result<Option<DecompositionWitness>> {
        if exact {
            search_signed(m, mode, max_m, &tracker)
        } else {
            Ok(search_orthogonal(m, mode, max_m, budget.seed, &tracker))
        }
    };
    let t_side = run(pair.t())?;
    let f_side = run(&pair.f().transpose())?;
    let problem = match mode {
        DecompositionMode::LinComb => problems::DECOMP_LIN_COMB,
        DecompositionMode::MultipleOfSum => problems::DECOMP_MULTIPLE_OF_SUM,
        DecompositionMode::OnbPlusRiesz => problems::DECOMP_ONB_PLUS_RIESZ,
    };
    let strategy = if exact { Strategy::Exhaustive } else { Strategy::LocalSearch };
    let mut notes = vec![if exact {
        "bases enumerated as signed permutations of the standard pair".to_string()
    } else {
        "orthogonal bases from the polar decomposition and alternating Procrustes".to_string()
    }];
    if f_side.is_none() {
        notes.push("no decomposition found for the functional side F^T".into());
    }
    Ok(match t_side {
        Some(t_side) => tracker.report(
            problem,
            SearchStatus::HoldsWithWitness,
            Witness::Decomposition { t_side, f_side },
            strategy,
            budget.seed,
            notes,
        ),
        None => {
            notes.push(format!("no decomposition of T with at most {max_m} bases found"));
            tracker.report(problem, SearchStatus::ExhaustedInconclusive, Witness::None, strategy, budget.seed, notes)
        }
    })
}
