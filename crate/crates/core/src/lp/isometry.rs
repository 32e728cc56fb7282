//! Isometries of (ℝ^d, ‖·‖_r).
//!
//! For `r = 2` these are the orthogonal matrices. For every other `r` the
//! isometry group is the hyperoctahedral group of signed permutations, so the
//! test is structural and exact rather than sampled.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{estimate::random_unit, vec_norm, Exponent, Matrix, Vector};
use crate::error::{LabError, Result};

/// Outcome of an isometry test; `witness` is set when the answer is negative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsometryCheck {
    pub is_isometry: bool,
    pub witness: Option<Vec<f64>>,
    /// `|‖Ax‖ − ‖x‖| / ‖x‖` at the witness (0 when accepted).
    pub violation: f64,
}

pub fn is_isometry(a: &Matrix, r: Exponent, tol: f64) -> Result<IsometryCheck> {
    let (m, n) = a.shape();
    if m != n {
        return Err(LabError::DimensionMismatch(format!("isometry test needs a square matrix, got {m}x{n}")));
    }
    if n == 0 {
        return Err(LabError::Empty("isometry input".into()));
    }
    let accepted = if r.is_two() {
        let gram = a.transpose() * a - DMatrix::identity(n, n);
        gram.amax() <= tol
    } else {
        is_signed_permutation(a, tol)
    };
    if accepted {
        return Ok(IsometryCheck {
            is_isometry: true,
            witness: None,
            violation: 0.0,
        });
    }
    let (witness, violation) = if r.is_two() {
        orthogonality_witness(a)
    } else {
        search_witness(a, r, tol)
    };
    Ok(IsometryCheck {
        is_isometry: false,
        witness: Some(witness.as_slice().to_vec()),
        violation,
    })
}

fn relative_violation(a: &Matrix, x: &Vector, r: Exponent) -> f64 {
    let nx = vec_norm(x, r);
    (vec_norm(&(a * x), r) - nx).abs() / nx
}

/// Eigenvector of AᵀA whose eigenvalue is furthest from 1.
fn orthogonality_witness(a: &Matrix) -> (Vector, f64) {
    let gram = a.transpose() * a;
    let eig = gram.symmetric_eigen();
    let (k, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, -1.0), |best, (i, &l)| {
            let dev = (l - 1.0).abs();
            if dev > best.1 {
                (i, dev)
            } else {
                best
            }
        });
    let v = crate::linalg::canonical_sign(eig.eigenvectors.column(k).into_owned());
    let viol = relative_violation(a, &v, Exponent::TWO);
    (v, viol)
}

/// Basis vectors, then `e_i ± e_j`, then seeded random points; the first
/// candidate violating by more than `tol` wins, else the worst seen.
fn search_witness(a: &Matrix, r: Exponent, tol: f64) -> (Vector, f64) {
    let n = a.ncols();
    let mut candidates: Vec<Vector> = (0..n).map(|j| unit(n, j)).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            candidates.push(unit(n, i) + unit(n, j));
            candidates.push(unit(n, i) - unit(n, j));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x150_3e7a);
    for _ in 0..256 {
        candidates.push(random_unit(&mut rng, n, r));
    }
    let mut worst = (candidates[0].clone(), -1.0);
    for x in candidates {
        let v = relative_violation(a, &x, r);
        if v > tol {
            return (x, v);
        }
        if v > worst.1 {
            worst = (x, v);
        }
    }
    worst
}

fn unit(n: usize, j: usize) -> Vector {
    let mut v = DVector::zeros(n);
    v[j] = 1.0;
    v
}

/// Exactly one entry of magnitude 1 (within tol) per row and column, all
/// other entries at most `tol` in magnitude.
pub(crate) fn is_signed_permutation(a: &Matrix, tol: f64) -> bool {
    let n = a.nrows();
    if a.ncols() != n {
        return false;
    }
    let mut col_hits = vec![0usize; n];
    for i in 0..n {
        let mut hits = 0;
        for j in 0..n {
            let v = a[(i, j)].abs();
            if (v - 1.0).abs() <= tol {
                hits += 1;
                col_hits[j] += 1;
            } else if v > tol {
                return false;
            }
        }
        if hits != 1 {
            return false;
        }
    }
    col_hits.iter().all(|&c| c == 1)
}

/// A signed permutation: row `i` has its single entry `signs[i]` in column `perm[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignedPermutation {
    pub perm: Vec<usize>,
    pub signs: Vec<i8>,
}

impl SignedPermutation {
    pub fn identity(d: usize) -> Self {
        SignedPermutation {
            perm: (0..d).collect(),
            signs: vec![1; d],
        }
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn matrix(&self) -> Matrix {
        let d = self.dim();
        let mut q = DMatrix::zeros(d, d);
        for (i, (&j, &s)) in self.perm.iter().zip(&self.signs).enumerate() {
            q[(i, j)] = f64::from(s);
        }
        q
    }

    /// Recognise a signed permutation matrix within `tol`.
    pub fn from_matrix(q: &Matrix, tol: f64) -> Option<Self> {
        if !is_signed_permutation(q, tol) {
            return None;
        }
        let d = q.nrows();
        let mut perm = vec![0; d];
        let mut signs = vec![1i8; d];
        for i in 0..d {
            for j in 0..d {
                if (q[(i, j)].abs() - 1.0).abs() <= tol {
                    perm[i] = j;
                    signs[i] = if q[(i, j)] < 0.0 { -1 } else { 1 };
                }
            }
        }
        Some(SignedPermutation { perm, signs })
    }
}

/// Iterator over all `2^d · d!` signed permutations of size `d`, ordered
/// lexicographically by permutation and then by sign vector (`+` before `−`).
#[derive(Clone, Debug)]
pub struct SignedPermutations {
    perm: Vec<usize>,
    sign_mask: u32,
    d: usize,
    done: bool,
}

pub fn signed_permutations(d: usize) -> Result<SignedPermutations> {
    if d == 0 {
        return Err(LabError::OutOfRange("signed permutations need d >= 1".into()));
    }
    if d > 8 {
        return Err(LabError::Budget(format!("signed permutation enumeration limited to d <= 8, got {d}")));
    }
    Ok(SignedPermutations {
        perm: (0..d).collect(),
        sign_mask: 0,
        d,
        done: false,
    })
}

impl Iterator for SignedPermutations {
    type Item = SignedPermutation;

    fn next(&mut self) -> Option<SignedPermutation> {
        if self.done {
            return None;
        }
        let d = self.d;
        let signs = (0..d)
            .map(|i| if self.sign_mask >> (d - 1 - i) & 1 == 1 { -1 } else { 1 })
            .collect();
        let item = SignedPermutation {
            perm: self.perm.clone(),
            signs,
        };
        self.sign_mask += 1;
        if self.sign_mask == 1 << d {
            self.sign_mask = 0;
            if !next_permutation(&mut self.perm) {
                self.done = true;
            }
        }
        Some(item)
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}
