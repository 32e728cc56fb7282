//! Certified brackets on subordinate `r_in → r_out` operator norms and on the
//! smallest gain `inf ‖Ax‖/‖x‖`.
//!
//! Closed forms are used whenever one exists; otherwise a Boyd fixed-point
//! power iteration is run from every signed basis vector plus seeded random
//! unit vectors and the best value found is the certified lower end.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{dual_vector, p_norm, vec_norm, Exponent, Matrix, Vector};
use crate::error::{LabError, Result};
use crate::linalg;

/// How a bracket was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormMethod {
    /// Diagonal or more generally monomial matrix with `r_in = r_out`.
    ExactDiagonal,
    /// `r_in = 1` or a single column: largest column norm.
    ExactP1,
    /// `r_out = ∞`: largest dual row norm.
    ExactPInf,
    /// `r_in = r_out = 2`: singular values.
    ExactSpectral,
    BoydMultistart,
}

impl NormMethod {
    pub fn is_exact(self) -> bool {
        !matches!(self, NormMethod::BoydMultistart)
    }
}

/// Whether the bracket is on a supremum (operator norm) or an infimum (gain).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Extremum {
    Sup,
    Inf,
}

/// Two-sided bracket with a witness vector.
///
/// For a supremum the witness achieves `lower`; for an infimum it achieves
/// `upper`. `heuristic` marks an upper (resp. lower) end that is a declared
/// slack rather than a proven bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorNormEstimate {
    pub lower: f64,
    pub upper: f64,
    pub witness: Vec<f64>,
    pub method: NormMethod,
    pub extremum: Extremum,
    pub starts: usize,
    pub seed: u64,
    pub heuristic: bool,
}

impl OperatorNormEstimate {
    /// Value realised by the witness.
    pub fn achieved(&self) -> f64 {
        match self.extremum {
            Extremum::Sup => self.lower,
            Extremum::Inf => self.upper,
        }
    }

    pub fn witness_vector(&self) -> Vector {
        DVector::from_column_slice(&self.witness)
    }

    /// Re-evaluate the ratio at the witness and compare to `achieved()`.
    pub fn reverify(&self, a: &Matrix, r_in: Exponent, r_out: Exponent) -> bool {
        if self.witness.len() != a.ncols() || self.lower > self.upper {
            return false;
        }
        let ratio = norm_ratio(a, &self.witness_vector(), r_in, r_out);
        let target = self.achieved();
        if target == 0.0 {
            let scale = linalg::max_abs(a).max(1.0);
            return ratio <= 1e-12 * scale;
        }
        (ratio - target).abs() <= 1e-12 * target.abs()
    }
}

/// Tuning for the multistart iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct NormOptions {
    pub starts: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
    /// Relative slack used for the heuristic end of a bracket.
    pub slack: f64,
}

impl Default for NormOptions {
    fn default() -> Self {
        NormOptions {
            starts: 64,
            max_iters: 500,
            tol: 1e-12,
            seed: 0,
            slack: 0.05,
        }
    }
}

impl NormOptions {
    pub fn with_seed(seed: u64) -> Self {
        NormOptions {
            seed,
            ..Default::default()
        }
    }
}

/// `‖Ax‖_{r_out} / ‖x‖_{r_in}` (zero for `x = 0`).
pub fn norm_ratio(a: &Matrix, x: &Vector, r_in: Exponent, r_out: Exponent) -> f64 {
    let den = vec_norm(x, r_in);
    if den == 0.0 {
        return 0.0;
    }
    vec_norm(&(a * x), r_out) / den
}

pub fn op_norm(a: &Matrix, r_in: Exponent, r_out: Exponent) -> Result<OperatorNormEstimate> {
    op_norm_with(a, r_in, r_out, &NormOptions::default())
}

pub fn op_norm_with(
    a: &Matrix,
    r_in: Exponent,
    r_out: Exponent,
    opts: &NormOptions,
) -> Result<OperatorNormEstimate> {
    check_exponent(r_in)?;
    check_exponent(r_out)?;
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return Err(LabError::Empty("operator-norm input matrix".into()));
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(LabError::NonFinite("operator-norm input matrix".into()));
    }

    let exact = |value: f64, witness: Vector, method: NormMethod| {
        let achieved = norm_ratio(a, &witness, r_in, r_out);
        OperatorNormEstimate {
            lower: achieved,
            upper: value.max(achieved),
            witness: witness.as_slice().to_vec(),
            method,
            extremum: Extremum::Sup,
            starts: 0,
            seed: opts.seed,
            heuristic: false,
        }
    };

    if r_in == r_out {
        if let Some((value, col)) = monomial_norm(a) {
            return Ok(exact(value, basis(n, col), NormMethod::ExactDiagonal));
        }
    }
    // With one column every `‖x‖_{r_in}` is `|x_0|`.
    if r_in.is_one() || n == 1 {
        let (j, value) = (0..n)
            .map(|j| (j, p_norm(a.column(j).as_slice(), r_out)))
            .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        return Ok(exact(value, basis(n, j), NormMethod::ExactP1));
    }
    if r_out.is_infinite() {
        let dual = r_in.dual();
        let rows: Vec<Vec<f64>> = (0..m).map(|i| a.row(i).iter().copied().collect()).collect();
        let (i, value) = rows
            .iter()
            .enumerate()
            .map(|(i, row)| (i, p_norm(row, dual)))
            .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        let w = DVector::from_vec(dual_vector(&rows[i], dual));
        let w = if vec_norm(&w, r_in) == 0.0 { basis(n, 0) } else { w };
        return Ok(exact(value, w, NormMethod::ExactPInf));
    }
    if r_in.is_two() && r_out.is_two() {
        let svd = a.clone().svd(false, true);
        let vt = svd.v_t.expect("v_t requested");
        let (k, smax) = svd
            .singular_values
            .iter()
            .enumerate()
            .fold((0, -1.0), |best, (i, &s)| if s > best.1 { (i, s) } else { best });
        let v = linalg::canonical_sign(vt.row(k).transpose());
        return Ok(exact(smax, v, NormMethod::ExactSpectral));
    }

    Ok(boyd_multistart(a, r_in, r_out, opts))
}

fn check_exponent(e: Exponent) -> Result<()> {
    if e.value().is_nan() || e.value() < 1.0 {
        Err(LabError::InvalidExponent(e.value()))
    } else {
        Ok(())
    }
}

fn basis(n: usize, j: usize) -> Vector {
    let mut v = DVector::zeros(n);
    v[j] = 1.0;
    v
}

/// For a matrix with at most one nonzero per row and per column the norm is
/// `max |a_ij|` for every `r`. Returns the value and the column achieving it.
fn monomial_norm(a: &Matrix) -> Option<(f64, usize)> {
    let (m, n) = a.shape();
    let mut col_seen = vec![false; n];
    for i in 0..m {
        let mut seen = false;
        for j in 0..n {
            if a[(i, j)] != 0.0 {
                if seen || col_seen[j] {
                    return None;
                }
                seen = true;
                col_seen[j] = true;
            }
        }
    }
    let mut best = (0.0, 0);
    for j in 0..n {
        for i in 0..m {
            if a[(i, j)].abs() > best.0 {
                best = (a[(i, j)].abs(), j);
            }
        }
    }
    Some(best)
}

/// Riesz–Thorin interpolation bound for `r_in = r_out = r ∈ (1, ∞)`.
fn interpolation_bound(a: &Matrix, r: Exponent) -> f64 {
    let n1 = (0..a.ncols())
        .map(|j| a.column(j).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let ninf = (0..a.nrows())
        .map(|i| a.row(i).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let n2 = linalg::singular_values(a).iter().cloned().fold(0.0, f64::max);
    let inv = 1.0 / r.value();
    // 1/r = (1-θ)/1 + θ/∞
    let mut bound = n1.powf(inv) * ninf.powf(1.0 - inv);
    if inv > 0.5 {
        // between 1 and 2: 1/r = (1-θ) + θ/2
        let theta = 2.0 * (1.0 - inv);
        bound = bound.min(n1.powf(1.0 - theta) * n2.powf(theta));
    } else {
        // between 2 and ∞: 1/r = (1-θ)/2
        let theta = 1.0 - 2.0 * inv;
        bound = bound.min(n2.powf(1.0 - theta) * ninf.powf(theta));
    }
    bound
}

pub(crate) fn random_unit(rng: &mut ChaCha8Rng, n: usize, e: Exponent) -> Vector {
    loop {
        let v = DVector::from_fn(n, |_, _| StandardNormal.sample(rng));
        let norm = vec_norm(&v, e);
        if norm > 1e-12 {
            return v / norm;
        }
    }
}

fn boyd_multistart(a: &Matrix, r_in: Exponent, r_out: Exponent, opts: &NormOptions) -> OperatorNormEstimate {
    let n = a.ncols();
    let mut starts: Vec<Vector> = Vec::new();
    for j in 0..n {
        starts.push(basis(n, j));
        starts.push(-basis(n, j));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    while starts.len() < opts.starts.max(2 * n) {
        starts.push(random_unit(&mut rng, n, r_in));
    }

    let mut best_value = -1.0;
    let mut best_x = basis(n, 0);
    for x0 in &starts {
        let (value, x) = boyd_iterate(a, x0, r_in, r_out, opts);
        if value > best_value {
            best_value = value;
            best_x = x;
        }
    }
    let lower = norm_ratio(a, &best_x, r_in, r_out);
    let (upper, heuristic) = if r_in == r_out && !r_in.is_one() && !r_in.is_infinite() {
        (interpolation_bound(a, r_in).max(lower), false)
    } else {
        (lower * (1.0 + opts.slack), true)
    };
    OperatorNormEstimate {
        lower,
        upper,
        witness: best_x.as_slice().to_vec(),
        method: NormMethod::BoydMultistart,
        extremum: Extremum::Sup,
        starts: starts.len(),
        seed: opts.seed,
        heuristic,
    }
}

/// Boyd's fixed-point iteration for `max ‖Ax‖_q` over `‖x‖_p = 1`.
fn boyd_iterate(a: &Matrix, x0: &Vector, p: Exponent, q: Exponent, opts: &NormOptions) -> (f64, Vector) {
    let mut x = x0 / vec_norm(x0, p);
    let mut best = (norm_ratio(a, &x, p, q), x.clone());
    let mut prev = best.0;
    let p_dual = p.dual();
    for _ in 0..opts.max_iters {
        let y = a * &x;
        let w = DVector::from_vec(dual_vector(y.as_slice(), q));
        let z = a.transpose() * w;
        let znorm = vec_norm(&z, p_dual);
        if znorm <= z.dot(&x) * (1.0 + opts.tol) {
            break;
        }
        let next = DVector::from_vec(dual_vector(z.as_slice(), p_dual));
        if vec_norm(&next, p) == 0.0 {
            break;
        }
        x = next;
        let value = norm_ratio(a, &x, p, q);
        if value > best.0 {
            best = (value, x.clone());
        }
        if (value - prev).abs() <= opts.tol * value.abs() {
            break;
        }
        prev = value;
    }
    best
}

pub fn gain_lower_bound(a: &Matrix, r_in: Exponent, r_out: Exponent) -> Result<OperatorNormEstimate> {
    gain_lower_bound_with(a, r_in, r_out, &NormOptions::default())
}

/// Bracket on `inf_{x≠0} ‖Ax‖_{r_out}/‖x‖_{r_in}`.
pub fn gain_lower_bound_with(
    a: &Matrix,
    r_in: Exponent,
    r_out: Exponent,
    opts: &NormOptions,
) -> Result<OperatorNormEstimate> {
    check_exponent(r_in)?;
    check_exponent(r_out)?;
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return Err(LabError::Empty("gain input matrix".into()));
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(LabError::NonFinite("gain input matrix".into()));
    }

    let kernel = linalg::null_space(a);
    if kernel.ncols() > 0 {
        let w = crate::lp::normalized(&kernel.column(0).into_owned(), r_in);
        return Ok(OperatorNormEstimate {
            lower: 0.0,
            upper: 0.0,
            witness: w.as_slice().to_vec(),
            method: NormMethod::ExactSpectral,
            extremum: Extremum::Inf,
            starts: 0,
            seed: opts.seed,
            heuristic: false,
        });
    }

    if n == 1 {
        let value = p_norm(a.column(0).as_slice(), r_out);
        return Ok(OperatorNormEstimate {
            lower: value,
            upper: value,
            witness: vec![1.0],
            method: NormMethod::ExactP1,
            extremum: Extremum::Inf,
            starts: 0,
            seed: opts.seed,
            heuristic: false,
        });
    }

    if m == n {
        let inv = a
            .clone()
            .try_inverse()
            .ok_or_else(|| LabError::Singular("square matrix not invertible".into()))?;
        let est = op_norm_with(&inv, r_out, r_in, opts)?;
        let x = inv * est.witness_vector();
        let upper = norm_ratio(a, &x, r_in, r_out);
        let lower = (1.0 / est.upper).min(upper);
        return Ok(OperatorNormEstimate {
            lower,
            upper,
            witness: x.as_slice().to_vec(),
            method: est.method,
            extremum: Extremum::Inf,
            starts: est.starts,
            seed: opts.seed,
            heuristic: est.heuristic,
        });
    }

    // Tall and injective.
    if r_in.is_two() && r_out.is_two() {
        let svd = a.clone().svd(false, true);
        let vt = svd.v_t.expect("v_t requested");
        let (k, _) = svd
            .singular_values
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |best, (i, &s)| if s < best.1 { (i, s) } else { best });
        let v = linalg::canonical_sign(vt.row(k).transpose());
        let value = norm_ratio(a, &v, r_in, r_out);
        return Ok(OperatorNormEstimate {
            lower: value,
            upper: value,
            witness: v.as_slice().to_vec(),
            method: NormMethod::ExactSpectral,
            extremum: Extremum::Inf,
            starts: 0,
            seed: opts.seed,
            heuristic: false,
        });
    }

    // Any left inverse L gives ‖x‖ ≤ ‖L‖·‖Ax‖, so 1/‖L‖ is a lower bound.
    let left = linalg::pseudo_inverse(a);
    let est = op_norm_with(&left, r_out, r_in, opts)?;
    let certified = 1.0 / est.upper;

    let mut candidates: Vec<Vector> = vec![left.clone() * est.witness_vector()];
    for j in 0..n {
        candidates.push(basis(n, j));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5eed_9a17);
    while candidates.len() < opts.starts.max(n + 1) {
        candidates.push(random_unit(&mut rng, n, r_in));
    }
    let mut scored: Vec<(f64, usize)> = candidates
        .iter()
        .enumerate()
        .map(|(i, x)| (norm_ratio(a, x, r_in, r_out), i))
        .collect();
    scored.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    let mut best = (f64::INFINITY, candidates[0].clone());
    for &(_, i) in scored.iter().take(4) {
        let (value, x) = pattern_search_min(a, &candidates[i], r_in, r_out);
        if value < best.0 {
            best = (value, x);
        }
    }
    let upper = norm_ratio(a, &best.1, r_in, r_out);
    Ok(OperatorNormEstimate {
        lower: certified.min(upper),
        upper,
        witness: best.1.as_slice().to_vec(),
        method: NormMethod::BoydMultistart,
        extremum: Extremum::Inf,
        starts: candidates.len(),
        seed: opts.seed,
        heuristic: est.heuristic,
    })
}

/// Compass search minimising the gain ratio from `x0`.
fn pattern_search_min(a: &Matrix, x0: &Vector, r_in: Exponent, r_out: Exponent) -> (f64, Vector) {
    let n = x0.len();
    let mut x = crate::lp::normalized(x0, r_in);
    let mut value = norm_ratio(a, &x, r_in, r_out);
    let mut step = 0.25;
    let mut evals = 0;
    while step > 1e-11 && evals < 20_000 {
        let mut improved = false;
        for k in 0..n {
            for sign in [1.0, -1.0] {
                let mut trial = x.clone();
                trial[k] += sign * step;
                evals += 1;
                if vec_norm(&trial, r_in) == 0.0 {
                    continue;
                }
                let trial = crate::lp::normalized(&trial, r_in);
                let v = norm_ratio(a, &trial, r_in, r_out);
                if v < value {
                    value = v;
                    x = trial;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (value, x)
}
