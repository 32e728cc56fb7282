//! Subset selection: choose `𝕄` so that `Σ_{j∈𝕄} τ_j f_j` is close in
//! operator norm to the weighted sum `Σ_j r_j τ_j f_j`.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{problems, SearchBudget, SearchReport, SearchStatus, Strategy, Tracker, Witness};
use crate::error::{LabError, Result};
use crate::frames::{frame_operator, Pasf, DEFAULT_TOL};
use crate::lp::{op_norm, Matrix, OperatorNormEstimate};

/// Largest `n` searched over all `2^n` subsets.
pub const AW_EXHAUSTIVE_LIMIT: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AwParams {
    /// `r_j ∈ [0, 1]`.
    pub weights: Vec<f64>,
    /// Discrepancy to compare against. Without it the report only records
    /// the best subset found.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
}

impl AwParams {
    pub fn new(weights: Vec<f64>) -> Self {
        AwParams { weights, target: None }
    }

    pub fn with_target(mut self, target: f64) -> Self {
        self.target = Some(target);
        self
    }
}

/// Rank-one terms `τ_j f_j`.
fn terms(pair: &Pasf) -> Vec<Matrix> {
    (0..pair.n())
        .map(|j| pair.t().column(j) * pair.f().row(j))
        .collect()
}

fn discrepancy_matrix(terms: &[Matrix], weights: &[f64], x: &[f64]) -> Matrix {
    let d = terms[0].nrows();
    let mut m = DMatrix::zeros(d, d);
    for ((t, &w), &xi) in terms.iter().zip(weights).zip(x) {
        let c = xi - w;
        if c != 0.0 {
            m += t * c;
        }
    }
    m
}

fn indicator(key: u64, n: usize) -> Vec<f64> {
    (0..n).map(|j| (key >> (n - 1 - j) & 1) as f64).collect()
}

fn validate(pair: &Pasf, params: &AwParams) -> Result<()> {
    let n = pair.n();
    if params.weights.len() != n {
        return Err(LabError::DimensionMismatch(format!(
            "{} weights for n = {n} elements",
            params.weights.len()
        )));
    }
    if let Some(j) = params.weights.iter().position(|w| !(0.0..=1.0).contains(w)) {
        return Err(LabError::OutOfRange(format!(
            "weight r_{j} = {} is outside [0, 1]",
            params.weights[j]
        )));
    }
    if let Some(t) = params.target {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(LabError::OutOfRange(format!("target must be a nonnegative number, got {t}")));
        }
    }
    let bessel = op_norm(&frame_operator(pair), pair.r(), pair.r())?;
    if bessel.lower > 1.0 + 1e-9 {
        return Err(LabError::Precondition(format!(
            "Bessel bound ||S|| >= {} exceeds 1",
            bessel.lower
        )));
    }
    Ok(())
}

/// `D(x)` for a 0/1 (or fractional) indicator `x`.
pub(crate) fn discrepancy(pair: &Pasf, weights: &[f64], x: &[f64]) -> Result<OperatorNormEstimate> {
    op_norm(&discrepancy_matrix(&terms(pair), weights, x), pair.r(), pair.r())
}

/// Minimises `D(𝕄) = ‖Σ_{j∈𝕄} τ_j f_j − Σ_j r_j τ_j f_j‖_{r→r}`.
/// Exhaustive for `n ≤ 20` with ties going to the lexicographically first
/// indicator vector; pipage rounding plus single flips beyond.
pub fn akemann_weaver_search(pair: &Pasf, params: &AwParams, budget: &SearchBudget) -> Result<SearchReport> {
    validate(pair, params)?;
    let n = pair.n();
    let tracker = Tracker::new(budget);
    let strategy = budget.choose(n, AW_EXHAUSTIVE_LIMIT, Strategy::LocalSearch);
    let ts = terms(pair);
    let r = pair.r();
    let eval = |x: &[f64]| op_norm(&discrepancy_matrix(&ts, &params.weights, x), r, r);

    let mut notes = Vec::new();
    let (x, min_lower, complete) = match strategy {
        Strategy::Exhaustive => {
            if n > 63 {
                return Err(LabError::Budget(format!("exhaustive subset search needs n <= 63, got {n}")));
            }
            let total = 1u64 << n;
            // (upper, key) minimised, plus the smallest certified-lower value.
            let best = (0..total)
                .into_par_iter()
                .map(|key| -> Result<(f64, u64, f64)> {
                    if !tracker.tick(1) {
                        return Ok((f64::INFINITY, key, f64::INFINITY));
                    }
                    let e = eval(&indicator(key, n))?;
                    Ok((e.upper, key, e.lower))
                })
                .try_reduce(
                    || (f64::INFINITY, u64::MAX, f64::INFINITY),
                    |a, b| {
                        let lower = a.2.min(b.2);
                        let pick = if (b.0, b.1) < (a.0, a.1) { b } else { a };
                        Ok((pick.0, pick.1, lower))
                    },
                )?;
            let complete = !tracker.exceeded();
            if best.1 == u64::MAX {
                (vec![0.0; n], f64::NAN, false)
            } else {
                (indicator(best.1, n), best.2, complete)
            }
        }
        Strategy::Greedy | Strategy::LocalSearch => {
            notes.push("pipage rounding from the weights, then single flips".into());
            let x = pipage(&eval, &params.weights, &tracker)?;
            (polish(&eval, x, &tracker)?, f64::NAN, false)
        }
    };
    finish(pair, params, &eval, x, min_lower, complete, strategy, &tracker, budget, notes)
}

/// Single-flip descent from a given 0/1 start, reported as a local search.
pub(crate) fn search_from(
    pair: &Pasf,
    params: &AwParams,
    start: Vec<f64>,
    budget: &SearchBudget,
    notes: Vec<String>,
) -> Result<SearchReport> {
    validate(pair, params)?;
    let tracker = Tracker::new(budget);
    let ts = terms(pair);
    let r = pair.r();
    let eval = |x: &[f64]| op_norm(&discrepancy_matrix(&ts, &params.weights, x), r, r);
    let x = polish(&eval, start, &tracker)?;
    finish(pair, params, &eval, x, f64::NAN, false, Strategy::LocalSearch, &tracker, budget, notes)
}

#[allow(clippy::too_many_arguments)]
fn finish(
    pair: &Pasf,
    params: &AwParams,
    eval: &impl Fn(&[f64]) -> Result<OperatorNormEstimate>,
    x: Vec<f64>,
    min_lower: f64,
    complete: bool,
    strategy: Strategy,
    tracker: &Tracker,
    budget: &SearchBudget,
    mut notes: Vec<String>,
) -> Result<SearchReport> {
    let tol = DEFAULT_TOL;
    let cert: OperatorNormEstimate = eval(&x)?;
    let subset: Vec<usize> = (0..pair.n()).filter(|&j| x[j] == 1.0).collect();
    let status = match params.target {
        Some(t) if cert.upper <= t + tol => SearchStatus::HoldsWithWitness,
        Some(t) if complete && min_lower > t + tol => SearchStatus::RefutedWithWitness,
        Some(_) => SearchStatus::ExhaustedInconclusive,
        None if complete || strategy != Strategy::Exhaustive => SearchStatus::HoldsWithWitness,
        None => SearchStatus::ExhaustedInconclusive,
    };
    if params.target.is_none() {
        notes.push("no target discrepancy given; the witness is the best subset found".into());
    }
    if strategy == Strategy::Exhaustive && !complete {
        notes.push("budget exhausted before all subsets were examined".into());
    }
    let discrepancy_lower = if min_lower.is_nan() { cert.lower } else { min_lower };
    Ok(tracker.report(
        problems::AKEMANN_WEAVER,
        status,
        Witness::Subset {
            subset,
            discrepancy: cert.upper,
            discrepancy_lower,
            cert,
            scale: 1.0,
        },
        strategy,
        budget.seed,
        notes,
    ))
}

fn pipage(
    eval: &impl Fn(&[f64]) -> Result<OperatorNormEstimate>,
    weights: &[f64],
    tracker: &Tracker,
) -> Result<Vec<f64>> {
    let n = weights.len();
    let mut x = weights.to_vec();
    let frac = |x: &[f64]| -> Vec<usize> { (0..n).filter(|&j| x[j] > 0.0 && x[j] < 1.0).collect() };
    // Pipage: move mass between two fractional coordinates until one is
    // integral, keeping the better endpoint.
    loop {
        let f = frac(&x);
        if f.len() < 2 {
            if let Some(&j) = f.first() {
                let mut lo = x.clone();
                lo[j] = 0.0;
                let mut hi = x.clone();
                hi[j] = 1.0;
                x = if eval(&hi)?.upper < eval(&lo)?.upper { hi } else { lo };
            }
            break;
        }
        tracker.tick(1);
        let (i, j) = (f[0], f[1]);
        let up = (1.0 - x[i]).min(x[j]);
        let down = x[i].min(1.0 - x[j]);
        let mut a = x.clone();
        a[i] += up;
        a[j] -= up;
        let mut b = x.clone();
        b[i] -= down;
        b[j] += down;
        for v in [&mut a, &mut b] {
            for k in [i, j] {
                if v[k] < 1e-15 {
                    v[k] = 0.0;
                } else if v[k] > 1.0 - 1e-15 {
                    v[k] = 1.0;
                }
            }
        }
        x = if eval(&b)?.upper < eval(&a)?.upper { b } else { a };
    }
    Ok(x)
}

fn polish(
    eval: &impl Fn(&[f64]) -> Result<OperatorNormEstimate>,
    mut x: Vec<f64>,
    tracker: &Tracker,
) -> Result<Vec<f64>> {
    let n = x.len();
    let mut current = eval(&x)?.upper;
    let mut improved = true;
    while improved && !tracker.exceeded() {
        improved = false;
        for j in 0..n {
            if !tracker.tick(1) {
                break;
            }
            let mut y = x.clone();
            y[j] = 1.0 - y[j];
            let v = eval(&y)?.upper;
            if v < current - 1e-12 {
                x = y;
                current = v;
                improved = true;
            }
        }
    }
    Ok(x)
}
