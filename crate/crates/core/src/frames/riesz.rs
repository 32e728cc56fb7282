//! Riesz-type predicates: the basis characterization `F S⁻¹ T = I`, Riesz
//! sequence bounds of a sub-family, and the unit-norm ε-Riesz property.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{frame_operator, Pasf};
use crate::error::{LabError, Result};
use crate::linalg;
use crate::lp::{gain_lower_bound, gain_lower_bound_with, op_norm, op_norm_with, Matrix, NormOptions, OperatorNormEstimate};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RieszCheck {
    pub is_riesz: bool,
    /// Upper end of `‖F S⁻¹ T − I_n‖_{p→p}`; infinite when `S` is singular.
    pub defect: f64,
    pub defect_cert: Option<OperatorNormEstimate>,
    /// Numerical rank of `F S⁻¹ T`.
    pub rank: usize,
}

/// `F S⁻¹ T` with an LU solve plus one refinement step, or `None` when the
/// gain of `S` is at most `tol`.
pub(crate) fn coefficient_projection(pair: &Pasf, tol: f64) -> Result<Option<Matrix>> {
    let s = frame_operator(pair);
    let gain = gain_lower_bound(&s, pair.r(), pair.r())?;
    if gain.lower <= tol {
        return Ok(None);
    }
    Ok(linalg::solve_refined(&s, pair.t()).map(|x| pair.f() * x))
}

/// A pair is a Riesz basis iff it is a frame and `F S⁻¹ T = I_n`.
pub fn is_riesz_basis(pair: &Pasf, tol: f64) -> Result<RieszCheck> {
    let g = match coefficient_projection(pair, tol)? {
        Some(g) => g,
        None => {
            return Ok(RieszCheck {
                is_riesz: false,
                defect: f64::INFINITY,
                defect_cert: None,
                rank: linalg::rank(&frame_operator(pair)),
            })
        }
    };
    let n = pair.n();
    let rank = linalg::rank(&g);
    let diff = g - DMatrix::identity(n, n);
    let cert = op_norm(&diff, pair.p(), pair.p())?;
    Ok(RieszCheck {
        is_riesz: cert.upper <= tol,
        defect: cert.upper,
        defect_cert: Some(cert),
        rank,
    })
}

/// `f_j = ζ_j ∘ U` and `τ_j = V e_j` with `U: X → ℓ^p_n`, `V: ℓ^p_n → X`.
#[derive(Clone, Debug, PartialEq)]
pub struct RieszFactorization {
    pub u: Matrix,
    pub v: Matrix,
    /// Largest entry of `|ζ_j U − f_j|` and `|V e_j − τ_j|`.
    pub reconstruction_error: f64,
}

/// The operators exhibiting a square Riesz pair as the image of the standard
/// pair. In finite dimension these are `U = F` and `V = T`.
pub fn riesz_factorization(pair: &Pasf, tol: f64) -> Result<RieszFactorization> {
    if pair.n() != pair.d() {
        return Err(LabError::Precondition(format!(
            "a Riesz basis of a {}-dimensional space has {} elements, got {}",
            pair.d(),
            pair.d(),
            pair.n()
        )));
    }
    let check = is_riesz_basis(pair, tol)?;
    if !check.is_riesz {
        return Err(LabError::Precondition(format!("not a Riesz basis (defect {:.3e})", check.defect)));
    }
    let d = pair.d();
    let u = pair.f().clone();
    let v = pair.t().clone();
    let id = DMatrix::<f64>::identity(d, d);
    let err_f = linalg::max_abs(&(&id * &u - pair.f()));
    let err_t = linalg::max_abs(&(&v * &id - pair.t()));
    Ok(RieszFactorization {
        u,
        v,
        reconstruction_error: err_f.max(err_t),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RieszBoundPair {
    pub lower: f64,
    pub upper: f64,
    pub lower_cert: OperatorNormEstimate,
    pub upper_cert: OperatorNormEstimate,
    pub index_set: Vec<usize>,
}

/// The pair restricted to `W = span{τ_j : j ∈ I}`, expressed in an
/// orthonormal basis of `W`.
///
/// `F_I S_W⁻¹ T_I` does not depend on the chosen basis of `W`, so the defect
/// is intrinsic even though the coordinates are not.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestrictedPairCheck {
    pub dim_w: usize,
    pub s_invertible: bool,
    pub defect: f64,
    pub passes: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RieszSequenceReport {
    pub bounds: RieszBoundPair,
    /// Synthesis-side verdict: `lower > tol`.
    pub is_riesz: bool,
    /// Pair-side verdict, reported alongside.
    pub pair_check: RestrictedPairCheck,
}

fn sorted_unique(idx: &[usize]) -> Result<Vec<usize>> {
    let mut v = idx.to_vec();
    v.sort_unstable();
    let before = v.len();
    v.dedup();
    if v.len() != before {
        return Err(LabError::Precondition("index set contains duplicates".into()));
    }
    Ok(v)
}

pub fn riesz_sequence_bounds(pair: &Pasf, idx: &[usize], tol: f64) -> Result<RieszSequenceReport> {
    riesz_sequence_bounds_with(pair, idx, tol, &NormOptions::default())
}

/// As [`riesz_sequence_bounds`], with explicit estimator options (seed,
/// number of starts) for the non-closed-form norms.
pub fn riesz_sequence_bounds_with(
    pair: &Pasf,
    idx: &[usize],
    tol: f64,
    opts: &NormOptions,
) -> Result<RieszSequenceReport> {
    if idx.is_empty() {
        return Err(LabError::Empty("Riesz sequence index set".into()));
    }
    let idx = sorted_unique(idx)?;
    let (fi, ti) = pair.restrict(&idx)?;
    let upper_cert = op_norm_with(&ti, pair.p(), pair.r(), opts)?;
    let lower_cert = gain_lower_bound_with(&ti, pair.p(), pair.r(), opts)?;
    let bounds = RieszBoundPair {
        lower: lower_cert.lower,
        upper: upper_cert.upper,
        lower_cert,
        upper_cert,
        index_set: idx.clone(),
    };
    let pair_check = restricted_pair(&fi, &ti, pair, tol)?;
    Ok(RieszSequenceReport {
        is_riesz: bounds.lower > tol,
        bounds,
        pair_check,
    })
}

fn restricted_pair(fi: &Matrix, ti: &Matrix, pair: &Pasf, tol: f64) -> Result<RestrictedPairCheck> {
    let basis = linalg::range_basis(ti);
    let k = basis.ncols();
    let m = ti.ncols();
    if k == 0 {
        return Ok(RestrictedPairCheck {
            dim_w: 0,
            s_invertible: false,
            defect: f64::INFINITY,
            passes: false,
        });
    }
    let t_w = basis.transpose() * ti;
    let f_w = fi * &basis;
    let s_w = &t_w * &f_w;
    let invertible = linalg::rank(&s_w) == k;
    if !invertible {
        return Ok(RestrictedPairCheck {
            dim_w: k,
            s_invertible: false,
            defect: f64::INFINITY,
            passes: false,
        });
    }
    let g = match linalg::solve_refined(&s_w, &t_w) {
        Some(x) => f_w * x,
        None => {
            return Ok(RestrictedPairCheck {
                dim_w: k,
                s_invertible: false,
                defect: f64::INFINITY,
                passes: false,
            })
        }
    };
    let diff = g - DMatrix::identity(m, m);
    let defect = op_norm(&diff, pair.p(), pair.p())?.upper;
    Ok(RestrictedPairCheck {
        dim_w: k,
        s_invertible: true,
        defect,
        passes: defect <= tol.max(1e-9),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsRieszCheck {
    pub holds: bool,
    pub unit_norm: bool,
    pub lower: f64,
    pub upper: f64,
    pub diagnostics: Vec<String>,
}

/// Unit-norm clause `‖f_j‖ = ‖τ_j‖ = |f_j(τ_j)| = 1` on `I` together with
/// Riesz bounds inside `[1 − ε, 1 + ε]`.
pub fn is_eps_riesz(pair: &Pasf, idx: &[usize], eps: f64, tol: f64) -> Result<EpsRieszCheck> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(LabError::OutOfRange(format!("epsilon must lie in (0, 1), got {eps}")));
    }
    let report = riesz_sequence_bounds(pair, idx, tol)?;
    let mut diagnostics = Vec::new();
    for &j in &report.bounds.index_set {
        let fnorm = pair.functional_norm(j);
        let tnorm = pair.vector_norm(j);
        let pairing = pair.pairing(j).abs();
        for (name, value) in [("||f||", fnorm), ("||tau||", tnorm), ("|f(tau)|", pairing)] {
            if (value - 1.0).abs() > tol {
                diagnostics.push(format!("index {j}: {name} = {value} is not 1"));
            }
        }
    }
    let unit_norm = diagnostics.is_empty();
    let lower = report.bounds.lower;
    let upper = report.bounds.upper;
    if lower < 1.0 - eps - tol {
        diagnostics.push(format!("lower Riesz bound {lower} < 1 - eps"));
    }
    if upper > 1.0 + eps + tol {
        diagnostics.push(format!("upper Riesz bound {upper} > 1 + eps"));
    }
    Ok(EpsRieszCheck {
        holds: diagnostics.is_empty(),
        unit_norm,
        lower,
        upper,
        diagnostics,
    })
}
