//! Iterative reconstruction `x_k = x_{k−1} + (2/(a+b))(T c − S x_{k−1})`
//! from analysis coefficients `c = F x`, with its convergence condition.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::frames::{frame_bounds, frame_operator, Pasf};
use crate::lp::{op_norm, vec_norm, Vector};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmCondition {
    pub a: f64,
    pub b: f64,
    /// `‖I − (2/(a+b)) S‖_{r→r}` (certified upper end).
    pub condition_value: f64,
    /// `(b − a)/(b + a)`.
    pub ratio_bound: f64,
    pub holds: bool,
}

pub fn check_algorithm_condition(pair: &Pasf) -> Result<AlgorithmCondition> {
    let bounds = frame_bounds(pair)?;
    let (a, b) = (bounds.a, bounds.b);
    if a <= 0.0 {
        return Err(LabError::Precondition("frame operator has no positive lower bound".into()));
    }
    let d = pair.d();
    let s = frame_operator(pair);
    let step = 2.0 / (a + b);
    let m = DMatrix::identity(d, d) - s * step;
    let condition_value = op_norm(&m, pair.r(), pair.r())?.upper;
    let ratio_bound = (b - a) / (b + a);
    Ok(AlgorithmCondition {
        a,
        b,
        condition_value,
        ratio_bound,
        holds: condition_value <= ratio_bound + 1e-12,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionTrace {
    /// `x_0 = 0, x_1, …`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterates: Option<Vec<Vec<f64>>>,
    /// `‖x_k − x‖_r` with ground truth, else the residual `‖T c − S x_k‖_r`.
    pub errors: Vec<f64>,
    pub errors_are_residuals: bool,
    pub ratio_bound: f64,
    pub condition_value: f64,
    pub condition_holds: bool,
    /// Whether `errors[k] ≤ ratio_bound^k ‖x‖` is guaranteed by the theorem
    /// (needs the condition and ground truth).
    pub bound_guaranteed: bool,
    pub converged: bool,
    pub step: f64,
}

impl ReconstructionTrace {
    pub fn iterate(&self, k: usize) -> Option<Vector> {
        self.iterates
            .as_ref()
            .and_then(|it| it.get(k))
            .map(|v| DVector::from_column_slice(v))
    }

    pub fn steps(&self) -> usize {
        self.errors.len().saturating_sub(1)
    }

    /// Drop the iterates, e.g. before writing a compact report.
    pub fn without_iterates(mut self) -> Self {
        self.iterates = None;
        self
    }
}

/// Runs until `errors[k] ≤ tol` or `max_iters` updates.
pub fn duffin_schaeffer(
    pair: &Pasf,
    c: &[f64],
    max_iters: usize,
    tol: f64,
    ground_truth: Option<&[f64]>,
) -> Result<ReconstructionTrace> {
    if c.len() != pair.n() {
        return Err(LabError::DimensionMismatch(format!(
            "coefficient vector has length {}, frame has n = {}",
            c.len(),
            pair.n()
        )));
    }
    if let Some(x) = ground_truth {
        if x.len() != pair.d() {
            return Err(LabError::DimensionMismatch(format!(
                "ground truth has length {}, space has d = {}",
                x.len(),
                pair.d()
            )));
        }
    }
    let cond = check_algorithm_condition(pair)?;
    let s = frame_operator(pair);
    let rhs = pair.t() * DVector::from_column_slice(c);
    let truth = ground_truth.map(DVector::from_column_slice);
    let step = 2.0 / (cond.a + cond.b);
    let r = pair.r();
    let measure = |x: &Vector| match &truth {
        Some(t) => vec_norm(&(x - t), r),
        None => vec_norm(&(&rhs - &s * x), r),
    };

    let mut x = DVector::zeros(pair.d());
    let mut iterates = vec![x.as_slice().to_vec()];
    let mut errors = vec![measure(&x)];
    let mut converged = errors[0] <= tol;
    for _ in 0..max_iters {
        if converged {
            break;
        }
        let update = (&rhs - &s * &x) * step;
        x += update;
        let err = measure(&x);
        iterates.push(x.as_slice().to_vec());
        errors.push(err);
        converged = err <= tol;
    }
    Ok(ReconstructionTrace {
        iterates: Some(iterates),
        errors,
        errors_are_residuals: truth.is_none(),
        ratio_bound: cond.ratio_bound,
        condition_value: cond.condition_value,
        condition_holds: cond.holds,
        bound_guaranteed: cond.holds && truth.is_some(),
        converged,
        step,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{make_pasf, PasfKind};
    use crate::lp::Exponent;

    fn diag13() -> Pasf {
        let s = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 3.0]));
        Pasf::new(DMatrix::identity(2, 2), s, Exponent::TWO, Exponent::TWO, "diag13").unwrap()
    }

    #[test]
    fn equality_case() {
        let cond = check_algorithm_condition(&diag13()).unwrap();
        assert_eq!(cond.condition_value, 0.5);
        assert_eq!(cond.ratio_bound, 0.5);
        assert!(cond.holds);
    }

    #[test]
    fn shear_fails_condition() {
        let s = DMatrix::from_row_slice(2, 2, &[1.0, 10.0, 0.0, 1.0]);
        let pair = Pasf::new(DMatrix::identity(2, 2), s, Exponent::TWO, Exponent::TWO, "").unwrap();
        let cond = check_algorithm_condition(&pair).unwrap();
        assert!(cond.condition_value > cond.ratio_bound);
        assert!(!cond.holds);
    }

    #[test]
    fn parseval_one_step() {
        let pair = make_pasf(PasfKind::Standard { d: 3 }, Exponent::TWO, Exponent::TWO).unwrap();
        let x = [0.5, -1.0, 2.0];
        let trace = duffin_schaeffer(&pair, &x, 50, 1e-12, Some(&x)).unwrap();
        assert_eq!(trace.steps(), 1);
        assert_eq!(trace.iterate(1).unwrap().as_slice(), &x);
    }

    #[test]
    fn halving_errors() {
        let pair = diag13();
        let x = [1.0, 1.0];
        let c: Vec<f64> = (pair.f() * DVector::from_column_slice(&x)).as_slice().to_vec();
        let trace = duffin_schaeffer(&pair, &c, 60, 1e-15, Some(&x)).unwrap();
        for k in 1..trace.errors.len() {
            if trace.errors[k - 1] > 1e-13 {
                assert!(trace.errors[k] <= 0.5 * trace.errors[k - 1] + 1e-15);
            }
        }
    }

    #[test]
    fn length_mismatch() {
        assert!(duffin_schaeffer(&diag13(), &[1.0], 5, 1e-9, None).is_err());
    }
}
