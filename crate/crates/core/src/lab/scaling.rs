//! Diagonal rescaling `(a_j f_j, b_j τ_j)` of a pair to a Parseval pair.
//!
//! The frame operator of the rescaled pair is `Σ_j a_j b_j τ_j f_j`, so the
//! problem is linear in `c_j = a_j b_j`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::frames::Pasf;
use crate::linalg;
use crate::lp::Matrix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingSolution {
    /// Minimum-norm least-squares products `c_j = a_j b_j`.
    pub c: Vec<f64>,
    /// Functional scalars `a_j = sign(c_j) √|c_j|`.
    pub a: Vec<f64>,
    /// Vector scalars `b_j = √|c_j|`.
    pub b: Vec<f64>,
    /// Frobenius norm of `Σ c_j τ_j f_j − I`.
    pub residual: f64,
    pub scalable: bool,
    /// Number of negative products; positive means signed scalars were used.
    pub negative_count: usize,
}

impl ScalingSolution {
    /// `(diag(a) F, T diag(b))`.
    pub fn apply(&self, pair: &Pasf) -> Result<Pasf> {
        let a = DMatrix::from_diagonal(&DVector::from_column_slice(&self.a));
        let b = DMatrix::from_diagonal(&DVector::from_column_slice(&self.b));
        Pasf::new(a * pair.f(), pair.t() * b, pair.p(), pair.r(), format!("{}-scaled", pair.label()))
    }
}

pub const SCALING_TOL: f64 = 1e-9;

pub fn scaling_solve(pair: &Pasf) -> Result<ScalingSolution> {
    let d = pair.d();
    let n = pair.n();
    let mut a: Matrix = DMatrix::zeros(d * d, n);
    for j in 0..n {
        let rank_one = pair.t().column(j) * pair.f().row(j);
        a.set_column(j, &DVector::from_column_slice(rank_one.as_slice()));
    }
    let id = DMatrix::<f64>::identity(d, d);
    let rhs = DVector::from_column_slice(id.as_slice());
    let c = linalg::pseudo_inverse(&a) * &rhs;
    let residual = (&a * &c - rhs).norm();
    let c: Vec<f64> = c.iter().copied().collect();
    let b: Vec<f64> = c.iter().map(|x| x.abs().sqrt()).collect();
    let a_s: Vec<f64> = c.iter().zip(&b).map(|(x, s)| if *x < 0.0 { -s } else { *s }).collect();
    Ok(ScalingSolution {
        negative_count: c.iter().filter(|x| **x < 0.0).count(),
        a: a_s,
        b,
        c,
        residual,
        scalable: residual <= SCALING_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{classify, FrameTag};
    use crate::lp::Exponent;

    #[test]
    fn repeated_direction_scales() {
        let f = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 1.0, 0.0, 0.0, 1.0]);
        let pair = Pasf::new(f.clone(), f.transpose(), Exponent::TWO, Exponent::TWO, "").unwrap();
        let sol = scaling_solve(&pair).unwrap();
        assert!(sol.scalable);
        // Minimum-norm solution splits the first direction evenly.
        assert!((sol.c[0] - 0.5).abs() < 1e-12 && (sol.c[1] - 0.5).abs() < 1e-12 && (sol.c[2] - 1.0).abs() < 1e-12);
        let scaled = sol.apply(&pair).unwrap();
        assert_eq!(classify(&scaled, 1e-8).unwrap().tag, FrameTag::Parseval);
    }

    #[test]
    fn rank_obstruction() {
        let f = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 0.0]);
        let pair = Pasf::new(f.clone(), f.transpose(), Exponent::TWO, Exponent::TWO, "").unwrap();
        let sol = scaling_solve(&pair).unwrap();
        assert!(!sol.scalable);
        assert!(sol.residual >= 1.0 - 1e-12);
    }
}
