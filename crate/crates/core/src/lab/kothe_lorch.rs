//! Raw condition results for the expansion problem: Riesz basis, the
//! expansion identity `S = I`, and the norm sandwich. No verdict is drawn.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::frames::{frame_operator, is_riesz_basis, Pasf, RieszCheck};
use crate::lp::op_norm;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KotheLorchReport {
    pub riesz: RieszCheck,
    /// Upper end of `‖S − I‖_{r→r}`.
    pub expansion_defect: f64,
    pub expansion_holds: bool,
    /// `(inf, sup)` of `‖τ_j‖`.
    pub vector_norms: (f64, f64),
    /// `(inf, sup)` of `‖f_j‖` in the dual norm.
    pub functional_norms: (f64, f64),
    pub vector_sandwich: bool,
    pub functional_sandwich: bool,
}

pub fn kothe_lorch_check(pair: &Pasf, tol: f64) -> Result<KotheLorchReport> {
    let d = pair.d();
    let n = pair.n();
    let riesz = is_riesz_basis(pair, tol)?;
    let diff = frame_operator(pair) - DMatrix::identity(d, d);
    let expansion_defect = op_norm(&diff, pair.r(), pair.r())?.upper;
    let range = |vals: Vec<f64>| {
        vals.iter()
            .fold((f64::INFINITY, 0.0_f64), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    };
    let vector_norms = range((0..n).map(|j| pair.vector_norm(j)).collect());
    let functional_norms = range((0..n).map(|j| pair.functional_norm(j)).collect());
    Ok(KotheLorchReport {
        riesz,
        expansion_holds: expansion_defect <= tol,
        expansion_defect,
        vector_sandwich: vector_norms.0 > 0.0 && vector_norms.1.is_finite(),
        functional_sandwich: functional_norms.0 > 0.0 && functional_norms.1.is_finite(),
        vector_norms,
        functional_norms,
    })
}
