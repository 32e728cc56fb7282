//! Iterated systems `(f_k U^m, V^m τ_k)`.

use nalgebra::DMatrix;

use crate::error::{LabError, Result};
use crate::frames::Pasf;
use crate::lp::{Exponent, Matrix};

/// Element `(k, m)` sits at index `k·M + m`: generator-major, powers
/// `m = 0..M−1` inner.
pub fn dynamical_build(
    generators_f: &Matrix,
    generators_t: &Matrix,
    u: &Matrix,
    v: &Matrix,
    horizon: usize,
    p: Exponent,
    r: Exponent,
) -> Result<Pasf> {
    if horizon == 0 {
        return Err(LabError::OutOfRange("horizon must be at least 1".into()));
    }
    let k = generators_f.nrows();
    let d = generators_f.ncols();
    if generators_t.shape() != (d, k) {
        return Err(LabError::DimensionMismatch(format!(
            "functional generators are {k}x{d}, vector generators must be {d}x{k}, got {}x{}",
            generators_t.nrows(),
            generators_t.ncols()
        )));
    }
    for (name, m) in [("U", u), ("V", v)] {
        if m.shape() != (d, d) {
            return Err(LabError::DimensionMismatch(format!(
                "{name} must be {d}x{d}, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
    }
    let n = k * horizon;
    let mut f = DMatrix::zeros(n, d);
    let mut t = DMatrix::zeros(d, n);
    for g in 0..k {
        let mut row = generators_f.row(g).into_owned();
        let mut col = generators_t.column(g).into_owned();
        for m in 0..horizon {
            let idx = g * horizon + m;
            f.set_row(idx, &row);
            t.set_column(idx, &col);
            row = &row * u;
            col = v * &col;
        }
    }
    Pasf::new(f, t, p, r, format!("dynamical-k{k}-m{horizon}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{classify, FrameTag};

    #[test]
    fn swap_gives_standard_pair() {
        let e1 = DMatrix::from_row_slice(1, 2, &[1.0, 0.0]);
        let swap = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let pair = dynamical_build(&e1, &e1.transpose(), &swap, &swap, 2, Exponent::TWO, Exponent::TWO).unwrap();
        assert_eq!(pair.f(), &DMatrix::identity(2, 2));
        assert_eq!(pair.t(), &DMatrix::identity(2, 2));
        assert_eq!(classify(&pair, 1e-9).unwrap().tag, FrameTag::POrthonormalBasis);
    }

    #[test]
    fn zero_dynamics_is_bessel_only() {
        let e1 = DMatrix::from_row_slice(1, 2, &[1.0, 0.0]);
        let zero = DMatrix::zeros(2, 2);
        let pair = dynamical_build(&e1, &e1.transpose(), &zero, &zero, 2, Exponent::TWO, Exponent::TWO).unwrap();
        assert_eq!(classify(&pair, 1e-9).unwrap().tag, FrameTag::BesselOnly);
    }
}
