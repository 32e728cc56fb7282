//! Small dense helpers shared across modules (rank, null space, pseudo-inverse).

use nalgebra::{DMatrix, DVector};

use crate::lp::{Matrix, Vector};

/// Relative rank tolerance in the style of `numpy.linalg.matrix_rank`.
pub(crate) fn rank_tolerance(singular: &DVector<f64>, rows: usize, cols: usize) -> f64 {
    let smax = singular.iter().cloned().fold(0.0_f64, f64::max);
    smax * (rows.max(cols) as f64) * f64::EPSILON * 4.0
}

pub(crate) fn singular_values(a: &Matrix) -> DVector<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return DVector::zeros(0);
    }
    a.clone().svd(false, false).singular_values
}

pub(crate) fn rank(a: &Matrix) -> usize {
    let s = singular_values(a);
    let tol = rank_tolerance(&s, a.nrows(), a.ncols());
    s.iter().filter(|&&v| v > tol).count()
}

/// Orthonormal basis (columns) of ker A. Always returns `ncols - rank` columns.
pub(crate) fn null_space(a: &Matrix) -> Matrix {
    let (m, n) = a.shape();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    // Pad to at least square so the thin SVD yields a full right basis.
    let rows = m.max(n);
    let mut padded = DMatrix::zeros(rows, n);
    padded.view_mut((0, 0), (m, n)).copy_from(a);
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let tol = rank_tolerance(&svd.singular_values, m, n);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        svd.singular_values[i]
            .partial_cmp(&svd.singular_values[j])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let kernel: Vec<usize> = order
        .into_iter()
        .filter(|&i| svd.singular_values[i] <= tol)
        .collect();
    let mut basis = DMatrix::zeros(n, kernel.len());
    for (c, &i) in kernel.iter().enumerate() {
        let row = vt.row(i).transpose();
        basis.set_column(c, &canonical_sign(row));
    }
    basis
}

/// Orthonormal basis of the column space of A.
pub(crate) fn range_basis(a: &Matrix) -> Matrix {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return DMatrix::zeros(m, 0);
    }
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("u requested");
    let tol = rank_tolerance(&svd.singular_values, m, n);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > tol)
        .collect();
    let mut basis = DMatrix::zeros(m, keep.len());
    for (c, &i) in keep.iter().enumerate() {
        basis.set_column(c, &u.column(i));
    }
    basis
}

pub(crate) fn pseudo_inverse(a: &Matrix) -> Matrix {
    let (m, n) = a.shape();
    let svd = a.clone().svd(true, true);
    let tol = rank_tolerance(&svd.singular_values, m, n);
    svd.pseudo_inverse(tol.max(f64::MIN_POSITIVE))
        .unwrap_or_else(|_| DMatrix::zeros(n, m))
}

/// Flip sign so that the entry of largest magnitude is positive.
pub(crate) fn canonical_sign(v: Vector) -> Vector {
    let mut best = 0.0_f64;
    let mut sign = 1.0;
    for &x in v.iter() {
        if x.abs() > best + 1e-14 {
            best = x.abs();
            sign = x.signum();
        }
    }
    v * sign
}

pub(crate) fn max_abs(a: &Matrix) -> f64 {
    a.iter().fold(0.0_f64, |m, &x| m.max(x.abs()))
}

/// 2-norm condition number; infinite when singular.
pub(crate) fn condition_number(a: &Matrix) -> f64 {
    let s = singular_values(a);
    if s.is_empty() {
        return f64::INFINITY;
    }
    let smax = s.max();
    let smin = s.min();
    if smin <= 0.0 {
        f64::INFINITY
    } else {
        smax / smin
    }
}

/// Solve `S X = B` with one round of iterative refinement.
pub(crate) fn solve_refined(s: &Matrix, b: &Matrix) -> Option<Matrix> {
    let lu = s.clone().lu();
    let mut x = lu.solve(b)?;
    let residual = b - s * &x;
    if let Some(dx) = lu.solve(&residual) {
        x += dx;
    }
    Some(x)
}
