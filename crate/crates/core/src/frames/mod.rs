//! The frame pair data model and its classification predicates.
//!
//! A pair is stored as two matrices: `F` (n×d) whose row `j` is the
//! functional `f_j`, and `T` (d×n) whose column `j` is the vector `τ_j`.
//! The space is `X = (ℝ^d, ‖·‖_r)`; coefficients live in `ℓ^p_n`.

mod orthonormal;
mod riesz;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::linalg;
use crate::lp::{self, gain_lower_bound, op_norm, Exponent, Matrix, OperatorNormEstimate, Vector};

pub use orthonormal::{
    is_p_orthonormal, recover_intertwiner, Intertwiner, OrthonormalCheck, OrthonormalMode,
};
pub use riesz::{
    is_eps_riesz, is_riesz_basis, riesz_factorization, riesz_sequence_bounds, riesz_sequence_bounds_with, EpsRieszCheck,
    RestrictedPairCheck, RieszBoundPair, RieszCheck, RieszFactorization, RieszSequenceReport,
};

/// Relative tolerance for exact identity checks.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Tolerance for quantities produced by numerical optimisation.
pub const OPTIMIZATION_TOL: f64 = 1e-6;
/// Largest accepted 2-norm condition number of `S` for random pairs.
pub const RANDOM_CONDITION_CAP: f64 = 1e6;
const RANDOM_REDRAWS: usize = 100;

/// A finite frame pair `({f_j}, {τ_j})` on `(ℝ^d, ‖·‖_r)` with sequence exponent `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct Pasf {
    f: Matrix,
    t: Matrix,
    p: Exponent,
    r: Exponent,
    label: String,
}

impl Pasf {
    pub fn new(f: Matrix, t: Matrix, p: Exponent, r: Exponent, label: impl Into<String>) -> Result<Self> {
        let (n, d) = f.shape();
        if n == 0 || d == 0 {
            return Err(LabError::Empty(format!("frame needs n >= 1 and d >= 1, got n={n}, d={d}")));
        }
        if t.shape() != (d, n) {
            return Err(LabError::DimensionMismatch(format!(
                "F is {n}x{d} so T must be {d}x{n}, got {}x{}",
                t.nrows(),
                t.ncols()
            )));
        }
        if f.iter().any(|x| !x.is_finite()) {
            return Err(LabError::NonFinite("functional matrix F".into()));
        }
        if t.iter().any(|x| !x.is_finite()) {
            return Err(LabError::NonFinite("vector matrix T".into()));
        }
        Ok(Pasf {
            f,
            t,
            p,
            r,
            label: label.into(),
        })
    }

    pub fn f(&self) -> &Matrix {
        &self.f
    }

    pub fn t(&self) -> &Matrix {
        &self.t
    }

    pub fn p(&self) -> Exponent {
        self.p
    }

    pub fn r(&self) -> Exponent {
        self.r
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn d(&self) -> usize {
        self.f.ncols()
    }

    pub fn n(&self) -> usize {
        self.f.nrows()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Same matrices, different exponents.
    pub fn with_exponents(&self, p: Exponent, r: Exponent) -> Self {
        Pasf {
            p,
            r,
            ..self.clone()
        }
    }

    /// `f_j` as a column vector in `ℝ^d`.
    pub fn functional(&self, j: usize) -> Vector {
        self.f.row(j).transpose()
    }

    pub fn vector(&self, j: usize) -> Vector {
        self.t.column(j).into_owned()
    }

    /// `‖f_j‖` in the dual norm `r*`.
    pub fn functional_norm(&self, j: usize) -> f64 {
        lp::row_norm(&self.f, j, self.r.dual())
    }

    pub fn vector_norm(&self, j: usize) -> f64 {
        lp::col_norm(&self.t, j, self.r)
    }

    /// `f_j(τ_j)`.
    pub fn pairing(&self, j: usize) -> f64 {
        self.f.row(j).dot(&self.t.column(j).transpose())
    }

    /// Restriction to the ordered index list `idx`: `(F_I, T_I)`.
    pub fn restrict(&self, idx: &[usize]) -> Result<(Matrix, Matrix)> {
        check_indices(idx, self.n())?;
        let d = self.d();
        let fi = DMatrix::from_fn(idx.len(), d, |i, c| self.f[(idx[i], c)]);
        let ti = DMatrix::from_fn(d, idx.len(), |rw, j| self.t[(rw, idx[j])]);
        Ok((fi, ti))
    }

    /// Sub-pair on `idx` as a pair in its own right.
    pub fn subpair(&self, idx: &[usize]) -> Result<Pasf> {
        let (fi, ti) = self.restrict(idx)?;
        Pasf::new(fi, ti, self.p, self.r, format!("{}[{:?}]", self.label, idx))
    }

    /// The pair `(f_j ∘ V⁻¹, V τ_j)` for an invertible `V`.
    pub fn transformed(&self, v: &Matrix) -> Result<Pasf> {
        let d = self.d();
        if v.shape() != (d, d) {
            return Err(LabError::DimensionMismatch(format!("transform must be {d}x{d}")));
        }
        let inv = v
            .clone()
            .try_inverse()
            .ok_or_else(|| LabError::Singular("transform not invertible".into()))?;
        Pasf::new(&self.f * inv, v * &self.t, self.p, self.r, format!("{}^V", self.label))
    }
}

pub(crate) fn check_indices(idx: &[usize], n: usize) -> Result<()> {
    for &i in idx {
        if i >= n {
            return Err(LabError::IndexOutOfRange { index: i, len: n });
        }
    }
    Ok(())
}

/// Generator recipes for [`make_pasf`].
#[derive(Clone, Debug, PartialEq)]
pub enum PasfKind {
    /// `F = T = I_d`.
    Standard { d: usize },
    /// Each `e_i` repeated `k` times consecutively, functionals `ζ_i / k`.
    DuplicatedStandard { d: usize, k: usize },
    /// Gaussian entries from a seeded ChaCha8 stream, redrawn until
    /// `cond₂(S) ≤ RANDOM_CONDITION_CAP`.
    Random { d: usize, n: usize, seed: u64 },
    Explicit { f: Matrix, t: Matrix },
}

pub fn make_pasf(kind: PasfKind, p: Exponent, r: Exponent) -> Result<Pasf> {
    match kind {
        PasfKind::Standard { d } => {
            if d == 0 {
                return Err(LabError::Empty("standard pair needs d >= 1".into()));
            }
            Pasf::new(DMatrix::identity(d, d), DMatrix::identity(d, d), p, r, format!("standard-d{d}"))
        }
        PasfKind::DuplicatedStandard { d, k } => {
            if d == 0 || k == 0 {
                return Err(LabError::Empty("duplicated-standard needs d, k >= 1".into()));
            }
            let n = d * k;
            let mut f = DMatrix::zeros(n, d);
            let mut t = DMatrix::zeros(d, n);
            for j in 0..n {
                let i = j / k;
                f[(j, i)] = 1.0 / k as f64;
                t[(i, j)] = 1.0;
            }
            Pasf::new(f, t, p, r, format!("duplicated-standard-d{d}-k{k}"))
        }
        PasfKind::Random { d, n, seed } => {
            if d == 0 || n == 0 {
                return Err(LabError::Empty("random pair needs d, n >= 1".into()));
            }
            if n < d {
                return Err(LabError::DimensionMismatch(format!(
                    "n = {n} < d = {d} cannot give an invertible frame operator"
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..RANDOM_REDRAWS {
                let f = DMatrix::from_fn(n, d, |_, _| StandardNormal.sample(&mut rng));
                let t = DMatrix::from_fn(d, n, |_, _| StandardNormal.sample(&mut rng));
                let s = &t * &f;
                if linalg::condition_number(&s) <= RANDOM_CONDITION_CAP {
                    return Pasf::new(f, t, p, r, format!("random-d{d}-n{n}-seed{seed}"));
                }
            }
            Err(LabError::Singular(format!(
                "no draw with cond(S) <= {RANDOM_CONDITION_CAP:e} after {RANDOM_REDRAWS} attempts"
            )))
        }
        PasfKind::Explicit { f, t } => Pasf::new(f, t, p, r, "explicit"),
    }
}

/// `S = T·F`, i.e. `Sx = Σ f_j(x) τ_j`.
pub fn frame_operator(pair: &Pasf) -> Matrix {
    pair.t() * pair.f()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameBounds {
    pub a: f64,
    pub b: f64,
    pub a_cert: OperatorNormEstimate,
    pub b_cert: OperatorNormEstimate,
}

/// `b` is the certified upper end of `‖S‖_{r→r}`, `a` the certified lower end
/// of the gain of `S`.
pub fn frame_bounds(pair: &Pasf) -> Result<FrameBounds> {
    let s = frame_operator(pair);
    let b_cert = op_norm(&s, pair.r(), pair.r())?;
    let a_cert = gain_lower_bound(&s, pair.r(), pair.r())?;
    Ok(FrameBounds {
        a: a_cert.lower,
        b: b_cert.upper,
        a_cert,
        b_cert,
    })
}

/// Classification tags ordered by strength.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrameTag {
    BesselOnly,
    Asf,
    Tight,
    Parseval,
    RieszBasis,
    POrthonormalBasis,
}

impl FrameTag {
    pub fn as_str(self) -> &'static str {
        match self {
            FrameTag::BesselOnly => "bessel-only",
            FrameTag::Asf => "asf",
            FrameTag::Tight => "tight",
            FrameTag::Parseval => "parseval",
            FrameTag::RieszBasis => "riesz-basis",
            FrameTag::POrthonormalBasis => "p-orthonormal-basis",
        }
    }
}

/// One line of the evidence trail.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub predicate: String,
    pub passed: bool,
    pub value: Option<f64>,
    pub detail: String,
}

impl Evidence {
    fn new(predicate: &str, passed: bool, value: Option<f64>, detail: impl Into<String>) -> Self {
        Evidence {
            predicate: predicate.into(),
            passed,
            value,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameClass {
    pub tag: FrameTag,
    /// Estimated tightness constant `trace(S)/d` (present when tight or Parseval passed).
    pub lambda: Option<f64>,
    pub bounds: FrameBounds,
    pub evidence: Vec<Evidence>,
}

impl FrameClass {
    pub fn passed(&self, predicate: &str) -> bool {
        self.evidence.iter().any(|e| e.predicate == predicate && e.passed)
    }
}

/// Strongest passing tag, with every predicate evaluated and recorded.
pub fn classify(pair: &Pasf, tol: f64) -> Result<FrameClass> {
    let s = frame_operator(pair);
    let d = pair.d();
    let bounds = frame_bounds(pair)?;
    let mut evidence = Vec::new();

    let asf = bounds.a > tol;
    evidence.push(Evidence::new(
        "asf",
        asf,
        Some(bounds.a),
        format!("lower frame bound {:.6e}, upper {:.6e}", bounds.a, bounds.b),
    ));

    let lambda = s.trace() / d as f64;
    let shifted = &s - DMatrix::identity(d, d) * lambda;
    let dev = op_norm(&shifted, pair.r(), pair.r())?.upper;
    let tight = asf && dev <= tol * lambda.abs();
    evidence.push(Evidence::new(
        "tight",
        tight,
        Some(dev),
        format!("||S - lambda I|| = {dev:.3e} with lambda = trace(S)/d = {lambda:.12}"),
    ));
    let parseval = tight && (lambda - 1.0).abs() <= tol;
    evidence.push(Evidence::new(
        "parseval",
        parseval,
        Some((lambda - 1.0).abs()),
        format!("|lambda - 1| = {:.3e}", (lambda - 1.0).abs()),
    ));

    let riesz = is_riesz_basis(pair, tol)?;
    evidence.push(Evidence::new(
        "riesz-basis",
        riesz.is_riesz,
        Some(riesz.defect),
        format!(
            "||F S^-1 T - I||_(p,p) = {:.3e}, rank(F S^-1 T) = {} of n = {}",
            riesz.defect,
            riesz.rank,
            pair.n()
        ),
    ));

    let onb = if pair.n() == d {
        let full: Vec<usize> = (0..d).collect();
        let check = is_p_orthonormal(pair, &full, OrthonormalMode::Basis, tol)?;
        let detail = if check.diagnostics.is_empty() {
            "all p-orthonormal basis conditions hold".to_string()
        } else {
            check.diagnostics.join("; ")
        };
        evidence.push(Evidence::new("p-orthonormal-basis", check.holds, None, detail));
        check.holds
    } else {
        evidence.push(Evidence::new(
            "p-orthonormal-basis",
            false,
            None,
            format!("n = {} differs from d = {d}", pair.n()),
        ));
        false
    };

    let tag = if onb && riesz.is_riesz {
        FrameTag::POrthonormalBasis
    } else if riesz.is_riesz {
        FrameTag::RieszBasis
    } else if parseval {
        FrameTag::Parseval
    } else if tight {
        FrameTag::Tight
    } else if asf {
        FrameTag::Asf
    } else {
        FrameTag::BesselOnly
    };
    Ok(FrameClass {
        tag,
        lambda: if tight { Some(lambda) } else { None },
        bounds,
        evidence,
    })
}

/// `Σ_{j∈J} τ_j`.
pub fn vector_sum(pair: &Pasf, idx: &[usize]) -> Result<Vector> {
    check_indices(idx, pair.n())?;
    let mut v = DVector::zeros(pair.d());
    for &j in idx {
        v += pair.t().column(j);
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(v: f64) -> Exponent {
        Exponent::new(v).unwrap()
    }

    #[test]
    fn duplicated_standard_layout() {
        let pair = make_pasf(PasfKind::DuplicatedStandard { d: 2, k: 2 }, Exponent::TWO, Exponent::TWO).unwrap();
        assert_eq!(pair.n(), 4);
        assert_eq!(pair.vector(0), pair.vector(1));
        assert_eq!(frame_operator(&pair), DMatrix::identity(2, 2));
        assert_eq!(classify(&pair, DEFAULT_TOL).unwrap().tag, FrameTag::Parseval);
    }

    #[test]
    fn random_is_deterministic() {
        let a = make_pasf(PasfKind::Random { d: 3, n: 5, seed: 7 }, e(1.5), e(3.0)).unwrap();
        let b = make_pasf(PasfKind::Random { d: 3, n: 5, seed: 7 }, e(1.5), e(3.0)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn shape_checked() {
        let f = DMatrix::zeros(3, 2);
        let t = DMatrix::zeros(3, 2);
        assert!(matches!(
            Pasf::new(f, t, Exponent::TWO, Exponent::TWO, ""),
            Err(LabError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn repeated_e1_is_bessel_only() {
        let f = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 0.0]);
        let t = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 0.0]);
        let pair = Pasf::new(f, t, Exponent::TWO, Exponent::TWO, "").unwrap();
        assert_eq!(classify(&pair, DEFAULT_TOL).unwrap().tag, FrameTag::BesselOnly);
    }

    #[test]
    fn diagonal_bounds() {
        let s = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 3.0]));
        for r in [1.0, 1.5, 2.0, 4.0] {
            let pair = Pasf::new(DMatrix::identity(2, 2), s.clone(), e(2.0), e(r), "").unwrap();
            let fb = frame_bounds(&pair).unwrap();
            assert_eq!((fb.a, fb.b), (1.0, 3.0));
        }
    }

    #[test]
    fn standard_is_onb() {
        for p in [1.0, 1.5, 2.0, 3.0] {
            let pair = make_pasf(PasfKind::Standard { d: 2 }, e(p), e(p)).unwrap();
            assert_eq!(classify(&pair, DEFAULT_TOL).unwrap().tag, FrameTag::POrthonormalBasis);
        }
    }
}
