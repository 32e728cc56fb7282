//! ℓʳ arithmetic on real vectors and matrices, plus certified operator-norm
//! estimation and isometry tests.

mod estimate;
mod isometry;

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{LabError, Result};

pub use estimate::{
    gain_lower_bound, gain_lower_bound_with, norm_ratio, op_norm, op_norm_with, Extremum,
    NormMethod, NormOptions, OperatorNormEstimate,
};
pub use isometry::{is_isometry, signed_permutations, IsometryCheck, SignedPermutation, SignedPermutations};

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

/// A norm exponent in `[1, ∞]`. Infinity only arises as the dual of 1.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Exponent(f64);

impl Exponent {
    pub const ONE: Exponent = Exponent(1.0);
    pub const TWO: Exponent = Exponent(2.0);
    pub const INFINITY: Exponent = Exponent(f64::INFINITY);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value < 1.0 {
            return Err(LabError::InvalidExponent(value));
        }
        Ok(Exponent(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    pub fn is_one(self) -> bool {
        self.0 == 1.0
    }

    pub fn is_two(self) -> bool {
        self.0 == 2.0
    }

    /// Conjugate exponent `q` with `1/p + 1/q = 1`.
    pub fn dual(self) -> Exponent {
        dual_exponent(self)
    }

    /// `1/p`, zero for `p = ∞`.
    pub fn reciprocal(self) -> f64 {
        if self.is_infinite() {
            0.0
        } else {
            1.0 / self.0
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        let value = match Repr::deserialize(d)? {
            Repr::Num(v) => v,
            Repr::Text(t) => match t.to_ascii_lowercase().as_str() {
                "inf" | "infinity" => f64::INFINITY,
                other => other
                    .parse::<f64>()
                    .map_err(|_| serde::de::Error::custom(format!("bad exponent {t:?}")))?,
            },
        };
        Exponent::new(value).map_err(serde::de::Error::custom)
    }
}

/// `(Σ|v_i|^e)^(1/e)`, or `max|v_i|` for `e = ∞`.
///
/// Scaled by the largest magnitude so neither overflow nor underflow occurs
/// for moderate exponents.
pub fn p_norm(v: &[f64], e: Exponent) -> f64 {
    let amax = v.iter().fold(0.0_f64, |m, &x| m.max(x.abs()));
    if amax == 0.0 || e.is_infinite() {
        return amax;
    }
    if e.is_one() {
        return v.iter().map(|x| x.abs()).sum();
    }
    let p = e.value();
    let sum: f64 = if e.is_two() {
        v.iter().map(|&x| (x / amax) * (x / amax)).sum()
    } else {
        v.iter().map(|&x| (x.abs() / amax).powf(p)).sum()
    };
    if e.is_two() {
        amax * sum.sqrt()
    } else {
        amax * sum.powf(1.0 / p)
    }
}

pub fn vec_norm(v: &Vector, e: Exponent) -> f64 {
    p_norm(v.as_slice(), e)
}

/// Norm of row `i` of `m`.
pub fn row_norm(m: &Matrix, i: usize, e: Exponent) -> f64 {
    let row: Vec<f64> = m.row(i).iter().copied().collect();
    p_norm(&row, e)
}

pub fn col_norm(m: &Matrix, j: usize, e: Exponent) -> f64 {
    p_norm(m.column(j).as_slice(), e)
}

pub fn dual_exponent(e: Exponent) -> Exponent {
    if e.is_one() {
        Exponent::INFINITY
    } else if e.is_infinite() {
        Exponent::ONE
    } else if e.is_two() {
        Exponent::TWO
    } else {
        let p = e.value();
        Exponent(p / (p - 1.0))
    }
}

/// Norming functional of `y`: a vector `w` with `‖w‖_{e*} = 1` and `wᵀy = ‖y‖_e`.
pub fn dual_vector(y: &[f64], e: Exponent) -> Vec<f64> {
    let n = y.len();
    let mut w = vec![0.0; n];
    let norm = p_norm(y, e);
    if norm == 0.0 {
        return w;
    }
    if e.is_one() {
        for (wi, &yi) in w.iter_mut().zip(y) {
            *wi = if yi == 0.0 { 0.0 } else { yi.signum() };
        }
    } else if e.is_infinite() {
        let mut k = 0;
        for (i, &yi) in y.iter().enumerate() {
            if yi.abs() > y[k].abs() {
                k = i;
            }
        }
        w[k] = y[k].signum();
    } else {
        let q = e.value();
        for (wi, &yi) in w.iter_mut().zip(y) {
            *wi = yi.signum() * (yi.abs() / norm).powf(q - 1.0);
        }
    }
    w
}

/// Normalise `v` to unit `e`-norm (returns `v` unchanged when zero).
pub fn normalized(v: &Vector, e: Exponent) -> Vector {
    let n = vec_norm(v, e);
    if n == 0.0 {
        v.clone()
    } else {
        v / n
    }
}
