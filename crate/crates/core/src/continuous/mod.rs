//! Continuous frame pairs on an interval, sampled through a quadrature rule.
//!
//! Integrals `∫ f_α(x) τ_α w(α) dα` become sums over quadrature nodes. The
//! discretised pair puts `(w_i q_i)^{1/p}` on the functionals and
//! `(w_i q_i)^{1/q}` on the vectors, so its frame operator equals the
//! quadrature frame operator and its analysis norm is a quadrature of the
//! `L^p` norm.

mod bridge;
mod quadrature;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::frames::Pasf;
use crate::linalg;
use crate::lp::{op_norm, p_norm, Exponent, Matrix, OperatorNormEstimate};

pub use bridge::{continuous_conjecture_bridge, BridgeProblem};
pub use quadrature::{Quadrature, QuadratureRule};

pub type DensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type FamilyFn = Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>;

/// A continuous pair `({f_α}, {τ_α})` over `[α₀, α₁]` with density `w`.
#[derive(Clone)]
pub struct ContinuousPasf {
    domain: (f64, f64),
    d: usize,
    weight: DensityFn,
    f: FamilyFn,
    tau: FamilyFn,
    p: Exponent,
    r: Exponent,
    label: String,
}

impl fmt::Debug for ContinuousPasf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ContinuousPasf")
            .field("domain", &self.domain)
            .field("d", &self.d)
            .field("p", &self.p)
            .field("r", &self.r)
            .field("label", &self.label)
            .finish_non_exhaustive()
    }
}

/// Point samples of a family; evaluation interpolates linearly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TabulatedFamily {
    pub alpha: Vec<f64>,
    pub weight: Vec<f64>,
    /// One row `f(α_i)` per sample.
    pub f: Vec<Vec<f64>>,
    /// One vector `τ(α_i)` per sample.
    pub tau: Vec<Vec<f64>>,
}

impl TabulatedFamily {
    pub fn d(&self) -> usize {
        self.f.first().map_or(0, Vec::len)
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.alpha.len();
        if m < 2 {
            return Err(LabError::Empty("a tabulated family needs at least two samples".into()));
        }
        if self.weight.len() != m || self.f.len() != m || self.tau.len() != m {
            return Err(LabError::DimensionMismatch("tabulated columns differ in length".into()));
        }
        let d = self.d();
        if d == 0 {
            return Err(LabError::Empty("tabulated family has d = 0".into()));
        }
        if self.f.iter().chain(&self.tau).any(|row| row.len() != d) {
            return Err(LabError::DimensionMismatch(format!("every f and tau row needs {d} entries")));
        }
        let all = self
            .alpha
            .iter()
            .chain(&self.weight)
            .chain(self.f.iter().flatten())
            .chain(self.tau.iter().flatten());
        if all.clone().any(|v| !v.is_finite()) {
            return Err(LabError::NonFinite("tabulated family".into()));
        }
        if self.weight.iter().any(|&w| w < 0.0) {
            return Err(LabError::OutOfRange("density must be nonnegative".into()));
        }
        if self.alpha.windows(2).any(|w| w[0] >= w[1]) {
            return Err(LabError::OutOfRange("alpha must be strictly increasing".into()));
        }
        Ok(())
    }
}

fn interpolate(alpha: &[f64], values: &[f64], x: f64) -> f64 {
    let m = alpha.len();
    let k = alpha.partition_point(|&a| a <= x).clamp(1, m - 1);
    let (a0, a1) = (alpha[k - 1], alpha[k]);
    let t = ((x - a0) / (a1 - a0)).clamp(0.0, 1.0);
    values[k - 1] + t * (values[k] - values[k - 1])
}

impl ContinuousPasf {
    pub fn new(
        domain: (f64, f64),
        d: usize,
        weight: DensityFn,
        f: FamilyFn,
        tau: FamilyFn,
        p: Exponent,
        r: Exponent,
        label: impl Into<String>,
    ) -> Result<Self> {
        let (a, b) = domain;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(LabError::OutOfRange(format!("bad interval [{a}, {b}]")));
        }
        if d == 0 {
            return Err(LabError::Empty("continuous family needs d >= 1".into()));
        }
        if p.is_infinite() {
            return Err(LabError::InvalidExponent(p.value()));
        }
        Ok(ContinuousPasf {
            domain,
            d,
            weight,
            f,
            tau,
            p,
            r,
            label: label.into(),
        })
    }

    /// `τ_α = (cos α, sin α)`, `f_α(x, y) = x cos α + y sin α` on `[0, 2π]`
    /// with unit density and `X = (ℝ², ‖·‖₁)`.
    pub fn circle_example(p: Exponent) -> Result<Self> {
        let cs: FamilyFn = Arc::new(|a: f64| vec![a.cos(), a.sin()]);
        ContinuousPasf::new(
            (0.0, 2.0 * PI),
            2,
            Arc::new(|_| 1.0),
            cs.clone(),
            cs,
            p,
            Exponent::ONE,
            format!("circle-p{p}"),
        )
    }

    /// `f_α = f`, `τ_α = τ` for every `α`, unit density.
    pub fn constant(domain: (f64, f64), f: Vec<f64>, tau: Vec<f64>, p: Exponent, r: Exponent) -> Result<Self> {
        if f.len() != tau.len() {
            return Err(LabError::DimensionMismatch(format!(
                "functional has {} entries, vector has {}",
                f.len(),
                tau.len()
            )));
        }
        let d = f.len();
        ContinuousPasf::new(
            domain,
            d,
            Arc::new(|_| 1.0),
            Arc::new(move |_| f.clone()),
            Arc::new(move |_| tau.clone()),
            p,
            r,
            "constant",
        )
    }

    /// Piecewise-linear interpolation of sampled data over
    /// `[alpha_first, alpha_last]`.
    pub fn tabulated(table: TabulatedFamily, p: Exponent, r: Exponent, label: impl Into<String>) -> Result<Self> {
        table.validate()?;
        let d = table.d();
        let domain = (table.alpha[0], table.alpha[table.alpha.len() - 1]);
        let alpha = Arc::new(table.alpha);
        let columns = |rows: &[Vec<f64>]| -> Arc<Vec<Vec<f64>>> {
            Arc::new((0..d).map(|k| rows.iter().map(|row| row[k]).collect()).collect())
        };
        let fc = columns(&table.f);
        let tc = columns(&table.tau);
        let w = Arc::new(table.weight);
        let (a1, a2, a3) = (alpha.clone(), alpha.clone(), alpha);
        ContinuousPasf::new(
            domain,
            d,
            Arc::new(move |x| interpolate(&a1, &w, x)),
            Arc::new(move |x| fc.iter().map(|c| interpolate(&a2, c, x)).collect()),
            Arc::new(move |x| tc.iter().map(|c| interpolate(&a3, c, x)).collect()),
            p,
            r,
            label,
        )
    }

    /// Same family with density `λ·w`.
    pub fn with_density_scale(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(LabError::OutOfRange(format!("density scale must be positive, got {lambda}")));
        }
        let w = self.weight.clone();
        let mut out = self.clone();
        out.weight = Arc::new(move |a| lambda * w(a));
        Ok(out)
    }

    pub fn with_exponents(&self, p: Exponent, r: Exponent) -> Result<Self> {
        if p.is_infinite() {
            return Err(LabError::InvalidExponent(p.value()));
        }
        let mut out = self.clone();
        out.p = p;
        out.r = r;
        Ok(out)
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn d(&self) -> usize {
        self.d
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

    /// `(w(α), f(α), τ(α))`, checked for finiteness and shape.
    pub fn evaluate(&self, alpha: f64) -> Result<(f64, Vec<f64>, Vec<f64>)> {
        let (a, b) = self.domain;
        let slack = 1e-12 * (b - a).max(1.0);
        if !(alpha >= a - slack && alpha <= b + slack) {
            return Err(LabError::OutOfRange(format!("alpha = {alpha} outside [{a}, {b}]")));
        }
        let w = (self.weight)(alpha);
        let f = (self.f)(alpha);
        let tau = (self.tau)(alpha);
        if f.len() != self.d || tau.len() != self.d {
            return Err(LabError::DimensionMismatch(format!(
                "family returned lengths {} and {} at alpha = {alpha}, expected {}",
                f.len(),
                tau.len(),
                self.d
            )));
        }
        if !w.is_finite() || f.iter().chain(&tau).any(|v| !v.is_finite()) {
            return Err(LabError::NonFinite(format!("family at alpha = {alpha}")));
        }
        if w < 0.0 {
            return Err(LabError::OutOfRange(format!("density {w} < 0 at alpha = {alpha}")));
        }
        Ok((w, f, tau))
    }
}

struct Sample {
    /// `w(α_i)·q_i`.
    mass: f64,
    f: Vec<f64>,
    tau: Vec<f64>,
}

fn sample(c: &ContinuousPasf, q: &Quadrature) -> Result<Vec<Sample>> {
    if q.is_empty() {
        return Err(LabError::Empty("quadrature has no nodes".into()));
    }
    q.nodes()
        .par_iter()
        .zip(q.weights().par_iter())
        .map(|(&a, &qw)| {
            let (w, f, tau) = c.evaluate(a)?;
            Ok(Sample { mass: w * qw, f, tau })
        })
        .collect()
}

/// Sum with a fixed binary tree so the result does not depend on threading.
fn pairwise_sum(terms: &[Matrix]) -> Matrix {
    match terms.len() {
        1 => terms[0].clone(),
        n => {
            let (a, b) = terms.split_at(n / 2);
            let (x, y) = rayon::join(|| pairwise_sum(a), || pairwise_sum(b));
            x + y
        }
    }
}

/// `Σ_i w(α_i) q_i τ(α_i) f(α_i)`.
pub fn cont_frame_operator(c: &ContinuousPasf, q: &Quadrature) -> Result<Matrix> {
    let samples = sample(c, q)?;
    let d = c.d;
    let terms: Vec<Matrix> = samples
        .par_iter()
        .map(|s| DMatrix::from_fn(d, d, |i, k| s.mass * s.tau[i] * s.f[k]))
        .collect();
    Ok(pairwise_sum(&terms))
}

/// `x^e` with the exact forms for the exponents that occur most.
fn split_pow(x: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else if e == 1.0 {
        x
    } else if e == 0.5 {
        x.sqrt()
    } else {
        x.powf(e)
    }
}

fn discretize_samples(c: &ContinuousPasf, q: &Quadrature, samples: &[Sample]) -> Result<Pasf> {
    let n = samples.len();
    let d = c.d;
    let ep = c.p.reciprocal();
    let eq = c.p.dual().reciprocal();
    let f = DMatrix::from_fn(n, d, |i, k| split_pow(samples[i].mass, ep) * samples[i].f[k]);
    let t = DMatrix::from_fn(d, n, |k, i| split_pow(samples[i].mass, eq) * samples[i].tau[k]);
    let mut label = format!("{}-{}-n{n}", c.label, q.rule());
    if c.p.is_one() {
        label.push_str("-vectors-unweighted");
    }
    Pasf::new(f, t, c.p, c.r, label)
}

/// Sampled pair: `f_i = (w_i q_i)^{1/p} f(α_i)`, `τ_i = (w_i q_i)^{1/q} τ(α_i)`.
/// At `p = 1` the vectors carry no weight (`q = ∞`); the label records it.
pub fn discretize(c: &ContinuousPasf, q: &Quadrature) -> Result<Pasf> {
    let samples = sample(c, q)?;
    discretize_samples(c, q, &samples)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuousNormEstimates {
    /// Largest `(Σ_i w_i q_i |f(α_i)·x|^p)^{1/p}` over the sampled unit vectors.
    pub analysis: f64,
    /// Certified lower end of the discretised synthesis norm `ℓ^p → X`.
    pub synthesis: f64,
    pub synthesis_upper: f64,
    pub synthesis_cert: OperatorNormEstimate,
    /// Vectors tried for the analysis bound: `±e_k` first, then random.
    pub samples: usize,
    pub seed: u64,
}

/// Lower-bound estimates of the analysis and synthesis norms on the
/// quadrature. Extending `samples` with the same seed never lowers the
/// analysis estimate.
pub fn cont_norm_estimates(c: &ContinuousPasf, q: &Quadrature, samples: usize, seed: u64) -> Result<ContinuousNormEstimates> {
    if samples == 0 {
        return Err(LabError::OutOfRange("need at least one sample".into()));
    }
    let nodes = sample(c, q)?;
    let d = c.d;
    let p = c.p;
    let r = c.r;
    let analysis_at = |x: &[f64]| -> f64 {
        let vals: Vec<f64> = nodes
            .iter()
            .map(|s| {
                let fx: f64 = s.f.iter().zip(x).map(|(a, b)| a * b).sum();
                split_pow(s.mass, p.reciprocal()) * fx
            })
            .collect();
        p_norm(&vals, p)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0_f64;
    for k in 0..samples {
        let x: Vec<f64> = if k < 2 * d {
            let mut e = vec![0.0; d];
            e[k / 2] = if k % 2 == 0 { 1.0 } else { -1.0 };
            e
        } else {
            let g: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
            let norm = p_norm(&g, r);
            if norm == 0.0 {
                continue;
            }
            g.iter().map(|v| v / norm).collect()
        };
        best = best.max(analysis_at(&x));
    }
    let pair = discretize_samples(c, q, &nodes)?;
    let cert = op_norm(pair.t(), p, r)?;
    Ok(ContinuousNormEstimates {
        analysis: best,
        synthesis: cert.lower,
        synthesis_upper: cert.upper,
        synthesis_cert: cert,
        samples,
        seed,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RieszDefect {
    /// Upper end of `‖F_d S⁻¹ T_d − I‖_{p→p}` on the node space.
    pub defect: f64,
    pub defect_lower: f64,
    /// Rank of `F_d S⁻¹ T_d`, at most `d`.
    pub rank: usize,
    pub n_nodes: usize,
}

/// Riesz defect of the discretised pair at this resolution. For more nodes
/// than dimensions the Gram-type operator is a rank-`d` projection, so the
/// defect cannot fall below 1.
pub fn cont_riesz_defect(c: &ContinuousPasf, q: &Quadrature) -> Result<RieszDefect> {
    let pair = discretize(c, q)?;
    let s = pair.t() * pair.f();
    if linalg::rank(&s) < c.d {
        return Err(LabError::Singular("quadrature frame operator is singular".into()));
    }
    let sinv_t = linalg::solve_refined(&s, pair.t())
        .ok_or_else(|| LabError::Singular("quadrature frame operator is singular".into()))?;
    let g = pair.f() * sinv_t;
    let n = g.nrows();
    let est = op_norm(&(&g - DMatrix::identity(n, n)), c.p, c.p)?;
    Ok(RieszDefect {
        defect: est.upper,
        defect_lower: est.lower,
        rank: linalg::rank(&g),
        n_nodes: n,
    })
}
