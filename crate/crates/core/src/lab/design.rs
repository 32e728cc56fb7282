//! Constructive search for pairs with prescribed norms and either a tight
//! frame operator or a prescribed one.
//!
//! The objective is minimised by BFGS with Armijo backtracking from a
//! canonical start built from the target's SVD and then seeded random
//! starts. A small residual is an existence witness; a large one proves
//! nothing.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{problems, NormProfile, SearchBudget, SearchReport, SearchStatus, Strategy, Tracker, Witness};
use crate::error::{LabError, Result};
use crate::frames::OPTIMIZATION_TOL;
use crate::lp::{dual_vector, p_norm, Exponent, Matrix};

/// Random starts after the canonical one.
pub const DESIGN_STARTS: usize = 64;
const MAX_ITERS: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DesignMode {
    /// `S = λI` for some `λ`, with the prescribed norms.
    TightWithNorms,
    /// `S = S_target`, with whatever norms are prescribed.
    FrameOperatorWithNorms,
}

struct Problem<'a> {
    mode: DesignMode,
    d: usize,
    n: usize,
    r: Exponent,
    targets: Option<&'a NormProfile>,
    s_target: Option<&'a Matrix>,
}

impl Problem<'_> {
    fn unpack(&self, z: &[f64]) -> (Matrix, Matrix) {
        let (d, n) = (self.d, self.n);
        let f = DMatrix::from_row_slice(n, d, &z[..n * d]);
        let t = DMatrix::from_row_slice(d, n, &z[n * d..]);
        (f, t)
    }

    fn pack(f: &Matrix, t: &Matrix) -> Vec<f64> {
        let mut z = f.transpose().as_slice().to_vec();
        z.extend_from_slice(t.transpose().as_slice());
        z
    }

    /// Objective and gradient.
    fn eval(&self, z: &[f64]) -> (f64, Vec<f64>) {
        let (f, t) = self.unpack(z);
        let d = self.d as f64;
        let s = &t * &f;
        let (mut value, mut gf, mut gt) = match self.mode {
            DesignMode::TightWithNorms => {
                let tr = s.trace();
                let value = s.norm_squared() - tr * tr / d;
                let gt = (&s * f.transpose()) * 2.0 - f.transpose() * (2.0 * tr / d);
                let gf = (t.transpose() * &s) * 2.0 - t.transpose() * (2.0 * tr / d);
                (value, gf, gt)
            }
            DesignMode::FrameOperatorWithNorms => {
                let e = &s - self.s_target.expect("checked");
                let gt = (&e * f.transpose()) * 2.0;
                let gf = (t.transpose() * &e) * 2.0;
                (e.norm_squared(), gf, gt)
            }
        };
        if let Some(p) = self.targets {
            let rstar = self.r.dual();
            for j in 0..self.n {
                let fj: Vec<f64> = f.row(j).iter().copied().collect();
                let tj: Vec<f64> = t.column(j).iter().copied().collect();
                let fa = p_norm(&fj, rstar) - p.a[j];
                value += fa * fa;
                for (k, g) in dual_vector(&fj, rstar).into_iter().enumerate() {
                    gf[(j, k)] += 2.0 * fa * g;
                }
                let tb = p_norm(&tj, self.r) - p.b[j];
                value += tb * tb;
                for (k, g) in dual_vector(&tj, self.r).into_iter().enumerate() {
                    gt[(k, j)] += 2.0 * tb * g;
                }
                let pairing: f64 = fj.iter().zip(&tj).map(|(a, b)| a * b).sum();
                let pc = pairing.abs() - p.c[j];
                value += pc * pc;
                let sg = if pairing == 0.0 { 0.0 } else { pairing.signum() };
                for k in 0..self.d {
                    gf[(j, k)] += 2.0 * pc * sg * tj[k];
                    gt[(k, j)] += 2.0 * pc * sg * fj[k];
                }
            }
        }
        (value, Self::pack(&gf, &gt))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// BFGS on the inverse Hessian with Armijo backtracking.
fn bfgs(problem: &Problem<'_>, mut z: Vec<f64>) -> (Vec<f64>, f64) {
    let m = z.len();
    let mut h = DMatrix::<f64>::identity(m, m);
    let (mut fx, mut g) = problem.eval(&z);
    for _ in 0..MAX_ITERS {
        let gnorm = dot(&g, &g).sqrt();
        if fx <= 1e-28 || gnorm <= 1e-14 {
            break;
        }
        let gv = DVector::from_column_slice(&g);
        let mut dir = -(&h * &gv);
        let mut slope = dir.dot(&gv);
        if slope >= 0.0 {
            h = DMatrix::identity(m, m);
            dir = -gv.clone();
            slope = -gnorm * gnorm;
        }
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = z.iter().zip(dir.iter()).map(|(a, b)| a + step * b).collect();
            let (ft, gt) = problem.eval(&trial);
            if ft <= fx + 1e-4 * step * slope {
                accepted = Some((trial, ft, gt));
                break;
            }
            step *= 0.5;
        }
        let Some((zn, fn_, gn)) = accepted else { break };
        let s = DVector::from_iterator(m, zn.iter().zip(&z).map(|(a, b)| a - b));
        let y = DVector::from_iterator(m, gn.iter().zip(&g).map(|(a, b)| a - b));
        let sy = s.dot(&y);
        if sy > 1e-16 {
            let rho = 1.0 / sy;
            let id = DMatrix::<f64>::identity(m, m);
            let left = &id - (&s * y.transpose()) * rho;
            let right = &id - (&y * s.transpose()) * rho;
            h = &left * &h * &right + (&s * s.transpose()) * rho;
        } else {
            h = DMatrix::identity(m, m);
        }
        let progress = fx - fn_;
        z = zn;
        fx = fn_;
        g = gn;
        if progress.abs() <= 1e-30 {
            break;
        }
    }
    (z, fx)
}

/// `S = U Σ Vᵀ`; direction `k` gets `c_k` copies (blocked, earlier directions
/// take the remainder), with `τ = u_k` and `f = (σ_k / c_k) v_kᵀ`.
fn canonical_start(target: &Matrix, n: usize) -> (Matrix, Matrix) {
    let d = target.nrows();
    let svd = target.clone().svd(true, true);
    let u = svd.u.expect("u");
    let vt = svd.v_t.expect("v_t");
    let sv = svd.singular_values;
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]));
    let mut f = DMatrix::zeros(n, d);
    let mut t = DMatrix::zeros(d, n);
    let mut idx = 0;
    for (rank, &k) in order.iter().enumerate() {
        let copies = n / d + usize::from(rank < n % d);
        let mut uk = u.column(k).into_owned();
        let mut vk = vt.row(k).into_owned();
        let big = uk.iamax();
        if uk[big] < 0.0 {
            uk = -uk;
            vk = -vk;
        }
        for _ in 0..copies {
            t.set_column(idx, &uk);
            f.set_row(idx, &(&vk * (sv[k] / copies as f64)));
            idx += 1;
        }
    }
    (f, t)
}

/// Searches for `(F, T)` with `n` elements in `(ℝ^d, ‖·‖_r)` matching the
/// mode's operator condition and the optional norm targets.
pub fn inverse_design_search(
    mode: DesignMode,
    d: usize,
    n: usize,
    r: Exponent,
    targets: Option<&NormProfile>,
    s_target: Option<&Matrix>,
    budget: &SearchBudget,
) -> Result<SearchReport> {
    if d == 0 {
        return Err(LabError::OutOfRange("d must be at least 1".into()));
    }
    if n < d {
        return Err(LabError::Precondition(format!("need n >= d, got n = {n}, d = {d}")));
    }
    if let Some(p) = targets {
        p.validate()?;
        if p.n() != n {
            return Err(LabError::DimensionMismatch(format!("targets have {} entries, n = {n}", p.n())));
        }
    }
    let canonical_target = match mode {
        DesignMode::FrameOperatorWithNorms => {
            let s = s_target.ok_or_else(|| LabError::Precondition("frame-operator mode needs S_target".into()))?;
            if s.shape() != (d, d) {
                return Err(LabError::DimensionMismatch(format!("S_target must be {d}x{d}")));
            }
            for ev in s.complex_eigenvalues().iter() {
                if ev.im.abs() > 1e-9 || ev.re <= 0.0 {
                    return Err(LabError::Precondition(format!(
                        "S_target has eigenvalue {} + {}i, not positive",
                        ev.re, ev.im
                    )));
                }
            }
            s.clone()
        }
        DesignMode::TightWithNorms => {
            let p = targets.ok_or_else(|| LabError::Precondition("tight mode needs norm targets".into()))?;
            let lambda = p.c.iter().sum::<f64>() / d as f64;
            DMatrix::identity(d, d) * if lambda > 0.0 { lambda } else { 1.0 }
        }
    };
    let problem = Problem {
        mode,
        d,
        n,
        r,
        targets,
        s_target,
    };
    let tracker = Tracker::new(budget);
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let (f0, t0) = canonical_start(&canonical_target, n);
    let scale = (canonical_target.norm() / n as f64).sqrt().max(0.1);
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut starts = 0;
    for start in 0..=DESIGN_STARTS {
        if !tracker.tick(1) {
            break;
        }
        let z0 = if start == 0 {
            Problem::pack(&f0, &t0)
        } else {
            (0..2 * n * d).map(|_| { let g: f64 = StandardNormal.sample(&mut rng); scale * g }).collect()
        };
        let (z, value) = bfgs(&problem, z0);
        starts += 1;
        if best.as_ref().is_none_or(|(_, v)| value < *v) {
            best = Some((z, value));
        }
        if best.as_ref().is_some_and(|(_, v)| *v <= 1e-24) {
            break;
        }
    }
    let (z, residual) = best.expect("at least one start");
    let (f, t) = problem.unpack(&z);
    let mut notes = vec![format!("{starts} starts, best residual {residual:.3e}")];
    let mut holds = residual <= OPTIMIZATION_TOL;
    if mode == DesignMode::TightWithNorms {
        let lambda = (&t * &f).trace() / d as f64;
        if lambda.abs() <= OPTIMIZATION_TOL {
            holds = false;
            notes.push("best design has a vanishing frame operator".into());
        }
    }
    if !holds {
        notes.push("no witness found; this is not a proof of nonexistence".into());
    }
    let problem_tag = match mode {
        DesignMode::TightWithNorms => problems::INVERSE_DESIGN_TIGHT,
        DesignMode::FrameOperatorWithNorms => problems::INVERSE_DESIGN_OPERATOR,
    };
    Ok(tracker.report(
        problem_tag,
        if holds {
            SearchStatus::HoldsWithWitness
        } else {
            SearchStatus::ExhaustedInconclusive
        },
        Witness::Design {
            d,
            n,
            f: f.transpose().as_slice().to_vec(),
            t: t.transpose().as_slice().to_vec(),
            residual,
            starts,
        },
        Strategy::LocalSearch,
        budget.seed,
        notes,
    ))
}
