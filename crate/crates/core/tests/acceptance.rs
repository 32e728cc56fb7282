//! Acceptance run: every criterion at its stated tolerance and time limit,
//! one PASS/FAIL line each. Exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use pasf_core::continuous::{cont_frame_operator, cont_norm_estimates, ContinuousPasf, Quadrature, QuadratureRule};
use pasf_core::frames::{
    classify, is_riesz_basis, make_pasf, recover_intertwiner, riesz_sequence_bounds, vector_sum, FrameTag, Pasf,
    PasfKind,
};
use pasf_core::io::to_json;
use pasf_core::lab::{
    akemann_weaver_search, decomposition_search, feichtinger_search, r_eps_search, retrieval_check, scaling_solve,
    verify_certificate, weaver_search, AwParams, DecompositionMode, RetrievalKind, RetrievalSide, SearchBudget,
    SearchReport, SearchStatus, Strategy, WeaverParams, Witness,
};
use pasf_core::lp::{signed_permutations, vec_norm, Exponent, Matrix};
use pasf_core::reconstruct::duffin_schaeffer;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

type Check = Result<String, String>;

fn e(p: f64) -> Exponent {
    Exponent::new(p).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lab<T>(r: pasf_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn gaussian(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix {
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

/// `n×d` with orthonormal columns.
fn orthonormal_columns(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let q = gaussian(n, d, rng).qr().q();
    q.columns(0, d).into_owned()
}

fn circle_operator() -> Check {
    let c = lab(ContinuousPasf::circle_example(e(2.0)))?;
    let q = lab(Quadrature::new(QuadratureRule::Trapezoid, 16, (0.0, 2.0 * PI)))?;
    let s = lab(cont_frame_operator(&c, &q))?;
    let err = (s - DMatrix::identity(2, 2) * PI).norm();
    ensure(err <= 1e-10, || format!("||S_16 - pi I||_2 = {err:.3e}"))?;
    Ok(format!("||S_16 - pi I||_2 = {err:.2e}"))
}

fn circle_norms() -> Check {
    let mut worst = f64::NEG_INFINITY;
    for p in [1.5, 2.0, 3.0] {
        let c = lab(ContinuousPasf::circle_example(e(p)))?;
        let q = lab(Quadrature::new(QuadratureRule::Trapezoid, 64, (0.0, 2.0 * PI)))?;
        let est = lab(cont_norm_estimates(&c, &q, 256, 1))?;
        let qd = e(p).dual().value();
        let a_bound = (2.0 * PI).powf(1.0 / p) + 1e-6;
        let s_bound = 2.0 * (2.0 * PI).powf(1.0 / qd) + 1e-6;
        ensure(est.analysis <= a_bound, || format!("p = {p}: analysis {} > {a_bound}", est.analysis))?;
        ensure(est.synthesis <= s_bound, || format!("p = {p}: synthesis {} > {s_bound}", est.synthesis))?;
        worst = worst.max(est.analysis - a_bound).max(est.synthesis - s_bound);
    }
    Ok(format!("largest estimate minus bound {worst:.3e}"))
}

fn riesz_characterization() -> Check {
    let ps = [1.0, 1.5, 2.0, 3.0];
    let mut worst = 0.0f64;
    for i in 0..200u64 {
        let d = 1 + (i % 6) as usize;
        let p = e(ps[(i / 6 % 4) as usize]);
        let pair = lab(make_pasf(PasfKind::Random { d, n: d, seed: 1000 + i }, p, p))?;
        let check = lab(is_riesz_basis(&pair, 1e-10))?;
        ensure(check.is_riesz && check.defect <= 1e-10, || {
            format!("square pair {i} (d = {d}, p = {p}): defect {:.3e}", check.defect)
        })?;
        worst = worst.max(check.defect);
    }
    for i in 0..200u64 {
        let d = 1 + (i % 6) as usize;
        let n = d + 1 + (i / 6 % 3) as usize;
        let p = e(ps[(i / 18 % 4) as usize]);
        let pair = lab(make_pasf(PasfKind::Random { d, n, seed: 5000 + i }, p, p))?;
        let check = lab(is_riesz_basis(&pair, 1e-10))?;
        ensure(!check.is_riesz && check.rank < n, || {
            format!("tall frame {i} (d = {d}, n = {n}): riesz = {}, rank {}", check.is_riesz, check.rank)
        })?;
    }
    Ok(format!("square defect <= {worst:.2e}; all tall frames rank-deficient"))
}

/// Signed-permutation images `(Q⁻¹-functionals, Q-vectors)` of the standard pair.
fn orthonormal_images(d: usize, p: Exponent) -> Result<Vec<(Matrix, Pasf)>, String> {
    let standard = lab(make_pasf(PasfKind::Standard { d }, p, p))?;
    lab(signed_permutations(d))?
        .map(|sp| {
            let q = sp.matrix();
            lab(standard.transformed(&q)).map(|b| (q, b))
        })
        .collect()
}

fn orthonormal_classification() -> Check {
    let mut count = 0;
    for p in [1.0, 1.5, 3.0] {
        for d in 1..=4 {
            let standard = lab(make_pasf(PasfKind::Standard { d }, e(p), e(p)))?;
            for (q, b) in orthonormal_images(d, e(p))? {
                let tag = lab(classify(&b, 1e-9))?.tag;
                ensure(tag == FrameTag::POrthonormalBasis, || format!("d = {d}, p = {p}, Q = {q}: tag {tag:?}"))?;
                let tw = lab(recover_intertwiner(&standard, &b, 1e-9))?;
                let sp = tw.signed_permutation.ok_or("intertwiner is not a signed permutation")?;
                ensure(sp.matrix() == q && tw.isometry, || format!("d = {d}, p = {p}: recovered {sp:?}"))?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} bases classified and intertwiners recovered"))
}

fn observation_suite() -> Check {
    let mut worst = 0.0f64;
    let mut count = 0;
    for p in [1.0, 1.5, 3.0] {
        for d in 1..=4 {
            for (_, b) in orthonormal_images(d, e(p))? {
                for mask in 1u32..1 << d {
                    let idx: Vec<usize> = (0..d).filter(|&j| mask >> j & 1 == 1).collect();
                    let v = lab(vector_sum(&b, &idx))?;
                    let err = (vec_norm(&v, b.r()) - (idx.len() as f64).powf(1.0 / p)).abs();
                    ensure(err <= 1e-12, || format!("d = {d}, p = {p}, J = {idx:?}: error {err:.3e}"))?;
                    worst = worst.max(err);
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{count} sums, largest error {worst:.2e}"))
}

fn duffin_schaeffer_rate() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let two = e(2.0);
    let mut accepted = 0;
    let mut skipped = 0;
    let mut worst = f64::NEG_INFINITY;
    while accepted < 100 {
        let d = 2 + accepted % 4;
        let n = d + 1 + accepted % 3;
        let f = gaussian(n, d, &mut rng);
        let pair = lab(Pasf::new(f.clone(), f.transpose(), two, two, "gram"))?;
        let x = DVector::from_fn(d, |_, _| StandardNormal.sample(&mut rng));
        let c = pair.f() * &x;
        let trace = lab(duffin_schaeffer(&pair, c.as_slice(), 60, 0.0, Some(x.as_slice())))?;
        if !trace.condition_holds {
            skipped += 1;
            ensure(skipped <= 10, || "hypothesis fails on too many symmetric draws".into())?;
            continue;
        }
        accepted += 1;
        // Rounding moves each iterate by about eps * ||x||, so a ratio is only
        // resolved to 1e-9 while the previous error is well above that.
        let floor = 1e-6 * x.norm();
        for k in 1..trace.errors.len() {
            if trace.errors[k - 1] <= floor {
                break;
            }
            let ratio = trace.errors[k] / trace.errors[k - 1];
            ensure(ratio <= trace.ratio_bound + 1e-9, || {
                format!("frame {accepted}: step {k} ratio {ratio} > {}", trace.ratio_bound)
            })?;
            worst = worst.max(ratio - trace.ratio_bound);
        }
    }
    for i in 0..20 {
        let d = 2 + i % 3;
        let n = d + i % 4;
        let f = orthonormal_columns(n, d, &mut rng);
        let pair = lab(Pasf::new(f.clone(), f.transpose(), two, two, "parseval"))?;
        let x = DVector::from_fn(d, |_, _| StandardNormal.sample(&mut rng));
        let c = pair.f() * &x;
        let trace = lab(duffin_schaeffer(&pair, c.as_slice(), 10, 1e-12, Some(x.as_slice())))?;
        ensure(trace.converged && trace.steps() == 1, || {
            format!("Parseval input {i}: {} steps, errors {:?}", trace.steps(), trace.errors)
        })?;
    }
    Ok(format!(
        "largest ratio minus bound {worst:.2e}; {skipped} draws failed the hypothesis numerically"
    ))
}

/// Independent oracle: all set partitions by recursive insertion.
fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    fn go(j: usize, n: usize, cur: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if j == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..cur.len() {
            cur[b].push(j);
            go(j + 1, n, cur, out);
            cur[b].pop();
        }
        cur.push(vec![j]);
        go(j + 1, n, cur, out);
        cur.pop();
    }
    let mut out = Vec::new();
    go(0, n, &mut Vec::new(), &mut out);
    out
}

/// Smallest singular value of the columns `idx` of `T` (zero when they
/// cannot be independent): the exact ℓ² lower Riesz bound.
fn sigma_min(t: &Matrix, idx: &[usize]) -> f64 {
    if idx.len() > t.nrows() {
        return 0.0;
    }
    let cols: Vec<_> = idx.iter().map(|&j| t.column(j).into_owned()).collect();
    let sub = Matrix::from_columns(&cols);
    sub.singular_values().min()
}

fn partition_corpus() -> Result<Vec<Pasf>, String> {
    let two = e(2.0);
    let mut out = Vec::new();
    for (d, k) in [(2, 2), (2, 3), (3, 2), (2, 4)] {
        out.push(lab(make_pasf(PasfKind::DuplicatedStandard { d, k }, two, two))?);
    }
    for (i, (d, n)) in [(2, 3), (2, 4), (2, 5), (2, 6), (2, 7), (2, 8), (3, 4), (3, 5), (3, 6), (3, 7), (3, 8), (4, 6)]
        .into_iter()
        .enumerate()
    {
        out.push(lab(make_pasf(PasfKind::Random { d, n, seed: 300 + i as u64 }, two, two))?);
    }
    Ok(out)
}

fn partition_oracle() -> Check {
    let mut checked = 0;
    for pair in partition_corpus()? {
        let n = pair.n();
        let t = pair.t().clone();
        let sub = |mask: u32| -> Vec<usize> { (0..n).filter(|&j| mask >> j & 1 == 1).collect() };
        let singles: Vec<f64> = (0..n).map(|j| sigma_min(&t, &[j])).collect();
        let all: Vec<f64> = (1u32..1 << n).map(|m| sigma_min(&t, &sub(m))).collect();
        // Half the weakest singleton, nudged away from every subset value.
        let mut a_min = 0.5 * singles.iter().cloned().fold(f64::INFINITY, f64::min);
        while all.iter().any(|v| (v - a_min).abs() <= 1e-6 * a_min.max(1.0)) {
            a_min *= 0.97;
        }
        let oracle_m = set_partitions(n)
            .into_iter()
            .filter(|parts| parts.iter().all(|p| sigma_min(&t, p) >= a_min))
            .map(|parts| parts.len())
            .min()
            .ok_or("oracle found no admissible partition")?;
        let budget = SearchBudget::with_seed(3);
        let report = lab(feichtinger_search(&pair, a_min, n, &budget))?;
        ensure(report.strategy == Strategy::Exhaustive, || format!("{}: not exhaustive", pair.label()))?;
        let cert = report.certificate().ok_or_else(|| format!("{}: no certificate", pair.label()))?;
        ensure(cert.m() == oracle_m, || {
            format!("{}: search M = {}, oracle M = {oracle_m} (a_min {a_min})", pair.label(), cert.m())
        })?;
        checked += 1;
    }
    let dup = lab(make_pasf(PasfKind::DuplicatedStandard { d: 2, k: 2 }, e(2.0), e(2.0)))?;
    let report = lab(feichtinger_search(&dup, 0.5, 4, &SearchBudget::default()))?;
    let m = report.certificate().map(|c| c.m());
    ensure(m == Some(2), || format!("duplicated standard d = 2, k = 2 gave M = {m:?}"))?;
    Ok(format!("{checked} frames agree with the oracle; duplicated standard M = 2"))
}

fn weaver_instance() -> Check {
    let dup = lab(make_pasf(PasfKind::DuplicatedStandard { d: 3, k: 2 }, e(2.0), e(2.0)))?;
    let pair = lab(Pasf::new(dup.f() * 2.0, dup.t().clone(), dup.p(), dup.r(), "weaver-d3-k2"))?;
    let s = pair.t() * pair.f();
    ensure((s - DMatrix::identity(3, 3) * 2.0).norm() == 0.0, || "S != 2I".into())?;
    let report = lab(weaver_search(&pair, &WeaverParams::new(2.0, 1.0, 2), &SearchBudget::default()))?;
    ensure(report.status == SearchStatus::HoldsWithWitness, || format!("status {:?}", report.status))?;
    ensure(report.strategy == Strategy::Exhaustive, || format!("strategy {:?}", report.strategy))?;
    match &report.witness {
        Witness::WeaverOptimum { certificate, objective, .. } => {
            ensure(certificate.m() == 2 && (objective - 1.0).abs() <= 1e-9, || {
                format!("M = {}, max ||S_k|| = {objective}", certificate.m())
            })?;
            Ok(format!("M = 2, max ||S_k|| = {objective}"))
        }
        other => Err(format!("unexpected witness {other:?}")),
    }
}

fn scaling_exactness() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let scale = Uniform::new(0.25, 4.0).unwrap();
    let two = e(2.0);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let d = 2 + i % 3;
        let n = d + 1 + i % 4;
        let f = orthonormal_columns(n, d, &mut rng);
        let a: Vec<f64> = (0..n).map(|_| scale.sample(&mut rng)).collect();
        let b: Vec<f64> = (0..n).map(|_| scale.sample(&mut rng)).collect();
        let fu = DMatrix::from_fn(n, d, |j, k| f[(j, k)] / a[j]);
        let tu = DMatrix::from_fn(d, n, |k, j| f[(j, k)] / b[j]);
        let pair = lab(Pasf::new(fu, tu, two, two, "unscaled"))?;
        let sol = lab(scaling_solve(&pair))?;
        ensure(sol.scalable && sol.residual <= 1e-9, || format!("instance {i}: residual {:.3e}", sol.residual))?;
        let tag = lab(classify(&lab(sol.apply(&pair))?, 1e-9))?.tag;
        ensure(tag == FrameTag::Parseval, || format!("instance {i}: scaled pair classified {tag:?}"))?;
        worst = worst.max(sol.residual);
    }
    // Conjugation fixes I, so the span of the rank-one terms never reaches it.
    let swap_f = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    for i in 0..20 {
        let base = lab(Pasf::new(swap_f.clone() * (1.0 + i as f64), DMatrix::identity(2, 2), two, two, "swap"))?;
        let v = gaussian(2, 2, &mut rng) + DMatrix::identity(2, 2) * 3.0;
        let pair = lab(base.transformed(&v))?;
        let sol = lab(scaling_solve(&pair))?;
        ensure(!sol.scalable, || format!("obstructed instance {i} reported scalable (residual {})", sol.residual))?;
    }
    Ok(format!("largest residual {worst:.2e}; 20 obstructed instances rejected"))
}

fn retrieval_certification() -> Check {
    let two = e(2.0);
    let three = lab(Pasf::new(
        DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]),
        DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 1.0, 0.0, 1.0, 1.0]),
        two,
        two,
        "three",
    ))?;
    let budget = SearchBudget::default();
    let rep = lab(retrieval_check(&three, RetrievalSide::Vector, RetrievalKind::Phase, &budget))?;
    ensure(rep.status == SearchStatus::HoldsWithWitness, || format!("three-vector status {:?}", rep.status))?;
    for r in [1.0, 2.0, 3.0] {
        let id = lab(make_pasf(PasfKind::Standard { d: 2 }, e(r), e(r)))?;
        if r == 2.0 {
            let rep = lab(retrieval_check(&id, RetrievalSide::Vector, RetrievalKind::Phase, &budget))?;
            let Witness::RetrievalCounterexample { x, y, .. } = &rep.witness else {
                return Err(format!("two-vector phase retrieval: {:?}", rep.status));
            };
            let fx = id.f() * DVector::from_column_slice(x);
            let fy = id.f() * DVector::from_column_slice(y);
            let same_moduli = fx.iter().zip(fy.iter()).all(|(a, b)| (a.abs() - b.abs()).abs() <= 1e-12);
            let trivial = [1.0, -1.0]
                .iter()
                .any(|s| x.iter().zip(y).all(|(a, b)| (a - s * b).abs() <= 1e-12));
            ensure(rep.status == SearchStatus::RefutedWithWitness && same_moduli && !trivial, || {
                format!("witness x = {x:?}, y = {y:?} does not refute")
            })?;
        }
        let rep = lab(retrieval_check(&id, RetrievalSide::Vector, RetrievalKind::Norm, &budget))?;
        ensure(rep.status == SearchStatus::HoldsWithWitness, || format!("norm retrieval r = {r}: {:?}", rep.status))?;
    }
    Ok("phase certified, counterexample verified, norm retrieval holds for r = 1, 2, 3".into())
}

fn decomposition_witness() -> Check {
    let t = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, -1.0, 1.0]);
    let f = t.clone().try_inverse().ok_or("T not invertible")?;
    let pair = lab(Pasf::new(f, t.clone(), e(3.0), e(3.0), "rotation-sum"))?;
    let mut budget = SearchBudget::default();
    budget.strategy = Some(Strategy::Exhaustive);
    let rep = lab(decomposition_search(&pair, DecompositionMode::MultipleOfSum, 2, &budget))?;
    let Witness::Decomposition { t_side, .. } = &rep.witness else {
        return Err(format!("status {:?}, witness {:?}", rep.status, rep.witness));
    };
    let err = (t_side.reconstruct(DecompositionMode::MultipleOfSum) - &t).abs().max();
    let mu = t_side.coefficients[0];
    ensure(
        t_side.signed_permutations && t_side.bases.len() == 2 && (mu - 1.0).abs() <= 1e-12 && err <= 1e-12,
        || format!("{} bases, mu = {mu}, error {err:.3e}", t_side.bases.len()),
    )?;
    Ok(format!("T = Q1 + Q2, reconstruction error {err:.1e}"))
}

fn certified(report: &SearchReport, pair: &Pasf) -> Result<(), String> {
    if let Some(cert) = report.certificate() {
        let check = lab(verify_certificate(cert, pair))?;
        ensure(cert.verified && check.valid, || {
            format!("{}: certificate fails re-verification: {:?}", report.problem, check.reasons)
        })?;
    }
    Ok(())
}

fn deterministic(run: impl Fn() -> pasf_core::Result<SearchReport>) -> Result<SearchReport, String> {
    let a = lab(run())?;
    let b = lab(run())?;
    ensure(to_json(&a) == to_json(&b), || format!("{}: reports differ between runs", a.problem))?;
    Ok(a)
}

fn harness_properties() -> Check {
    let mut certificates = 0;
    let mut comparisons = 0;
    let exhaustive = |seed| SearchBudget {
        strategy: Some(Strategy::Exhaustive),
        ..SearchBudget::with_seed(seed)
    };
    let heuristic = |seed| SearchBudget {
        strategy: Some(Strategy::Greedy),
        ..SearchBudget::with_seed(seed)
    };
    for pair in partition_corpus()? {
        let n = pair.n();
        let a_min = 0.3 * (0..n).map(|j| pair.vector_norm(j)).fold(f64::INFINITY, f64::min);
        let ex = deterministic(|| feichtinger_search(&pair, a_min, n, &exhaustive(5)))?;
        let gr = deterministic(|| feichtinger_search(&pair, a_min, n, &heuristic(5)))?;
        certified(&ex, &pair)?;
        certified(&gr, &pair)?;
        let (me, mg) = (ex.certificate().map(|c| c.m()), gr.certificate().map(|c| c.m()));
        ensure(me.is_some() && (mg.is_none() || mg >= me), || {
            format!("{}: exhaustive M {me:?}, greedy M {mg:?}", pair.label())
        })?;
        certificates += 2;
        comparisons += 1;

        let s_norm = (pair.t() * pair.f()).norm();
        let b = s_norm * 1.01 + 1.0;
        let mut params = WeaverParams::new(b, 0.5, 2);
        params.check_element_norms = false;
        let ex = deterministic(|| weaver_search(&pair, &params, &exhaustive(5)))?;
        let ls = deterministic(|| {
            weaver_search(&pair, &params, &SearchBudget {
                strategy: Some(Strategy::LocalSearch),
                ..SearchBudget::with_seed(5)
            })
        })?;
        certified(&ex, &pair)?;
        certified(&ls, &pair)?;
        let objective = |r: &SearchReport| match &r.witness {
            Witness::WeaverOptimum { objective_lower, .. } => Some(*objective_lower),
            _ => None,
        };
        let (oe, ol) = (objective(&ex), objective(&ls));
        ensure(matches!((oe, ol), (Some(x), Some(y)) if x <= y + 1e-9), || {
            format!("{}: exhaustive objective {oe:?}, local search {ol:?}", pair.label())
        })?;
        certificates += 2;
        comparisons += 1;
    }

    // Unit-norm Riesz inputs: orthonormal bases of R^d in l².
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for d in 2..=6 {
        let q = orthonormal_columns(d, d, &mut rng);
        let pair = lab(Pasf::new(q.transpose(), q, e(2.0), e(2.0), "onb"))?;
        let ex = deterministic(|| r_eps_search(&pair, 0.1, d, &exhaustive(7)))?;
        let gr = deterministic(|| r_eps_search(&pair, 0.1, d, &heuristic(7)))?;
        certified(&ex, &pair)?;
        certified(&gr, &pair)?;
        let bounds = lab(riesz_sequence_bounds(&pair, &(0..d).collect::<Vec<_>>(), 1e-9))?;
        ensure(ex.certificate().map(|c| c.m()) == Some(1), || {
            format!("orthonormal basis d = {d} needs M > 1 (bounds {:?})", bounds.bounds.lower)
        })?;
        certificates += 2;
        comparisons += 1;
    }

    // Subsets: exhaustive optimum never beaten by the heuristic.
    for (i, (d, n)) in [(2, 4), (2, 6), (3, 6), (2, 8), (3, 8)].into_iter().enumerate() {
        let raw = lab(make_pasf(PasfKind::Random { d, n, seed: 700 + i as u64 }, e(2.0), e(2.0)))?;
        let norm = (raw.t() * raw.f()).norm() * 1.0001;
        let pair = lab(Pasf::new(raw.f() / norm, raw.t().clone(), raw.p(), raw.r(), "bessel"))?;
        let params = AwParams::new(vec![0.5; n]);
        let ex = deterministic(|| akemann_weaver_search(&pair, &params, &exhaustive(9)))?;
        let ls = deterministic(|| {
            akemann_weaver_search(&pair, &params, &SearchBudget {
                strategy: Some(Strategy::LocalSearch),
                ..SearchBudget::with_seed(9)
            })
        })?;
        let disc = |r: &SearchReport| match &r.witness {
            Witness::Subset { discrepancy_lower, .. } => Some(*discrepancy_lower),
            _ => None,
        };
        let (de, dl) = (disc(&ex), disc(&ls));
        ensure(matches!((de, dl), (Some(x), Some(y)) if x <= y + 1e-9), || {
            format!("subset d = {d}, n = {n}: exhaustive {de:?}, local search {dl:?}")
        })?;
        comparisons += 1;
    }
    Ok(format!(
        "{certificates} certificates re-verified, {comparisons} exhaustive/heuristic comparisons, all reports repeatable"
    ))
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Check); 12] = [
        ("circle frame operator", Duration::from_millis(100), circle_operator),
        ("circle norm bounds", Duration::from_secs(5), circle_norms),
        ("riesz characterization", Duration::from_secs(30), riesz_characterization),
        ("p-orthonormal classification", Duration::from_secs(60), orthonormal_classification),
        ("orthonormal sum norms", Duration::from_secs(60), observation_suite),
        ("iterative reconstruction rate", Duration::from_secs(10), duffin_schaeffer_rate),
        ("partition oracle equivalence", Duration::from_secs(120), partition_oracle),
        ("weaver desk-scale instance", Duration::from_secs(10), weaver_instance),
        ("scaling exactness", Duration::from_secs(10), scaling_exactness),
        ("retrieval certification", Duration::from_secs(5), retrieval_certification),
        ("decomposition witness", Duration::from_secs(5), decomposition_witness),
        ("search harness properties", Duration::from_secs(600), harness_properties),
    ];
    let mut failed = 0;
    for (name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if took > limit => Err(format!("{detail}; took {took:.2?}, limit {limit:.2?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS  {name:<32} {took:>10.2?}  {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name:<32} {took:>10.2?}  {why}");
            }
        }
    }
    println!("acceptance: {} of 12 criteria passed", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
