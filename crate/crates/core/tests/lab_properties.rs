//! Search harnesses against independent brute-force oracles at `p = r = 2`,
//! where every part norm is a singular value.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use pasf_core::frames::{classify, frame_operator, make_pasf, FrameTag, Pasf, PasfKind};
use pasf_core::lab::{
    akemann_weaver_search, dynamical_build, fundamental_inequality_check, inverse_design_search, r_eps_search,
    weaver_search, AwParams, DesignMode, NormProfile, SearchBudget, SearchStatus, Strategy, WeaverParams, Witness,
};
use pasf_core::lp::{Exponent, Matrix};
use proptest::prelude::*;

const TWO: Exponent = Exponent::TWO;

fn exhaustive() -> SearchBudget {
    SearchBudget {
        strategy: Some(Strategy::Exhaustive),
        ..SearchBudget::default()
    }
}

/// Every set partition of `0..n` into at most `max_blocks` blocks.
fn partitions(n: usize, max_blocks: usize) -> Vec<Vec<Vec<usize>>> {
    fn go(j: usize, n: usize, k: usize, cur: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if j == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..cur.len() {
            cur[b].push(j);
            go(j + 1, n, k, cur, out);
            cur[b].pop();
        }
        if cur.len() < k {
            cur.push(vec![j]);
            go(j + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, max_blocks, &mut Vec::new(), &mut out);
    out
}

fn columns(t: &Matrix, idx: &[usize]) -> Matrix {
    let cols: Vec<_> = idx.iter().map(|&j| t.column(j).into_owned()).collect();
    Matrix::from_columns(&cols)
}

fn part_operator(pair: &Pasf, idx: &[usize]) -> Matrix {
    let mut s = DMatrix::zeros(pair.d(), pair.d());
    for &j in idx {
        s += pair.t().column(j) * pair.f().row(j);
    }
    s
}

fn spectral(m: &Matrix) -> f64 {
    m.singular_values().max()
}

/// Unit vectors `e_j + δ e_{j+1}` (cyclic), paired with their transposes.
fn cyclic_perturbation(d: usize, delta: f64) -> Pasf {
    let mut t: Matrix = DMatrix::identity(d, d);
    for j in 0..d {
        t[((j + 1) % d, j)] = delta;
    }
    for j in 0..d {
        let n = t.column(j).norm();
        t.column_mut(j).scale_mut(1.0 / n);
    }
    Pasf::new(t.transpose(), t, TWO, TWO, "cyclic").unwrap()
}

#[test]
fn r_eps_minimum_matches_brute_force() {
    for d in [3, 4, 5] {
        let pair = cyclic_perturbation(d, 0.3);
        let eps = 0.05;
        let ok = |part: &[usize]| {
            let sv = columns(pair.t(), part).singular_values();
            sv.min() >= 1.0 - eps && sv.max() <= 1.0 + eps
        };
        let oracle = partitions(d, d)
            .into_iter()
            .filter(|ps| ps.iter().all(|p| ok(p)))
            .map(|ps| ps.len())
            .min()
            .unwrap();
        let report = r_eps_search(&pair, eps, d, &exhaustive()).unwrap();
        assert_eq!(report.certificate().map(|c| c.m()), Some(oracle), "d = {d}");
    }
}

#[test]
fn non_unit_input_is_rejected() {
    let pair = cyclic_perturbation(3, 0.3);
    let doubled = Pasf::new(pair.f().clone(), pair.t() * 2.0, TWO, TWO, "doubled").unwrap();
    assert!(r_eps_search(&doubled, 0.1, 3, &exhaustive()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn weaver_optimum_matches_brute_force(seed in 0u64..10_000, n in 2usize..7, m in 2usize..4) {
        let pair = make_pasf(PasfKind::Random { d: 2, n, seed }, TWO, TWO).unwrap();
        let b = spectral(&frame_operator(&pair)) + 1.0;
        let mut params = WeaverParams::new(b, 0.5, m);
        params.check_element_norms = false;
        let report = weaver_search(&pair, &params, &exhaustive()).unwrap();
        let oracle = partitions(n, m)
            .iter()
            .map(|ps| ps.iter().map(|p| spectral(&part_operator(&pair, p))).fold(0.0, f64::max))
            .fold(f64::INFINITY, f64::min);
        match report.witness {
            Witness::WeaverOptimum { objective, objective_lower, .. } => {
                prop_assert!((objective_lower - oracle).abs() <= 1e-9 * oracle.max(1.0));
                prop_assert!((objective - oracle).abs() <= 1e-9 * oracle.max(1.0));
            }
            other => prop_assert!(false, "unexpected witness {other:?}"),
        }
    }

    #[test]
    fn subset_optimum_matches_brute_force(seed in 0u64..10_000, n in 2usize..9, w in 0.05f64..0.95) {
        let raw = make_pasf(PasfKind::Random { d: 2, n, seed }, TWO, TWO).unwrap();
        let norm = spectral(&frame_operator(&raw)) * 1.000_001;
        let pair = Pasf::new(raw.f() / norm, raw.t().clone(), TWO, TWO, "bessel").unwrap();
        let weights = vec![w; n];
        let target: Matrix = part_operator(&pair, &(0..n).collect::<Vec<_>>()) * w;
        let oracle = (0u32..1 << n)
            .map(|mask| {
                let idx: Vec<usize> = (0..n).filter(|&j| mask >> j & 1 == 1).collect();
                spectral(&(part_operator(&pair, &idx) - &target))
            })
            .fold(f64::INFINITY, f64::min);
        let report = akemann_weaver_search(&pair, &AwParams::new(weights), &exhaustive()).unwrap();
        match report.witness {
            Witness::Subset { discrepancy, .. } => prop_assert!((discrepancy - oracle).abs() <= 1e-9),
            other => prop_assert!(false, "unexpected witness {other:?}"),
        }
    }

    #[test]
    fn inequality_matches_the_hilbert_condition(a in proptest::collection::vec(0.01f64..3.0, 3..7), d in 1usize..4) {
        let report = fundamental_inequality_check(&NormProfile::uniform(a.clone(), 2.0), d).unwrap();
        let squares: Vec<f64> = a.iter().map(|x| x * x).collect();
        let max = squares.iter().cloned().fold(0.0, f64::max);
        let mean = squares.iter().sum::<f64>() / d as f64;
        prop_assume!((max - mean).abs() > 1e-9 * mean);
        prop_assert_eq!(report.combined, max <= mean);
    }
}

#[test]
fn single_element_cannot_beat_its_own_norm() {
    let pair = make_pasf(PasfKind::Standard { d: 1 }, TWO, TWO).unwrap();
    let report = weaver_search(&pair, &WeaverParams::new(1.0, 0.5, 1), &exhaustive()).unwrap();
    assert_eq!(report.status, SearchStatus::RefutedWithWitness);
}

#[test]
fn infeasible_hilbert_design_stays_inconclusive() {
    // max a_j² = 4 > (1/2)·6 = 3: no tight frame has these norms.
    let targets = NormProfile::uniform(vec![2.0, 1.0, 1.0], 2.0);
    let report = inverse_design_search(DesignMode::TightWithNorms, 2, 3, TWO, Some(&targets), None, &SearchBudget::default())
        .unwrap();
    assert_eq!(report.status, SearchStatus::ExhaustedInconclusive);
    let Witness::Design { residual, starts, .. } = report.witness else {
        panic!("best attempt missing from the report");
    };
    assert!(residual > 1e-3 && starts >= 64, "residual {residual}, {starts} starts");
}

#[test]
fn prescribed_operator_has_an_exact_witness() {
    let target = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]);
    let report =
        inverse_design_search(DesignMode::FrameOperatorWithNorms, 2, 3, TWO, None, Some(&target), &SearchBudget::default())
            .unwrap();
    assert_eq!(report.status, SearchStatus::HoldsWithWitness);
    let Witness::Design { f, t, residual, .. } = report.witness else {
        panic!("no design witness");
    };
    let s = DMatrix::from_row_slice(2, 3, &t) * DMatrix::from_row_slice(3, 2, &f);
    assert!(residual <= 1e-10 && (s - target).abs().max() <= 1e-9);
}

#[test]
fn three_rotations_give_a_parseval_frame() {
    let (c, s) = ((2.0 * PI / 3.0).cos(), (2.0 * PI / 3.0).sin());
    let v = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
    let g = (2.0f64 / 3.0).sqrt();
    let gf = DMatrix::from_row_slice(1, 2, &[g, 0.0]);
    let gt = DMatrix::from_row_slice(2, 1, &[g, 0.0]);
    let pair = dynamical_build(&gf, &gt, &v.transpose(), &v, 3, TWO, TWO).unwrap();
    assert!((frame_operator(&pair) - DMatrix::identity(2, 2)).abs().max() <= 1e-15);
    assert_eq!(classify(&pair, 1e-9).unwrap().tag, FrameTag::Parseval);
}
