use serde::{Deserialize, Serialize};

use super::{cont_frame_operator, discretize, ContinuousPasf, Quadrature};
use crate::error::{LabError, Result};
use crate::lab::{
    akemann_weaver_search, aw_discrepancy, aw_search_from, feichtinger_search, weaver_search, AwParams, SearchBudget,
    SearchReport, Witness, WeaverParams, AW_EXHAUSTIVE_LIMIT,
};
use crate::lp::op_norm;

/// Consecutive-node groups searched exhaustively before node flips when the
/// subset problem is too large for a full search.
const AW_COARSE_GROUPS: usize = 8;

/// Which discrete harness to run on the sampled pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "problem", rename_all = "kebab-case")]
pub enum BridgeProblem {
    Feichtinger { a_min: f64, max_m: usize },
    Weaver(WeaverParams),
    /// `weights` has one entry per node; `target` is in the units of the
    /// continuous frame operator.
    AkemannWeaver(AwParams),
}

const COARSENING_NOTE: &str = "measurable sets are represented by unions of quadrature cells";

/// Runs a partition or subset harness on the discretised pair and attaches
/// interval unions for every part.
pub fn continuous_conjecture_bridge(
    c: &ContinuousPasf,
    q: &Quadrature,
    problem: &BridgeProblem,
    budget: &SearchBudget,
) -> Result<SearchReport> {
    match problem {
        BridgeProblem::Feichtinger { a_min, max_m } => {
            let pair = discretize(c, q)?;
            let mut report = feichtinger_search(&pair, *a_min, *max_m, budget)?;
            attach_parts(&mut report, q);
            Ok(report)
        }
        BridgeProblem::Weaver(params) => {
            let pair = discretize(c, q)?;
            let params = WeaverParams {
                check_element_norms: false,
                ..params.clone()
            };
            let mut report = weaver_search(&pair, &params, budget)?;
            report
                .notes
                .push("element norms not required to be at most 1: node weights scale the samples".into());
            attach_parts(&mut report, q);
            Ok(report)
        }
        BridgeProblem::AkemannWeaver(params) => akemann_weaver_bridge(c, q, params, budget),
    }
}

fn attach_parts(report: &mut SearchReport, q: &Quadrature) {
    if let Some(cert) = report.certificate() {
        let intervals = cert.parts.iter().map(|part| q.interval_union(part)).collect();
        report.intervals = Some(intervals);
    }
    report.notes.push(COARSENING_NOTE.into());
}

fn akemann_weaver_bridge(
    c: &ContinuousPasf,
    q: &Quadrature,
    params: &AwParams,
    budget: &SearchBudget,
) -> Result<SearchReport> {
    let n = q.len();
    if params.weights.len() != n {
        return Err(LabError::DimensionMismatch(format!(
            "{} weights for {n} quadrature nodes",
            params.weights.len()
        )));
    }
    // Normalise the density so the sampled Bessel bound is at most 1.
    let s = cont_frame_operator(c, q)?;
    let b = op_norm(&s, c.r(), c.r())?.upper;
    let scale = if b > 1.0 { b } else { 1.0 };
    let normalized = c.with_density_scale(1.0 / scale)?;
    let pair = discretize(&normalized, q)?;
    let inner = AwParams {
        weights: params.weights.clone(),
        target: params.target.map(|t| t / scale),
    };

    let mut report = if n <= AW_EXHAUSTIVE_LIMIT {
        akemann_weaver_search(&pair, &inner, budget)?
    } else {
        let groups = AW_COARSE_GROUPS.min(n);
        let group_of = |j: usize| j * groups / n;
        let mut best: Option<(f64, u64)> = None;
        for key in 0..(1u64 << groups) {
            let x: Vec<f64> = (0..n).map(|j| (key >> group_of(j) & 1) as f64).collect();
            let upper = aw_discrepancy(&pair, &inner.weights, &x)?.upper;
            if best.is_none_or(|(u, _)| upper < u) {
                best = Some((upper, key));
            }
        }
        let key = best.map_or(0, |(_, k)| k);
        let start: Vec<f64> = (0..n).map(|j| (key >> group_of(j) & 1) as f64).collect();
        let notes = vec![format!(
            "exhaustive over 2^{groups} subsets of consecutive-node groups, then single node flips"
        )];
        aw_search_from(&pair, &inner, start, budget, notes)?
    };
    if let Witness::Subset {
        subset,
        discrepancy,
        scale: s,
        ..
    } = &mut report.witness
    {
        *s = scale;
        let subset = subset.clone();
        report.notes.push(format!(
            "density normalised by ||S|| = {scale:.6e}; discrepancy {:.6e} normalised, {:.6e} rescaled",
            discrepancy,
            *discrepancy * scale
        ));
        report.intervals = Some(vec![q.interval_union(&subset)]);
    }
    report.notes.push(COARSENING_NOTE.into());
    Ok(report)
}
