//! Minimal partitions into Riesz sequences (with a uniform lower bound) and
//! into unit-norm ε-Riesz sequences.

use super::partition::{blocks, exhaustive_minimal, greedy_partition, ValidityCache};
use super::verify::verify_certificate;
use super::{
    mask_indices, problems, Criterion, PartBound, PartitionCertificate, SearchBudget, SearchReport, SearchStatus,
    Strategy, Thresholds, Tracker, Witness,
};
use crate::error::{LabError, Result};
use crate::frames::{is_eps_riesz, is_riesz_basis, riesz_sequence_bounds, Pasf, DEFAULT_TOL};

/// Both families must satisfy `0 < inf ‖·‖`.
pub(crate) fn check_norm_sandwich(pair: &Pasf) -> Result<()> {
    let n = pair.n();
    let tmin = (0..n).map(|j| pair.vector_norm(j)).fold(f64::INFINITY, f64::min);
    let fmin = (0..n).map(|j| pair.functional_norm(j)).fold(f64::INFINITY, f64::min);
    if tmin <= 0.0 {
        return Err(LabError::Precondition("inf ||tau_n|| = 0: the family contains a zero vector".into()));
    }
    if fmin <= 0.0 {
        return Err(LabError::Precondition("inf ||f_n|| = 0: the family contains a zero functional".into()));
    }
    Ok(())
}

pub(crate) fn riesz_part(pair: &Pasf, part: &[usize], tol: f64) -> Result<PartBound> {
    let rep = riesz_sequence_bounds(pair, part, tol)?;
    Ok(PartBound {
        index_set: rep.bounds.index_set.clone(),
        lower: rep.bounds.lower,
        upper: rep.bounds.upper,
        lower_cert: Some(rep.bounds.lower_cert),
        upper_cert: rep.bounds.upper_cert,
        pair_defect: Some(rep.pair_check.defect),
    })
}

fn finish(
    pair: &Pasf,
    parts: Vec<Vec<usize>>,
    criterion: Criterion,
    thresholds: Thresholds,
) -> Result<PartitionCertificate> {
    let per_part = parts
        .iter()
        .map(|p| riesz_part(pair, p, thresholds.tol))
        .collect::<Result<Vec<_>>>()?;
    let mut cert = PartitionCertificate {
        parts,
        per_part,
        criterion,
        thresholds,
        verified: false,
    };
    cert.verified = verify_certificate(&cert, pair)?.valid;
    Ok(cert)
}

#[allow(clippy::too_many_arguments)]
fn run_minimal(
    pair: &Pasf,
    problem: &str,
    criterion: Criterion,
    thresholds: Thresholds,
    max_m: usize,
    budget: &SearchBudget,
    valid: impl FnMut(u64) -> Result<bool>,
    mut notes: Vec<String>,
) -> Result<SearchReport> {
    let n = pair.n();
    let tracker = Tracker::new(budget);
    let strategy = budget.choose(n, budget.exhaustive_limit, Strategy::Greedy);
    let mut cache = ValidityCache::new(valid);
    let found: Option<Vec<Vec<usize>>> = match strategy {
        Strategy::Exhaustive => exhaustive_minimal(n, max_m, &mut cache, &tracker)?.map(|l| blocks(&l)),
        Strategy::Greedy | Strategy::LocalSearch => greedy_partition(n, &mut cache, &tracker)?
            .map(|masks| masks.iter().map(|&m| mask_indices(m, n)).collect()),
    };
    drop(cache);
    match found {
        Some(parts) if parts.len() <= max_m => {
            let m = parts.len();
            let certificate = finish(pair, parts, criterion, thresholds)?;
            if strategy == Strategy::Exhaustive {
                notes.push(format!("minimal number of parts M = {m}"));
            } else {
                notes.push(format!("{strategy:?} partition with M = {m}; minimality not certified").to_lowercase());
            }
            Ok(tracker.report(
                problem,
                SearchStatus::HoldsWithWitness,
                Witness::Partition { certificate },
                strategy,
                budget.seed,
                notes,
            ))
        }
        Some(parts) => {
            notes.push(format!(
                "heuristic partition needs M = {} > max_M = {max_m}",
                parts.len()
            ));
            Ok(tracker.report(
                problem,
                SearchStatus::ExhaustedInconclusive,
                Witness::None,
                strategy,
                budget.seed,
                notes,
            ))
        }
        None => {
            if tracker.exceeded() {
                notes.push("budget exhausted before the search completed".into());
            } else if strategy == Strategy::Exhaustive {
                notes.push(format!("no partition into at most {max_m} admissible parts exists"));
            } else {
                notes.push("some singleton is not admissible".into());
            }
            Ok(tracker.report(
                problem,
                SearchStatus::ExhaustedInconclusive,
                Witness::None,
                strategy,
                budget.seed,
                notes,
            ))
        }
    }
}

/// Smallest `M ≤ max_m` and a partition whose parts are Riesz sequences with
/// lower bound at least `a_min`. Functionals and vectors share the partition.
pub fn feichtinger_search(pair: &Pasf, a_min: f64, max_m: usize, budget: &SearchBudget) -> Result<SearchReport> {
    if !(a_min > 0.0) || !a_min.is_finite() {
        return Err(LabError::OutOfRange(format!("a_min must be positive, got {a_min}")));
    }
    if max_m == 0 {
        return Err(LabError::OutOfRange("max_M must be at least 1".into()));
    }
    check_norm_sandwich(pair)?;
    let tol = DEFAULT_TOL;
    let n = pair.n();
    let valid = |mask: u64| -> Result<bool> {
        let idx = mask_indices(mask, n);
        Ok(riesz_sequence_bounds(pair, &idx, tol)?.bounds.lower >= a_min)
    };
    let thresholds = Thresholds {
        a_min: Some(a_min),
        eps: None,
        b: None,
        tol,
    };
    run_minimal(
        pair,
        problems::FEICHTINGER,
        Criterion::Feichtinger,
        thresholds,
        max_m,
        budget,
        valid,
        vec!["parts gated on the synthesis lower bound; restricted-pair defect reported per part".into()],
    )
}

/// Smallest partition into unit-norm ε-Riesz sequences.
pub fn r_eps_search(pair: &Pasf, eps: f64, max_m: usize, budget: &SearchBudget) -> Result<SearchReport> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(LabError::OutOfRange(format!("epsilon must lie in (0, 1), got {eps}")));
    }
    if max_m == 0 {
        return Err(LabError::OutOfRange("max_M must be at least 1".into()));
    }
    let tol = DEFAULT_TOL;
    let n = pair.n();
    for j in 0..n {
        let values = [pair.functional_norm(j), pair.vector_norm(j), pair.pairing(j).abs()];
        if values.iter().any(|v| (v - 1.0).abs() > tol) {
            return Err(LabError::Precondition(format!(
                "element {j} is not unit norm: ||f|| = {}, ||tau|| = {}, |f(tau)| = {}",
                values[0], values[1], values[2]
            )));
        }
    }
    let full: Vec<usize> = (0..n).collect();
    let seq = riesz_sequence_bounds(pair, &full, tol)?;
    if !seq.is_riesz && !is_riesz_basis(pair, tol)?.is_riesz {
        return Err(LabError::Precondition(format!(
            "input is not a Riesz sequence (lower bound {:.3e})",
            seq.bounds.lower
        )));
    }
    let valid = |mask: u64| -> Result<bool> {
        let idx = mask_indices(mask, n);
        Ok(is_eps_riesz(pair, &idx, eps, tol)?.holds)
    };
    let thresholds = Thresholds {
        a_min: None,
        eps: Some(eps),
        b: None,
        tol,
    };
    run_minimal(pair, problems::R_EPS, Criterion::REps, thresholds, max_m, budget, valid, Vec::new())
}
