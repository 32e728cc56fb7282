//! Independent re-check of partition certificates.

use serde::{Deserialize, Serialize};

use super::{Criterion, PartitionCertificate};
use crate::error::{LabError, Result};
use crate::frames::{riesz_sequence_bounds_with, Pasf};
use crate::lp::{op_norm_with, NormOptions};

/// Seed used for recomputation; distinct from every search default.
pub(crate) const VERIFY_SEED: u64 = 0x7e51_f1ed_0bad_cafe;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateCheck {
    pub valid: bool,
    /// Why the certificate failed; empty when valid.
    pub reasons: Vec<String>,
}

fn fresh_options() -> NormOptions {
    NormOptions {
        starts: 96,
        ..NormOptions::with_seed(VERIFY_SEED)
    }
}

/// Recomputes every per-part bound from scratch and re-tests the
/// thresholds. Structural defects (overlap, missing indices) make the
/// certificate invalid; out-of-range indices or empty parts are errors.
pub fn verify_certificate(cert: &PartitionCertificate, pair: &Pasf) -> Result<CertificateCheck> {
    let n = pair.n();
    if cert.parts.is_empty() {
        return Err(LabError::MalformedCertificate("certificate has no parts".into()));
    }
    for (k, part) in cert.parts.iter().enumerate() {
        if part.is_empty() {
            return Err(LabError::MalformedCertificate(format!("part {k} is empty")));
        }
        if let Some(&j) = part.iter().find(|&&j| j >= n) {
            return Err(LabError::MalformedCertificate(format!(
                "part {k} contains index {j}, frame has n = {n}"
            )));
        }
    }
    let mut reasons = Vec::new();
    let mut seen = vec![0usize; n];
    for part in &cert.parts {
        for &j in part {
            seen[j] += 1;
        }
    }
    for (j, &count) in seen.iter().enumerate() {
        if count == 0 {
            reasons.push(format!("index {j} is not covered"));
        } else if count > 1 {
            reasons.push(format!("index {j} appears in {count} parts"));
        }
    }
    if !reasons.is_empty() {
        return Ok(CertificateCheck { valid: false, reasons });
    }

    let th = &cert.thresholds;
    let opts = fresh_options();
    let missing = |name: &str| LabError::MalformedCertificate(format!("threshold {name} missing for this criterion"));
    for (k, part) in cert.parts.iter().enumerate() {
        match cert.criterion {
            Criterion::Feichtinger => {
                let a_min = th.a_min.ok_or_else(|| missing("a_min"))?;
                let rep = riesz_sequence_bounds_with(pair, part, th.tol, &opts)?;
                if rep.bounds.lower < a_min {
                    reasons.push(format!("part {k}: lower Riesz bound {} < a_min = {a_min}", rep.bounds.lower));
                }
            }
            Criterion::REps => {
                let eps = th.eps.ok_or_else(|| missing("eps"))?;
                for &j in part {
                    let values = [pair.functional_norm(j), pair.vector_norm(j), pair.pairing(j).abs()];
                    if values.iter().any(|v| (v - 1.0).abs() > th.tol) {
                        reasons.push(format!("part {k}: element {j} is not unit norm"));
                    }
                }
                let rep = riesz_sequence_bounds_with(pair, part, th.tol, &opts)?;
                if rep.bounds.lower < 1.0 - eps - th.tol || rep.bounds.upper > 1.0 + eps + th.tol {
                    reasons.push(format!(
                        "part {k}: Riesz bounds [{}, {}] outside [1 - eps, 1 + eps]",
                        rep.bounds.lower, rep.bounds.upper
                    ));
                }
            }
            Criterion::Weaver => {
                let b = th.b.ok_or_else(|| missing("b"))?;
                let eps = th.eps.ok_or_else(|| missing("eps"))?;
                let (fi, ti) = pair.restrict(part)?;
                let est = op_norm_with(&(ti * fi), pair.r(), pair.r(), &opts)?;
                if est.upper > b - eps + th.tol {
                    reasons.push(format!("part {k}: ||S_k|| <= {} exceeds b - eps = {}", est.upper, b - eps));
                }
            }
        }
    }
    Ok(CertificateCheck {
        valid: reasons.is_empty(),
        reasons,
    })
}
