//! Necessary conditions on norm profiles: the fundamental inequality
//! `max_j a_j^p ≤ (1/d) Σ_j a_j^p` and majorization against a spectrum.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Prescribed functional norms `a`, vector norms `b`, pairings `c` and the
/// exponents `(p, q, r)` they are raised to.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormProfile {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub exponents: (f64, f64, f64),
}

impl NormProfile {
    /// The same list and exponent for all three families.
    pub fn uniform(a: Vec<f64>, p: f64) -> Self {
        NormProfile {
            b: a.clone(),
            c: a.clone(),
            a,
            exponents: (p, p, p),
        }
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.a.len();
        if self.b.len() != n || self.c.len() != n {
            return Err(LabError::DimensionMismatch(format!(
                "profile lengths differ: a {}, b {}, c {}",
                n,
                self.b.len(),
                self.c.len()
            )));
        }
        if n == 0 {
            return Err(LabError::Empty("norm profile".into()));
        }
        let (p, q, r) = self.exponents;
        for (name, e) in [("p", p), ("q", q), ("r", r)] {
            if !(e > 0.0) || !e.is_finite() {
                return Err(LabError::OutOfRange(format!("exponent {name} must be positive, got {e}")));
            }
        }
        for (name, list) in self.families() {
            if let Some(x) = list.iter().find(|x| !(**x >= 0.0) || !x.is_finite()) {
                return Err(LabError::OutOfRange(format!("family {name} has invalid entry {x}")));
            }
        }
        Ok(())
    }

    fn families(&self) -> [(&'static str, &[f64]); 3] {
        [("a", &self.a), ("b", &self.b), ("c", &self.c)]
    }

    fn powered(&self) -> [(&'static str, f64, Vec<f64>); 3] {
        let (p, q, r) = self.exponents;
        let pw = |v: &[f64], e: f64| v.iter().map(|x| x.powf(e)).collect::<Vec<_>>();
        [("a", p, pw(&self.a, p)), ("b", q, pw(&self.b, q)), ("c", r, pw(&self.c, r))]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyCheck {
    pub family: String,
    pub exponent: f64,
    /// `max_j x_j^e`.
    pub max_power: f64,
    /// `(1/d) Σ_j x_j^e`.
    pub mean_power: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub d: usize,
    pub families: Vec<FamilyCheck>,
    pub combined: bool,
}

pub fn fundamental_inequality_check(profile: &NormProfile, d: usize) -> Result<InequalityReport> {
    profile.validate()?;
    if d == 0 {
        return Err(LabError::OutOfRange("d must be at least 1".into()));
    }
    let n = profile.n();
    if n < d {
        return Err(LabError::Precondition(format!("need n >= d, got n = {n}, d = {d}")));
    }
    let families: Vec<FamilyCheck> = profile
        .powered()
        .into_iter()
        .map(|(name, e, pw)| {
            let max_power = pw.iter().cloned().fold(0.0, f64::max);
            let mean_power = pw.iter().sum::<f64>() / d as f64;
            FamilyCheck {
                family: name.into(),
                exponent: e,
                max_power,
                mean_power,
                holds: max_power <= mean_power * (1.0 + 1e-12),
            }
        })
        .collect();
    Ok(InequalityReport {
        d,
        combined: families.iter().all(|f| f.holds),
        families,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MajorizationFamily {
    pub family: String,
    /// `Σ_{k≤m} x_(k)^e` for `m = 1..d`, family sorted descending.
    pub prefix_sums: Vec<f64>,
    pub total: f64,
    /// First `m` (1-based) whose prefix exceeds the spectrum's.
    pub first_violation: Option<usize>,
    pub total_matches: bool,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MajorizationReport {
    pub lambda_prefix_sums: Vec<f64>,
    pub families: Vec<MajorizationFamily>,
    pub holds: bool,
}

/// Partial sums of each powered family (sorted descending) against those of
/// `λ_1 ≥ … ≥ λ_d > 0`, plus equality of the totals.
pub fn majorization_check(profile: &NormProfile, lambda: &[f64]) -> Result<MajorizationReport> {
    profile.validate()?;
    if lambda.is_empty() {
        return Err(LabError::Empty("spectrum".into()));
    }
    if lambda.iter().any(|l| !(*l > 0.0) || !l.is_finite()) {
        return Err(LabError::OutOfRange("spectrum entries must be positive".into()));
    }
    if lambda.windows(2).any(|w| w[0] < w[1]) {
        return Err(LabError::OutOfRange("spectrum must be sorted in descending order".into()));
    }
    let d = lambda.len();
    let lam_prefix: Vec<f64> = lambda
        .iter()
        .scan(0.0, |s, &l| {
            *s += l;
            Some(*s)
        })
        .collect();
    let lam_total = lam_prefix[d - 1];
    let slack = |x: f64| 1e-9 * x.abs().max(1.0);
    let families: Vec<MajorizationFamily> = profile
        .powered()
        .into_iter()
        .map(|(name, _, mut pw)| {
            pw.sort_by(|x, y| y.total_cmp(x));
            let total: f64 = pw.iter().sum();
            let prefix_sums: Vec<f64> = (1..=d).map(|m| pw.iter().take(m).sum()).collect();
            let first_violation = (0..d)
                .find(|&k| prefix_sums[k] > lam_prefix[k] + slack(lam_prefix[k]))
                .map(|k| k + 1);
            let total_matches = (total - lam_total).abs() <= slack(lam_total);
            MajorizationFamily {
                family: name.into(),
                prefix_sums,
                total,
                holds: first_violation.is_none() && total_matches,
                first_violation,
                total_matches,
            }
        })
        .collect();
    Ok(MajorizationReport {
        lambda_prefix_sums: lam_prefix,
        holds: families.iter().all(|f| f.holds),
        families,
    })
}
