use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureRule {
    /// `N` equispaced nodes including both endpoints.
    Trapezoid,
    /// Centres of `N` equal cells.
    Midpoint,
    GaussLegendre,
}

impl QuadratureRule {
    pub fn as_str(self) -> &'static str {
        match self {
            QuadratureRule::Trapezoid => "trapezoid",
            QuadratureRule::Midpoint => "midpoint",
            QuadratureRule::GaussLegendre => "gauss-legendre",
        }
    }
}

impl fmt::Display for QuadratureRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for QuadratureRule {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trapezoid" => Ok(QuadratureRule::Trapezoid),
            "midpoint" => Ok(QuadratureRule::Midpoint),
            "gauss-legendre" | "gauss" => Ok(QuadratureRule::GaussLegendre),
            other => Err(LabError::Parse(format!("unknown quadrature rule {other:?}"))),
        }
    }
}

/// Nodes and weights on an interval. Nodes are sorted, weights positive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    rule: QuadratureRule,
    domain: (f64, f64),
}

impl Quadrature {
    pub fn new(rule: QuadratureRule, n: usize, domain: (f64, f64)) -> Result<Self> {
        let (a, b) = domain;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(LabError::OutOfRange(format!("bad interval [{a}, {b}]")));
        }
        if n == 0 {
            return Err(LabError::Empty("quadrature needs at least one node".into()));
        }
        let len = b - a;
        let (nodes, weights) = match rule {
            QuadratureRule::Trapezoid => {
                if n < 2 {
                    return Err(LabError::OutOfRange("trapezoid rule needs N >= 2".into()));
                }
                let h = len / (n - 1) as f64;
                let nodes: Vec<f64> = (0..n)
                    .map(|i| if i == n - 1 { b } else { a + i as f64 * h })
                    .collect();
                let weights = (0..n)
                    .map(|i| if i == 0 || i == n - 1 { h / 2.0 } else { h })
                    .collect();
                (nodes, weights)
            }
            QuadratureRule::Midpoint => {
                let h = len / n as f64;
                ((0..n).map(|i| a + (i as f64 + 0.5) * h).collect(), vec![h; n])
            }
            QuadratureRule::GaussLegendre => {
                let (x, w) = gauss_legendre(n);
                let half = len / 2.0;
                let mid = (a + b) / 2.0;
                (x.iter().map(|t| mid + half * t).collect(), w.iter().map(|v| v * half).collect())
            }
        };
        Ok(Quadrature {
            nodes,
            weights,
            rule,
            domain,
        })
    }

    /// Custom nodes; weights must be positive and nodes sorted inside `domain`.
    pub fn from_parts(nodes: Vec<f64>, weights: Vec<f64>, rule: QuadratureRule, domain: (f64, f64)) -> Result<Self> {
        if nodes.is_empty() {
            return Err(LabError::Empty("quadrature needs at least one node".into()));
        }
        if nodes.len() != weights.len() {
            return Err(LabError::DimensionMismatch(format!(
                "{} nodes but {} weights",
                nodes.len(),
                weights.len()
            )));
        }
        if nodes.iter().chain(&weights).any(|v| !v.is_finite()) {
            return Err(LabError::NonFinite("quadrature".into()));
        }
        if weights.iter().any(|&w| w <= 0.0) {
            return Err(LabError::OutOfRange("quadrature weights must be positive".into()));
        }
        if nodes.windows(2).any(|w| w[0] > w[1]) {
            return Err(LabError::OutOfRange("quadrature nodes must be sorted".into()));
        }
        if nodes[0] < domain.0 || nodes[nodes.len() - 1] > domain.1 {
            return Err(LabError::OutOfRange("quadrature node outside the domain".into()));
        }
        Ok(Quadrature {
            nodes,
            weights,
            rule,
            domain,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn rule(&self) -> QuadratureRule {
        self.rule
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Cell of each node: bounded by midpoints to its neighbours and by the
    /// domain ends.
    pub fn cells(&self) -> Vec<[f64; 2]> {
        let n = self.nodes.len();
        (0..n)
            .map(|i| {
                let lo = if i == 0 {
                    self.domain.0
                } else {
                    (self.nodes[i - 1] + self.nodes[i]) / 2.0
                };
                let hi = if i == n - 1 {
                    self.domain.1
                } else {
                    (self.nodes[i] + self.nodes[i + 1]) / 2.0
                };
                [lo, hi]
            })
            .collect()
    }

    /// Union of the cells of `idx`, adjacent cells merged.
    pub fn interval_union(&self, idx: &[usize]) -> Vec<[f64; 2]> {
        let cells = self.cells();
        let mut sorted: Vec<usize> = idx.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let mut out: Vec<[f64; 2]> = Vec::new();
        let mut prev: Option<usize> = None;
        for i in sorted {
            let cell = cells[i];
            match (out.last_mut(), prev) {
                (Some(last), Some(p)) if p + 1 == i => last[1] = cell[1],
                _ => out.push(cell),
            }
            prev = Some(i);
        }
        out
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() <= 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// `(P_n(z), P_n'(z))`.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, dp)
}
