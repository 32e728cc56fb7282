//! Search harnesses, exact solvers and certificate checks for the partition,
//! scaling, retrieval, design and decomposition problems on frame pairs.
//!
//! Every harness returns a [`SearchReport`]. A `holds` or `refuted` status
//! always carries a witness that can be re-checked from scratch.

mod akemann_weaver;
mod decompose;
mod design;
mod dynamics;
mod feichtinger;
mod inequality;
mod kothe_lorch;
mod partition;
mod retrieval;
mod scaling;
mod verify;
mod weaver;

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::lp::OperatorNormEstimate;

pub use akemann_weaver::{akemann_weaver_search, AwParams, AW_EXHAUSTIVE_LIMIT};
pub(crate) use akemann_weaver::{discrepancy as aw_discrepancy, search_from as aw_search_from};
pub use decompose::{decomposition_search, DecompositionMode, DecompositionWitness};
pub use design::{inverse_design_search, DesignMode};
pub use dynamics::dynamical_build;
pub use feichtinger::{feichtinger_search, r_eps_search};
pub use inequality::{
    fundamental_inequality_check, majorization_check, FamilyCheck, InequalityReport, MajorizationReport,
    NormProfile,
};
pub use kothe_lorch::{kothe_lorch_check, KotheLorchReport};
pub use partition::{brute_force_partitions, rgs_partitions};
pub use retrieval::{retrieval_check, RetrievalKind, RetrievalSide};
pub use scaling::{scaling_solve, ScalingSolution};
pub use verify::{verify_certificate, CertificateCheck};
pub use weaver::{weaver_search, WeaverFlags, WeaverParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchStatus {
    HoldsWithWitness,
    RefutedWithWitness,
    ExhaustedInconclusive,
}

impl SearchStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SearchStatus::HoldsWithWitness => "holds-with-witness",
            SearchStatus::RefutedWithWitness => "refuted-with-witness",
            SearchStatus::ExhaustedInconclusive => "exhausted-inconclusive",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Exhaustive,
    Greedy,
    LocalSearch,
}

/// Limits and seed for a search. Exceeding the wall clock makes a report
/// depend on machine speed; the report flags it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_nodes: u64,
    pub max_seconds: f64,
    /// Largest `n` searched exhaustively by the partition harnesses.
    pub exhaustive_limit: usize,
    /// Force a strategy instead of choosing by size.
    pub strategy: Option<Strategy>,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_nodes: 50_000_000,
            max_seconds: 600.0,
            exhaustive_limit: 12,
            strategy: None,
            seed: 0,
        }
    }
}

impl SearchBudget {
    pub fn with_seed(seed: u64) -> Self {
        SearchBudget {
            seed,
            ..Default::default()
        }
    }

    pub(crate) fn choose(&self, n: usize, limit: usize, fallback: Strategy) -> Strategy {
        match self.strategy {
            Some(s) => s,
            None if n <= limit => Strategy::Exhaustive,
            None => fallback,
        }
    }
}

/// Shared node counter and clock for one search.
pub(crate) struct Tracker {
    nodes: AtomicU64,
    start: Instant,
    max_nodes: u64,
    max_seconds: f64,
    node_exceeded: AtomicBool,
    wall_exceeded: AtomicBool,
}

impl Tracker {
    pub(crate) fn new(budget: &SearchBudget) -> Self {
        Tracker {
            nodes: AtomicU64::new(0),
            start: Instant::now(),
            max_nodes: budget.max_nodes,
            max_seconds: budget.max_seconds,
            node_exceeded: AtomicBool::new(false),
            wall_exceeded: AtomicBool::new(false),
        }
    }

    /// Count `k` nodes; false once either limit is hit.
    pub(crate) fn tick(&self, k: u64) -> bool {
        let before = self.nodes.fetch_add(k, Ordering::Relaxed);
        let now = before + k;
        if now > self.max_nodes {
            self.node_exceeded.store(true, Ordering::Relaxed);
            return false;
        }
        if before / 1024 != now / 1024 && self.start.elapsed().as_secs_f64() > self.max_seconds {
            self.wall_exceeded.store(true, Ordering::Relaxed);
            return false;
        }
        !self.exceeded()
    }

    pub(crate) fn exceeded(&self) -> bool {
        self.node_exceeded.load(Ordering::Relaxed) || self.wall_exceeded.load(Ordering::Relaxed)
    }

    pub(crate) fn nodes(&self) -> u64 {
        self.nodes.load(Ordering::Relaxed).min(self.max_nodes)
    }

    pub(crate) fn report(
        &self,
        problem: &str,
        status: SearchStatus,
        witness: Witness,
        strategy: Strategy,
        seed: u64,
        notes: Vec<String>,
    ) -> SearchReport {
        SearchReport {
            problem: problem.into(),
            status,
            witness,
            nodes_examined: self.nodes(),
            strategy,
            seed,
            wall_budget_exceeded: self.wall_exceeded.load(Ordering::Relaxed),
            node_budget_exceeded: self.node_exceeded.load(Ordering::Relaxed),
            notes,
            intervals: None,
        }
    }
}

/// Descriptive problem tags written into every report.
pub mod problems {
    pub const FEICHTINGER: &str = "feichtinger-pair-partition";
    pub const R_EPS: &str = "r-epsilon-partition";
    pub const WEAVER: &str = "weaver-partition";
    pub const AKEMANN_WEAVER: &str = "akemann-weaver-subset";
    pub const INVERSE_DESIGN_TIGHT: &str = "fundamental-inequality-tight-design";
    pub const INVERSE_DESIGN_OPERATOR: &str = "prescribed-operator-design";
    pub const PHASE_RETRIEVAL: &str = "phase-retrieval";
    pub const NORM_RETRIEVAL: &str = "norm-retrieval";
    pub const DECOMP_LIN_COMB: &str = "decomposition-linear-combination";
    pub const DECOMP_MULTIPLE_OF_SUM: &str = "decomposition-multiple-of-sum";
    pub const DECOMP_ONB_PLUS_RIESZ: &str = "decomposition-onb-plus-riesz";
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criterion {
    Feichtinger,
    Weaver,
    REps,
}

/// Thresholds the parts of a certificate must meet.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    /// Tolerance the thresholds were checked with.
    pub tol: f64,
}

/// Bound evidence for one part.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartBound {
    pub index_set: Vec<usize>,
    pub lower: f64,
    pub upper: f64,
    pub lower_cert: Option<OperatorNormEstimate>,
    pub upper_cert: OperatorNormEstimate,
    /// Defect of the pair restricted to the span of the part (Riesz criteria).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair_defect: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionCertificate {
    pub parts: Vec<Vec<usize>>,
    pub per_part: Vec<PartBound>,
    pub criterion: Criterion,
    pub thresholds: Thresholds,
    pub verified: bool,
}

impl PartitionCertificate {
    pub fn m(&self) -> usize {
        self.parts.len()
    }
}

/// Payload attached to a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    None,
    Partition {
        certificate: PartitionCertificate,
    },
    /// Best Weaver labeling: `objective` is the certified max part norm,
    /// `objective_lower` the smallest achieved max over all partitions searched.
    WeaverOptimum {
        certificate: PartitionCertificate,
        objective: f64,
        objective_lower: f64,
    },
    Subset {
        subset: Vec<usize>,
        discrepancy: f64,
        discrepancy_lower: f64,
        cert: OperatorNormEstimate,
        /// Factor converting `discrepancy` back to the units of the input
        /// when the search ran on a normalised pair.
        #[serde(default = "unit_scale")]
        scale: f64,
    },
    Design {
        d: usize,
        n: usize,
        /// Row-major `n×d`.
        f: Vec<f64>,
        /// Row-major `d×n`.
        t: Vec<f64>,
        residual: f64,
        starts: usize,
    },
    RetrievalCounterexample {
        x: Vec<f64>,
        y: Vec<f64>,
        sign_pattern: Vec<i8>,
    },
    RetrievalCertificate {
        patterns_checked: u64,
        certified_patterns: u64,
    },
    Decomposition {
        t_side: DecompositionWitness,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        f_side: Option<DecompositionWitness>,
    },
}

fn unit_scale() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub problem: String,
    pub status: SearchStatus,
    pub witness: Witness,
    pub nodes_examined: u64,
    pub strategy: Strategy,
    pub seed: u64,
    pub wall_budget_exceeded: bool,
    pub node_budget_exceeded: bool,
    pub notes: Vec<String>,
    /// For continuous families: each part (or the chosen subset) as a union
    /// of parameter intervals `[lo, hi]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intervals: Option<Vec<Vec<[f64; 2]>>>,
}

impl SearchReport {
    pub fn certificate(&self) -> Option<&PartitionCertificate> {
        match &self.witness {
            Witness::Partition { certificate } | Witness::WeaverOptimum { certificate, .. } => Some(certificate),
            _ => None,
        }
    }

    pub fn budget_exceeded(&self) -> bool {
        self.wall_budget_exceeded || self.node_budget_exceeded
    }
}

pub(crate) fn mask_indices(mask: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|&j| mask >> j & 1 == 1).collect()
}
