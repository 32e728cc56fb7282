use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "pasf", version, about = "Frame-pair laboratory on (R^d, l^r)")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GlobalOpts {
    /// Seed for every randomised step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Node budget for searches.
    #[arg(long, global = true)]
    pub budget_nodes: Option<i64>,
    /// Wall-clock budget for searches.
    #[arg(long, global = true)]
    pub budget_seconds: Option<f64>,
    /// Largest n searched exhaustively by partition harnesses.
    #[arg(long, global = true)]
    pub exhaustive_limit: Option<usize>,
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, env = "PASF_THREADS")]
    #[serde(skip)]
    pub threads: Option<usize>,
    /// Write report.json, run.json, CSV tables and the cache here.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub output_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    #[serde(skip)]
    pub no_cache: bool,
    /// Experiment config (JSON); its fields become flags.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Frame bounds, classification, expansion checks.
    Analyze(AnalyzeArgs),
    /// Riesz basis, Riesz sequence or epsilon-Riesz checks.
    CertifyRiesz(CertifyArgs),
    /// Feichtinger, R_eps, Weaver or subset searches.
    Partition(PartitionArgs),
    /// Diagonal rescaling to a Parseval pair.
    Scale(ScaleArgs),
    /// Iterative reconstruction from analysis coefficients.
    Reconstruct(ReconstructArgs),
    /// Phase or norm retrieval certification.
    Retrieval(RetrievalArgs),
    /// Iterated systems (f_k U^m, V^m tau_k).
    Dynamics(DynamicsArgs),
    /// Continuous families sampled by quadrature.
    Continuous(ContinuousArgs),
    /// Norm-profile inequalities and inverse design.
    Inequality(InequalityArgs),
    /// Decomposition into p-orthonormal bases.
    Decompose(DecomposeArgs),
    /// Re-check a partition certificate against a frame.
    Verify(VerifyArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Analyze(_) => "analyze",
            Command::CertifyRiesz(_) => "certify-riesz",
            Command::Partition(_) => "partition",
            Command::Scale(_) => "scale",
            Command::Reconstruct(_) => "reconstruct",
            Command::Retrieval(_) => "retrieval",
            Command::Dynamics(_) => "dynamics",
            Command::Continuous(_) => "continuous",
            Command::Inequality(_) => "inequality",
            Command::Decompose(_) => "decompose",
            Command::Verify(_) => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Builtin {
    Standard,
    Duplicated,
    Random,
}

/// Either `--frame FILE` or `--builtin NAME` with its sizes.
#[derive(Debug, Clone, Args, Serialize)]
pub struct FrameInput {
    #[arg(long, conflicts_with = "builtin")]
    pub frame: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub builtin: Option<Builtin>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Copies per direction for the duplicated built-in.
    #[arg(long)]
    pub k: Option<usize>,
    /// Sequence exponent; overrides the file.
    #[arg(long)]
    pub p: Option<f64>,
    /// Norm exponent of X; overrides the file, defaults to p for built-ins.
    #[arg(long)]
    pub r: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: FrameInput,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CertifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: FrameInput,
    /// Sub-family to test as a Riesz sequence, e.g. "0,2,3".
    #[arg(long, value_delimiter = ',')]
    pub indices: Option<Vec<usize>>,
    /// Test the unit-norm epsilon-Riesz property on the sub-family.
    #[arg(long)]
    pub eps: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PartitionCriterion {
    Feichtinger,
    Weaver,
    REps,
    AkemannWeaver,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyArg {
    Exhaustive,
    Greedy,
    LocalSearch,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PartitionArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: FrameInput,
    #[arg(long, value_enum)]
    pub criterion: PartitionCriterion,
    #[arg(long)]
    pub a_min: Option<f64>,
    /// Largest number of parts (Feichtinger, R_eps) or the sweep end (Weaver).
    #[arg(long = "max-M", alias = "max-m")]
    pub max_m: Option<usize>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Number of Weaver parts.
    #[arg(long = "M", alias = "m")]
    pub m: Option<usize>,
    #[arg(long)]
    pub unit_norm: bool,
    #[arg(long)]
    pub tight: bool,
    #[arg(long)]
    pub spectrum_nonneg: bool,
    /// Subset weights r_j, comma separated; a single value is repeated.
    #[arg(long, value_delimiter = ',')]
    pub weights: Option<Vec<f64>>,
    /// Target discrepancy for the subset search.
    #[arg(long)]
    pub target: Option<f64>,
    #[arg(long, value_enum)]
    pub strategy: Option<StrategyArg>,
    /// Weaver only: also run M = 1..=max-M and write weaver_sweep.csv.
    #[arg(long)]
    pub sweep: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ScaleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: FrameInput,
    /// Write the rescaled pair to scaled.json when scalable.
    #[arg(long)]
    pub emit_frame: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReconstructArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: FrameInput,
    /// Ground truth x; coefficients are F x.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "coeffs")]
    pub x: Option<Vec<f64>>,
    /// Analysis coefficients c when no ground truth is known.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub coeffs: Option<Vec<f64>>,
    #[arg(long, default_value_t = 200)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub stop_tol: f64,
    /// Keep the iterates in the report.
    #[arg(long)]
    pub iterates: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KindArg {
    Phase,
    Norm,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SideArg {
    Vector,
    Functional,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RetrievalArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: FrameInput,
    #[arg(long, value_enum)]
    pub kind: KindArg,
    #[arg(long, value_enum, default_value_t = SideArg::Vector)]
    pub side: SideArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DynamicsArgs {
    /// Generator pair: F holds the functionals f_k, T the vectors tau_k.
    #[command(flatten)]
    #[serde(flatten)]
    pub input: FrameInput,
    /// Row-major d x d operator acting on functionals.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub u: Vec<f64>,
    /// Row-major d x d operator acting on vectors.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub v: Vec<f64>,
    /// Powers m = 0..horizon-1.
    #[arg(long)]
    pub horizon: usize,
    /// Write the built pair to dynamical.json.
    #[arg(long)]
    pub emit_frame: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyArg {
    Circle,
    Tabulated,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleArg {
    Trapezoid,
    Midpoint,
    GaussLegendre,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaskArg {
    /// Quadrature frame operator.
    Operator,
    /// Analysis and synthesis norm estimates.
    Norms,
    /// Riesz defect of the sampled pair.
    Defect,
    /// Classify the sampled pair; --emit-frame writes it.
    Discretize,
    /// Frame-operator error against the finest rule, written to quadrature_sweep.csv.
    Sweep,
    /// Run a partition or subset harness on the nodes.
    Bridge,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BridgeArg {
    Feichtinger,
    Weaver,
    AkemannWeaver,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ContinuousArgs {
    #[arg(long, value_enum, default_value_t = FamilyArg::Circle)]
    pub family: FamilyArg,
    /// CSV with columns alpha,w,f1..fd,t1..td for the tabulated family.
    #[arg(long)]
    pub table: Option<PathBuf>,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    /// Norm exponent for tabulated families (the circle uses r = 1).
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long, value_enum, default_value_t = RuleArg::Trapezoid)]
    pub rule: RuleArg,
    #[arg(long, default_value_t = 16)]
    pub nodes: usize,
    #[arg(long, value_enum, default_value_t = TaskArg::Operator)]
    pub task: TaskArg,
    /// Vectors tried for the analysis estimate.
    #[arg(long, default_value_t = 256)]
    pub samples: usize,
    /// Node counts for the sweep.
    #[arg(long, value_delimiter = ',', default_value = "4,8,16,32,64")]
    pub sweep_nodes: Vec<usize>,
    #[arg(long, value_enum)]
    pub problem: Option<BridgeArg>,
    #[arg(long)]
    pub a_min: Option<f64>,
    #[arg(long = "max-M", alias = "max-m")]
    pub max_m: Option<usize>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long = "M", alias = "m")]
    pub m: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub weights: Option<Vec<f64>>,
    #[arg(long)]
    pub target: Option<f64>,
    #[arg(long)]
    pub emit_frame: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DesignArg {
    Tight,
    Operator,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct InequalityArgs {
    /// JSON norm profile {"a": [...], "b": [...], "c": [...], "exponents": [p, p, p]}.
    #[arg(long, conflicts_with = "a")]
    pub profile: Option<PathBuf>,
    /// Shared norm list for all three families.
    #[arg(long, value_delimiter = ',')]
    pub a: Option<Vec<f64>>,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long)]
    pub d: usize,
    /// Descending spectrum for the majorization check.
    #[arg(long, value_delimiter = ',')]
    pub lambda: Option<Vec<f64>>,
    /// Also search for a pair realising the profile.
    #[arg(long, value_enum)]
    pub design: Option<DesignArg>,
    /// Norm exponent of X for the design search.
    #[arg(long)]
    pub r: Option<f64>,
    /// Row-major d x d target frame operator for the operator design.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub s_target: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    LinComb,
    MultipleOfSum,
    OnbPlusRiesz,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DecomposeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: FrameInput,
    #[arg(long, value_enum, default_value_t = ModeArg::LinComb)]
    pub mode: ModeArg,
    #[arg(long = "max-M", alias = "max-m", default_value_t = 2)]
    pub max_m: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: FrameInput,
    #[arg(long)]
    pub certificate: PathBuf,
}
