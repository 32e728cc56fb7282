//! Subcommand dispatch. Each command returns an [`Outcome`]; writing files
//! and the cache live in `record`.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use pasf_core::continuous::{
    cont_frame_operator, cont_norm_estimates, cont_riesz_defect, continuous_conjecture_bridge, discretize,
    BridgeProblem, ContinuousPasf, Quadrature, QuadratureRule,
};
use pasf_core::frames::{
    classify, frame_operator, is_eps_riesz, is_riesz_basis, make_pasf, riesz_sequence_bounds, FrameTag, Pasf,
    PasfKind,
};
use pasf_core::io::{frame_to_json, parse_certificate_json, parse_tabulated_csv};
use pasf_core::lab::{
    akemann_weaver_search, decomposition_search, dynamical_build, feichtinger_search, fundamental_inequality_check,
    inverse_design_search, kothe_lorch_check, majorization_check, r_eps_search, retrieval_check, scaling_solve,
    verify_certificate, weaver_search, AwParams, DecompositionMode, DesignMode, NormProfile, RetrievalKind,
    RetrievalSide, SearchBudget, SearchReport, SearchStatus, Strategy, WeaverFlags, WeaverParams, Witness,
};
use pasf_core::lp::{Exponent, Matrix};
use pasf_core::reconstruct::{check_algorithm_condition, duffin_schaeffer};
use pasf_core::LabError;
use serde_json::{json, Value};

use crate::args::*;
use crate::error::{usage, CliError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Refuted,
    Inconclusive,
}

impl Verdict {
    pub fn exit_code(self) -> u8 {
        match self {
            Verdict::Holds => 0,
            Verdict::Refuted => 1,
            Verdict::Inconclusive => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Refuted => "refuted",
            Verdict::Inconclusive => "inconclusive",
        }
    }

    pub fn from_status(s: SearchStatus) -> Self {
        match s {
            SearchStatus::HoldsWithWitness => Verdict::Holds,
            SearchStatus::RefutedWithWitness => Verdict::Refuted,
            SearchStatus::ExhaustedInconclusive => Verdict::Inconclusive,
        }
    }

    fn of(ok: bool) -> Self {
        if ok {
            Verdict::Holds
        } else {
            Verdict::Refuted
        }
    }
}

/// An extra output file: name inside the output directory and its contents.
pub type Artifact = (String, String);

pub struct Outcome {
    pub verdict: Verdict,
    pub problem: Option<String>,
    pub result: Value,
    pub warnings: Vec<String>,
    pub artifacts: Vec<Artifact>,
}

impl Outcome {
    fn new(verdict: Verdict, result: Value) -> Self {
        Outcome {
            verdict,
            problem: None,
            result,
            warnings: Vec::new(),
            artifacts: Vec::new(),
        }
    }

    fn from_report(report: SearchReport) -> Self {
        let mut out = Outcome::new(Verdict::from_status(report.status), value(&report));
        out.problem = Some(report.problem.clone());
        out
    }
}

fn value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serialisable")
}

fn exponent(v: f64, name: &str) -> Result<Exponent, CliError> {
    Exponent::new(v).map_err(|_| CliError::Usage(format!("--{name} must be at least 1, got {v}")))
}

fn require<T: Copy>(v: Option<T>, flag: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("{flag} is required")))
}

fn square(values: &[f64], d: usize, flag: &str) -> Result<Matrix, CliError> {
    if values.len() != d * d {
        return usage(format!("{flag} needs {} entries for a {d}x{d} matrix, got {}", d * d, values.len()));
    }
    Ok(DMatrix::from_row_slice(d, d, values))
}

fn rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

pub fn budget(g: &GlobalOpts, strategy: Option<StrategyArg>) -> Result<SearchBudget, CliError> {
    let mut b = SearchBudget::with_seed(g.seed);
    if let Some(n) = g.budget_nodes {
        if n <= 0 {
            return usage("--budget-nodes must be positive");
        }
        b.max_nodes = n as u64;
    }
    if let Some(s) = g.budget_seconds {
        if !(s > 0.0) {
            return usage("--budget-seconds must be positive");
        }
        b.max_seconds = s;
    }
    if let Some(limit) = g.exhaustive_limit {
        b.exhaustive_limit = limit;
    }
    b.strategy = strategy.map(|s| match s {
        StrategyArg::Exhaustive => Strategy::Exhaustive,
        StrategyArg::Greedy => Strategy::Greedy,
        StrategyArg::LocalSearch => Strategy::LocalSearch,
    });
    Ok(b)
}

/// Files read by a command, for the input digest.
pub fn input_files(cmd: &Command) -> Vec<PathBuf> {
    let frame = |i: &FrameInput| i.frame.clone();
    let mut files: Vec<Option<PathBuf>> = match cmd {
        Command::Analyze(a) => vec![frame(&a.input)],
        Command::CertifyRiesz(a) => vec![frame(&a.input)],
        Command::Partition(a) => vec![frame(&a.input)],
        Command::Scale(a) => vec![frame(&a.input)],
        Command::Reconstruct(a) => vec![frame(&a.input)],
        Command::Retrieval(a) => vec![frame(&a.input)],
        Command::Dynamics(a) => vec![frame(&a.input)],
        Command::Continuous(a) => vec![a.table.clone()],
        Command::Inequality(a) => vec![a.profile.clone()],
        Command::Decompose(a) => vec![frame(&a.input)],
        Command::Verify(a) => vec![frame(&a.input), Some(a.certificate.clone())],
    };
    files.drain(..).flatten().collect()
}

pub fn read_input(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::NoInput(format!("{}: {e}", path.display())))
}

fn load_pair(input: &FrameInput, seed: u64, warnings: &mut Vec<String>) -> Result<Pasf, CliError> {
    let p_flag = input.p.map(|p| exponent(p, "p")).transpose()?;
    let r_flag = input.r.map(|r| exponent(r, "r")).transpose()?;
    match (&input.frame, input.builtin) {
        (Some(path), _) => {
            let text = read_input(path)?;
            let loaded = pasf_core::io::parse_frame_json(&text)?;
            warnings.extend(loaded.warnings.iter().map(|w| format!("{}: {w}", path.display())));
            let pair = loaded.pair;
            let p = p_flag.unwrap_or(pair.p());
            let r = r_flag.unwrap_or(pair.r());
            Ok(pair.with_exponents(p, r))
        }
        (None, Some(kind)) => {
            let p = p_flag.unwrap_or(Exponent::TWO);
            let r = r_flag.unwrap_or(p);
            let d = require(input.d, "--d")?;
            let kind = match kind {
                Builtin::Standard => PasfKind::Standard { d },
                Builtin::Duplicated => PasfKind::DuplicatedStandard {
                    d,
                    k: require(input.k, "--k")?,
                },
                Builtin::Random => PasfKind::Random {
                    d,
                    n: require(input.n, "--n")?,
                    seed,
                },
            };
            Ok(make_pasf(kind, p, r)?)
        }
        (None, None) => usage("an input is required: --frame FILE or --builtin NAME"),
    }
}

pub fn dispatch(cmd: &Command, g: &GlobalOpts) -> Result<Outcome, CliError> {
    let mut warnings = Vec::new();
    let result = match cmd {
        Command::Analyze(a) => analyze(&load_pair(&a.input, g.seed, &mut warnings)?, g),
        Command::CertifyRiesz(a) => certify(&load_pair(&a.input, g.seed, &mut warnings)?, a, g),
        Command::Partition(a) => partition(&load_pair(&a.input, g.seed, &mut warnings)?, a, g),
        Command::Scale(a) => scale(&load_pair(&a.input, g.seed, &mut warnings)?, a, g),
        Command::Reconstruct(a) => reconstruct(&load_pair(&a.input, g.seed, &mut warnings)?, a),
        Command::Retrieval(a) => retrieval(&load_pair(&a.input, g.seed, &mut warnings)?, a, g),
        Command::Dynamics(a) => dynamics(&load_pair(&a.input, g.seed, &mut warnings)?, a, g),
        Command::Continuous(a) => continuous(a, g),
        Command::Inequality(a) => inequality(a, g),
        Command::Decompose(a) => decompose(&load_pair(&a.input, g.seed, &mut warnings)?, a, g),
        Command::Verify(a) => verify(&load_pair(&a.input, g.seed, &mut warnings)?, a),
    };
    let mut out = match result {
        Ok(out) => out,
        // Too large to search at all: reported, not a crash.
        Err(CliError::Data(LabError::Budget(msg))) => Outcome::new(Verdict::Inconclusive, json!({ "error": msg })),
        Err(e) => return Err(e),
    };
    warnings.append(&mut out.warnings);
    out.warnings = warnings;
    Ok(out)
}

fn describe(pair: &Pasf) -> Value {
    json!({
        "label": pair.label(),
        "d": pair.d(),
        "n": pair.n(),
        "p": value(&pair.p()),
        "r": value(&pair.r()),
    })
}

fn analyze(pair: &Pasf, g: &GlobalOpts) -> Result<Outcome, CliError> {
    let class = classify(pair, g.tol)?;
    let kl = kothe_lorch_check(pair, g.tol)?;
    let condition = check_algorithm_condition(pair).ok();
    let mut out = Outcome::new(
        Verdict::Holds,
        json!({
            "frame": describe(pair),
            "tag": class.tag.as_str(),
            "classification": value(&class),
            "expansion": value(&kl),
            "algorithm_condition": value(&condition),
        }),
    );
    if condition.is_none() {
        out.warnings.push("frame operator has no positive lower bound; algorithm condition skipped".into());
    }
    Ok(out)
}

fn certify(pair: &Pasf, a: &CertifyArgs, g: &GlobalOpts) -> Result<Outcome, CliError> {
    match (&a.indices, a.eps) {
        (Some(idx), Some(eps)) => {
            let check = is_eps_riesz(pair, idx, eps, g.tol)?;
            Ok(Outcome::new(Verdict::of(check.holds), json!({ "frame": describe(pair), "eps_riesz": value(&check) })))
        }
        (Some(idx), None) => {
            let rep = riesz_sequence_bounds(pair, idx, g.tol)?;
            Ok(Outcome::new(
                Verdict::of(rep.is_riesz),
                json!({ "frame": describe(pair), "riesz_sequence": value(&rep) }),
            ))
        }
        (None, Some(eps)) => {
            let all: Vec<usize> = (0..pair.n()).collect();
            let check = is_eps_riesz(pair, &all, eps, g.tol)?;
            Ok(Outcome::new(Verdict::of(check.holds), json!({ "frame": describe(pair), "eps_riesz": value(&check) })))
        }
        (None, None) => {
            let check = is_riesz_basis(pair, g.tol)?;
            Ok(Outcome::new(
                Verdict::of(check.is_riesz),
                json!({ "frame": describe(pair), "riesz_basis": value(&check) }),
            ))
        }
    }
}

fn weaver_params(b: f64, eps: f64, m: usize, a: &PartitionArgs) -> WeaverParams {
    WeaverParams {
        flags: WeaverFlags {
            unit_norm: a.unit_norm,
            tight: a.tight,
            spectrum_nonneg: a.spectrum_nonneg,
        },
        ..WeaverParams::new(b, eps, m)
    }
}

fn expand_weights(weights: &[f64], n: usize) -> Vec<f64> {
    if weights.len() == 1 {
        vec![weights[0]; n]
    } else {
        weights.to_vec()
    }
}

fn partition(pair: &Pasf, a: &PartitionArgs, g: &GlobalOpts) -> Result<Outcome, CliError> {
    let budget = budget(g, a.strategy)?;
    let n = pair.n();
    match a.criterion {
        PartitionCriterion::Feichtinger => {
            let a_min = require(a.a_min, "--a-min")?;
            let max_m = a.max_m.unwrap_or(n);
            Ok(Outcome::from_report(feichtinger_search(pair, a_min, max_m, &budget)?))
        }
        PartitionCriterion::REps => {
            let eps = require(a.eps, "--eps")?;
            let max_m = a.max_m.unwrap_or(n);
            Ok(Outcome::from_report(r_eps_search(pair, eps, max_m, &budget)?))
        }
        PartitionCriterion::Weaver => {
            let b = require(a.b, "--b")?;
            let eps = require(a.eps, "--eps")?;
            let m = require(a.m, "--M")?;
            let report = weaver_search(pair, &weaver_params(b, eps, m, a), &budget)?;
            let mut out = Outcome::from_report(report);
            if a.sweep {
                let last = a.max_m.unwrap_or(m);
                let mut csv = String::from("m,objective,objective_lower,status\n");
                for mm in 1..=last {
                    let rep = weaver_search(pair, &weaver_params(b, eps, mm, a), &budget)?;
                    let (obj, lower) = match rep.witness {
                        Witness::WeaverOptimum {
                            objective,
                            objective_lower,
                            ..
                        } => (objective, objective_lower),
                        _ => (f64::NAN, f64::NAN),
                    };
                    csv.push_str(&format!("{mm},{obj},{lower},{}\n", rep.status.as_str()));
                }
                out.artifacts.push(("weaver_sweep.csv".into(), csv));
            }
            Ok(out)
        }
        PartitionCriterion::AkemannWeaver => {
            let weights = a.weights.as_deref().ok_or_else(|| CliError::Usage("--weights is required".into()))?;
            let mut params = AwParams::new(expand_weights(weights, n));
            params.target = a.target;
            Ok(Outcome::from_report(akemann_weaver_search(pair, &params, &budget)?))
        }
    }
}

fn scale(pair: &Pasf, a: &ScaleArgs, g: &GlobalOpts) -> Result<Outcome, CliError> {
    let sol = scaling_solve(pair)?;
    let mut result = json!({ "frame": describe(pair), "scaling": value(&sol) });
    let mut artifacts = Vec::new();
    if sol.scalable {
        let scaled = sol.apply(pair)?;
        result["scaled_classification"] = value(&classify(&scaled, g.tol.max(1e-8))?);
        if a.emit_frame {
            artifacts.push(("scaled.json".into(), frame_to_json(&scaled)));
        }
    }
    let mut out = Outcome::new(Verdict::of(sol.scalable), result);
    out.artifacts = artifacts;
    Ok(out)
}

fn reconstruct(pair: &Pasf, a: &ReconstructArgs) -> Result<Outcome, CliError> {
    let (c, truth) = match (&a.x, &a.coeffs) {
        (Some(x), _) => {
            if x.len() != pair.d() {
                return usage(format!("--x needs {} entries", pair.d()));
            }
            let c = pair.f() * nalgebra::DVector::from_column_slice(x);
            (c.as_slice().to_vec(), Some(x.as_slice()))
        }
        (None, Some(c)) => (c.clone(), None),
        (None, None) => return usage("give --x (ground truth) or --coeffs"),
    };
    let trace = duffin_schaeffer(pair, &c, a.max_iters, a.stop_tol, truth)?;
    let trace = if a.iterates { trace } else { trace.without_iterates() };
    let verdict = if trace.converged {
        Verdict::Holds
    } else {
        Verdict::Inconclusive
    };
    Ok(Outcome::new(verdict, json!({ "frame": describe(pair), "trace": value(&trace) })))
}

fn retrieval(pair: &Pasf, a: &RetrievalArgs, g: &GlobalOpts) -> Result<Outcome, CliError> {
    let side = match a.side {
        SideArg::Vector => RetrievalSide::Vector,
        SideArg::Functional => RetrievalSide::Functional,
    };
    let kind = match a.kind {
        KindArg::Phase => RetrievalKind::Phase,
        KindArg::Norm => RetrievalKind::Norm,
    };
    Ok(Outcome::from_report(retrieval_check(pair, side, kind, &budget(g, None)?)?))
}

fn dynamics(gen: &Pasf, a: &DynamicsArgs, g: &GlobalOpts) -> Result<Outcome, CliError> {
    let d = gen.d();
    let u = square(&a.u, d, "--u")?;
    let v = square(&a.v, d, "--v")?;
    let pair = dynamical_build(gen.f(), gen.t(), &u, &v, a.horizon, gen.p(), gen.r())?;
    let class = classify(&pair, g.tol)?;
    let mut out = Outcome::new(
        Verdict::of(class.tag >= FrameTag::Asf),
        json!({ "frame": describe(&pair), "tag": class.tag.as_str(), "classification": value(&class) }),
    );
    if a.emit_frame {
        out.artifacts.push(("dynamical.json".into(), frame_to_json(&pair)));
    }
    Ok(out)
}

fn quadrature_rule(r: RuleArg) -> QuadratureRule {
    match r {
        RuleArg::Trapezoid => QuadratureRule::Trapezoid,
        RuleArg::Midpoint => QuadratureRule::Midpoint,
        RuleArg::GaussLegendre => QuadratureRule::GaussLegendre,
    }
}

fn continuous(a: &ContinuousArgs, g: &GlobalOpts) -> Result<Outcome, CliError> {
    let p = exponent(a.p, "p")?;
    let family = match a.family {
        FamilyArg::Circle => ContinuousPasf::circle_example(p)?,
        FamilyArg::Tabulated => {
            let path = a.table.as_ref().ok_or_else(|| CliError::Usage("--table is required".into()))?;
            let table = parse_tabulated_csv(&read_input(path)?)?;
            let r = a.r.map(|r| exponent(r, "r")).transpose()?.unwrap_or(p);
            let label = path.file_stem().map_or("tabulated".into(), |s| s.to_string_lossy().into_owned());
            ContinuousPasf::tabulated(table, p, r, label)?
        }
    };
    let rule = quadrature_rule(a.rule);
    let q = Quadrature::new(rule, a.nodes, family.domain())?;
    let header = json!({
        "family": family.label(),
        "d": family.d(),
        "p": value(&family.p()),
        "r": value(&family.r()),
        "rule": rule.as_str(),
        "nodes": q.len(),
    });
    let mut out = match a.task {
        TaskArg::Operator => {
            let s = cont_frame_operator(&family, &q)?;
            Outcome::new(Verdict::Holds, json!({ "family": header, "frame_operator": rows(&s) }))
        }
        TaskArg::Norms => {
            let est = cont_norm_estimates(&family, &q, a.samples, g.seed)?;
            Outcome::new(Verdict::Holds, json!({ "family": header, "norms": value(&est) }))
        }
        TaskArg::Defect => {
            let defect = cont_riesz_defect(&family, &q)?;
            Outcome::new(Verdict::Holds, json!({ "family": header, "riesz_defect": value(&defect) }))
        }
        TaskArg::Discretize => {
            let pair = discretize(&family, &q)?;
            let class = classify(&pair, g.tol.max(1e-8))?;
            let mut out = Outcome::new(
                Verdict::Holds,
                json!({
                    "family": header,
                    "frame": describe(&pair),
                    "tag": class.tag.as_str(),
                    "classification": value(&class),
                    "frame_operator": rows(&frame_operator(&pair)),
                }),
            );
            if a.emit_frame {
                out.artifacts.push(("discretized.json".into(), frame_to_json(&pair)));
            }
            out
        }
        TaskArg::Sweep => sweep(&family, a)?,
        TaskArg::Bridge => {
            let problem = match require(a.problem, "--problem")? {
                BridgeArg::Feichtinger => BridgeProblem::Feichtinger {
                    a_min: require(a.a_min, "--a-min")?,
                    max_m: a.max_m.unwrap_or(q.len()),
                },
                BridgeArg::Weaver => BridgeProblem::Weaver(WeaverParams::new(
                    require(a.b, "--b")?,
                    require(a.eps, "--eps")?,
                    require(a.m, "--M")?,
                )),
                BridgeArg::AkemannWeaver => {
                    let w = a.weights.as_deref().ok_or_else(|| CliError::Usage("--weights is required".into()))?;
                    let mut params = AwParams::new(expand_weights(w, q.len()));
                    params.target = a.target;
                    BridgeProblem::AkemannWeaver(params)
                }
            };
            let report = continuous_conjecture_bridge(&family, &q, &problem, &budget(g, None)?)?;
            let mut out = Outcome::from_report(report);
            out.result = json!({ "family": header, "report": out.result });
            out
        }
    };
    if matches!(a.family, FamilyArg::Circle) && !family.r().is_one() {
        out.warnings.push("circle family uses r = 1".into());
    }
    Ok(out)
}

/// Frame-operator error against `πI` for the circle, otherwise against a
/// Gauss–Legendre rule with four times the largest node count.
fn sweep(family: &ContinuousPasf, a: &ContinuousArgs) -> Result<Outcome, CliError> {
    let rule = quadrature_rule(a.rule);
    let d = family.d();
    let (reference, reference_name) = match a.family {
        FamilyArg::Circle => (DMatrix::identity(d, d) * PI, "exact".to_string()),
        FamilyArg::Tabulated => {
            let n_ref = 4 * a.sweep_nodes.iter().copied().max().unwrap_or(16);
            let q = Quadrature::new(QuadratureRule::GaussLegendre, n_ref, family.domain())?;
            (cont_frame_operator(family, &q)?, format!("gauss-legendre-{n_ref}"))
        }
    };
    let mut csv = String::from("rule,nodes,error,reference\n");
    let mut points = Vec::new();
    for &n in &a.sweep_nodes {
        let q = Quadrature::new(rule, n, family.domain())?;
        let err = (cont_frame_operator(family, &q)? - &reference).norm();
        csv.push_str(&format!("{},{n},{err:?},{reference_name}\n", rule.as_str()));
        points.push(json!({ "nodes": n, "error": err }));
    }
    let mut out = Outcome::new(
        Verdict::Holds,
        json!({ "family": family.label(), "rule": rule.as_str(), "reference": reference_name, "sweep": points }),
    );
    out.artifacts.push(("quadrature_sweep.csv".into(), csv));
    Ok(out)
}

fn inequality(a: &InequalityArgs, g: &GlobalOpts) -> Result<Outcome, CliError> {
    let profile = match (&a.profile, &a.a) {
        (Some(path), _) => {
            let text = read_input(path)?;
            serde_json::from_str::<NormProfile>(&text).map_err(|e| LabError::Schema(e.to_string()))?
        }
        (None, Some(list)) => NormProfile::uniform(list.clone(), a.p),
        (None, None) => return usage("give --profile FILE or --a LIST"),
    };
    let ineq = fundamental_inequality_check(&profile, a.d)?;
    let mut verdict = Verdict::of(ineq.combined);
    let mut result = json!({ "inequality": value(&ineq) });
    if let Some(lambda) = &a.lambda {
        let maj = majorization_check(&profile, lambda)?;
        if !maj.holds {
            verdict = Verdict::Refuted;
        }
        result["majorization"] = value(&maj);
    }
    let mut problem = None;
    if let Some(design) = a.design {
        let r = exponent(a.r.unwrap_or(a.p), "r")?;
        let s_target = a.s_target.as_deref().map(|s| square(s, a.d, "--s-target")).transpose()?;
        let mode = match design {
            DesignArg::Tight => DesignMode::TightWithNorms,
            DesignArg::Operator => DesignMode::FrameOperatorWithNorms,
        };
        let report = inverse_design_search(mode, a.d, profile.n(), r, Some(&profile), s_target.as_ref(), &budget(g, None)?)?;
        let dv = Verdict::from_status(report.status);
        verdict = match (verdict, dv) {
            (Verdict::Refuted, _) | (_, Verdict::Refuted) => Verdict::Refuted,
            (_, Verdict::Inconclusive) => Verdict::Inconclusive,
            (v, Verdict::Holds) => v,
        };
        problem = Some(report.problem.clone());
        result["design"] = value(&report);
    }
    let mut out = Outcome::new(verdict, result);
    out.problem = problem;
    Ok(out)
}

fn decompose(pair: &Pasf, a: &DecomposeArgs, g: &GlobalOpts) -> Result<Outcome, CliError> {
    let mode = match a.mode {
        ModeArg::LinComb => DecompositionMode::LinComb,
        ModeArg::MultipleOfSum => DecompositionMode::MultipleOfSum,
        ModeArg::OnbPlusRiesz => DecompositionMode::OnbPlusRiesz,
    };
    Ok(Outcome::from_report(decomposition_search(pair, mode, a.max_m, &budget(g, None)?)?))
}

/// Finds a certificate in a bare certificate file, a search report, or a
/// report written by this tool.
fn extract_certificate(v: &Value) -> Option<&Value> {
    if v.get("parts").is_some() {
        return Some(v);
    }
    if let Some(c) = v.get("witness").and_then(|w| w.get("certificate")) {
        return Some(c);
    }
    v.get("result")
        .and_then(|r| extract_certificate(r).or_else(|| r.get("report").and_then(extract_certificate)))
}

fn verify(pair: &Pasf, a: &VerifyArgs) -> Result<Outcome, CliError> {
    let text = read_input(&a.certificate)?;
    let v: Value = serde_json::from_str(&text).map_err(|e| LabError::Parse(e.to_string()))?;
    let cert_value =
        extract_certificate(&v).ok_or_else(|| LabError::Schema("no partition certificate found in the file".into()))?;
    let cert = parse_certificate_json(&cert_value.to_string())?;
    let check = verify_certificate(&cert, pair)?;
    Ok(Outcome::new(
        Verdict::of(check.valid),
        json!({ "frame": describe(pair), "criterion": value(&cert.criterion), "check": value(&check) }),
    ))
}
