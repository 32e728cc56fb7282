//! Report and run-record output, input digests, and the result cache.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use pasf_core::io::ExperimentConfig;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::args::Cli;
use crate::error::CliError;
use crate::run::{dispatch, input_files, read_input, Artifact};

const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Everything about one run. `report` is the exact content of report.json.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: ExperimentConfig,
    pub report: Value,
    pub exit_code: u8,
    pub tool_version: String,
    /// SHA-256 over the per-file digests, in order.
    pub input_digest: String,
    pub inputs: Vec<InputDigest>,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
    pub threads: usize,
    pub cached: bool,
    pub warnings: Vec<String>,
    #[serde(default)]
    pub artifacts: Vec<Artifact>,
}

fn now_ms() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis())
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn resolved_config(cli: &Cli) -> ExperimentConfig {
    let name = cli.command.name();
    let mut params: Map<String, Value> = match serde_json::to_value(&cli.command) {
        Ok(Value::Object(mut outer)) => match outer.remove(name) {
            Some(Value::Object(inner)) => inner,
            _ => Map::new(),
        },
        _ => Map::new(),
    };
    if let Ok(Value::Object(globals)) = serde_json::to_value(&cli.global) {
        params.extend(globals);
    }
    params.retain(|_, v| !v.is_null());
    let input = ["frame", "builtin", "table", "profile"]
        .iter()
        .find_map(|k| params.get(*k).and_then(Value::as_str).map(str::to_string));
    ExperimentConfig {
        subcommand: name.to_string(),
        input,
        params: params.into_iter().collect(),
        output_dir: None,
    }
}

fn digest_inputs(files: &[PathBuf]) -> Result<(String, Vec<InputDigest>), CliError> {
    let mut all = Sha256::new();
    let mut list = Vec::new();
    for path in files {
        let bytes = std::fs::read(path).map_err(|e| CliError::NoInput(format!("{}: {e}", path.display())))?;
        let h = sha256_hex(&bytes);
        all.update(h.as_bytes());
        list.push(InputDigest {
            path: path.display().to_string(),
            sha256: h,
        });
    }
    Ok((hex::encode(all.finalize()), list))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serialises");
    s.push('\n');
    s
}

fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", dir.join(name).display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.persist(dir.join(name)).map_err(|e| io(e.error))?;
    Ok(())
}

fn write_outputs(dir: &Path, record: &RunRecord) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    write_atomic(dir, "report.json", &pretty(&record.report))?;
    for (name, contents) in &record.artifacts {
        write_atomic(dir, name, contents)?;
    }
    let mut run = serde_json::to_value(record).expect("record serialises");
    if let Value::Object(m) = &mut run {
        m.remove("artifacts");
        m.insert(
            "artifact_files".into(),
            json!(record.artifacts.iter().map(|(n, _)| n).collect::<Vec<_>>()),
        );
    }
    write_atomic(dir, "run.json", &pretty(&run))
}

fn cache_key(config: &ExperimentConfig, input_digest: &str) -> String {
    let cfg = serde_json::to_string(config).expect("config serialises");
    sha256_hex(format!("{TOOL_VERSION}\n{cfg}\n{input_digest}").as_bytes())
}

fn cache_lookup(dir: &Path, key: &str, config: &ExperimentConfig, input_digest: &str) -> Option<RunRecord> {
    let path = dir.join(format!("{key}.json"));
    let text = std::fs::read_to_string(&path).ok()?;
    match serde_json::from_str::<RunRecord>(&text) {
        Ok(rec) if rec.config == *config && rec.input_digest == input_digest && rec.tool_version == TOOL_VERSION => {
            Some(rec)
        }
        Ok(_) => None,
        Err(e) => {
            eprintln!("pasf: warning: skipping corrupted cache record {}: {e}", path.display());
            None
        }
    }
}

pub fn execute(cli: &Cli) -> Result<u8, CliError> {
    let started = now_ms();
    let config = resolved_config(cli);
    let files = input_files(&cli.command);
    for f in &files {
        // Surface a missing file as "no input" before anything else runs.
        read_input(f)?;
    }
    let (input_digest, inputs) = digest_inputs(&files)?;
    let threads = rayon::current_num_threads();
    let out_dir = cli.global.output_dir.as_deref();
    let cache_dir = out_dir.filter(|_| !cli.global.no_cache).map(|d| d.join("cache"));
    let key = cache_key(&config, &input_digest);

    if let Some(cdir) = &cache_dir {
        if let Some(mut rec) = cache_lookup(cdir, &key, &config, &input_digest) {
            rec.cached = true;
            rec.started_unix_ms = started;
            rec.finished_unix_ms = now_ms();
            rec.threads = threads;
            if let Some(dir) = out_dir {
                write_outputs(dir, &rec)?;
            }
            print!("{}", pretty(&rec.report));
            return Ok(rec.exit_code);
        }
    }

    let outcome = dispatch(&cli.command, &cli.global)?;
    let exit_code = outcome.verdict.exit_code();
    let mut report = json!({
        "tool": "pasf",
        "version": TOOL_VERSION,
        "config": config,
        "outcome": outcome.verdict.as_str(),
        "exit_code": exit_code,
        "warnings": outcome.warnings,
        "result": outcome.result,
    });
    if let Some(problem) = &outcome.problem {
        report["problem"] = json!(problem);
    }
    for w in &outcome.warnings {
        eprintln!("pasf: warning: {w}");
    }
    let record = RunRecord {
        config,
        report,
        exit_code,
        tool_version: TOOL_VERSION.into(),
        input_digest,
        inputs,
        started_unix_ms: started,
        finished_unix_ms: now_ms(),
        threads,
        cached: false,
        warnings: outcome.warnings,
        artifacts: outcome.artifacts,
    };
    if let Some(dir) = out_dir {
        write_outputs(dir, &record)?;
    }
    if let Some(cdir) = &cache_dir {
        std::fs::create_dir_all(cdir).map_err(|e| CliError::Io(format!("{}: {e}", cdir.display())))?;
        let text = serde_json::to_string(&record).expect("record serialises");
        write_atomic(cdir, &format!("{key}.json"), &text)?;
    }
    print!("{}", pretty(&record.report));
    Ok(exit_code)
}
