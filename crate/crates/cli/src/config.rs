//! `--config FILE` turns an experiment config into ordinary flags so that
//! clap validates it like a command line.

use std::path::{Path, PathBuf};

use pasf_core::io::{parse_experiment_config, ExperimentConfig};
use serde_json::Value;

use crate::error::{usage, CliError};

const BUILTINS: [&str; 3] = ["standard", "duplicated", "random"];

/// Replaces `--config FILE` by the flags it describes. Flags given on the
/// command line come after and so take precedence for repeated options.
pub fn expand(argv: Vec<String>) -> Result<Vec<String>, CliError> {
    let Some(pos) = argv.iter().position(|a| a == "--config" || a.starts_with("--config=")) else {
        return Ok(argv);
    };
    let (path, consumed) = match argv[pos].strip_prefix("--config=") {
        Some(p) => (PathBuf::from(p), 1),
        None => match argv.get(pos + 1) {
            Some(p) => (PathBuf::from(p), 2),
            None => return usage("--config needs a file"),
        },
    };
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::NoInput(format!("{}: {e}", path.display())))?;
    let cfg = parse_experiment_config(&text)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();

    let mut rest: Vec<String> = argv[1..].to_vec();
    rest.drain(pos - 1..pos - 1 + consumed);
    let mut out = vec![argv[0].clone(), cfg.subcommand.clone()];
    out.extend(config_flags(&cfg, &base)?);
    if let Some(dir) = &cfg.output_dir {
        if !rest.iter().any(|a| a == "--output-dir") {
            out.push("--output-dir".into());
            out.push(resolve(&base, dir));
        }
    }
    // A subcommand repeated on the command line is dropped.
    if rest.first() == Some(&cfg.subcommand) {
        rest.remove(0);
    }
    out.extend(rest);
    Ok(out)
}

fn resolve(base: &Path, p: &str) -> String {
    let path = Path::new(p);
    if path.is_absolute() || base.as_os_str().is_empty() {
        p.to_string()
    } else {
        base.join(path).to_string_lossy().into_owned()
    }
}

fn config_flags(cfg: &ExperimentConfig, base: &Path) -> Result<Vec<String>, CliError> {
    let mut out = Vec::new();
    if let Some(input) = &cfg.input {
        let flag = match cfg.subcommand.as_str() {
            "continuous" if input == "circle" => {
                out.extend(["--family".into(), "circle".into()]);
                None
            }
            "continuous" => {
                out.extend(["--family".into(), "tabulated".into()]);
                Some("--table")
            }
            "inequality" => Some("--profile"),
            _ if BUILTINS.contains(&input.as_str()) => {
                out.extend(["--builtin".into(), input.clone()]);
                None
            }
            _ => Some("--frame"),
        };
        if let Some(flag) = flag {
            out.push(flag.into());
            out.push(resolve(base, input));
        }
    }
    for (key, value) in &cfg.params {
        let flag = format!("--{}", key.replace('_', "-"));
        match value {
            Value::Bool(true) => out.push(flag),
            Value::Bool(false) | Value::Null => {}
            Value::Number(n) => {
                out.push(flag);
                out.push(n.to_string());
            }
            Value::String(s) => {
                out.push(flag);
                out.push(s.clone());
            }
            Value::Array(items) => {
                let parts = items
                    .iter()
                    .map(|v| match v {
                        Value::Number(n) => Ok(n.to_string()),
                        Value::String(s) => Ok(s.clone()),
                        _ => usage(format!("config param {key:?} must hold numbers or strings")),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                out.push(format!("{flag}={}", parts.join(",")));
            }
            Value::Object(_) => return usage(format!("config param {key:?} cannot be an object")),
        }
    }
    Ok(out)
}
