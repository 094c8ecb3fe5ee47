//! Process-based backend: write an LP file, run a solver executable, read
//! its solution file.
//!
//! Argument templates may use the placeholders `{model}`, `{solution}`,
//! `{options}`, `{gap}`, `{time_limit}` and `{threads}`. Without a template
//! the arguments are chosen from the executable name: `highs*` and `cbc*`
//! get their native command lines, anything else receives
//! `{model} {solution}`.

use std::path::Path;
use std::process::Command;

use super::lp_format::emit_model_file;
use super::solution_file::parse_solution;
use super::{BackendConfig, RawOutcome, SolveStatus};
use crate::error::{Error, Result};
use crate::model::UcModel;

fn default_args(executable: &Path, cfg: &BackendConfig) -> Vec<String> {
    let name = executable
        .file_name()
        .map(|n| n.to_string_lossy().to_ascii_lowercase())
        .unwrap_or_default();
    let s = |v: &str| v.to_string();
    if name.starts_with("highs") {
        vec![
            s("--model_file"),
            s("{model}"),
            s("--solution_file"),
            s("{solution}"),
            s("--options_file"),
            s("{options}"),
        ]
    } else if name.starts_with("cbc") {
        let mut a = vec![s("{model}"), s("ratio"), s("{gap}")];
        if cfg.time_limit.is_some() {
            a.extend([s("sec"), s("{time_limit}")]);
        }
        if cfg.threads.is_some() {
            a.extend([s("threads"), s("{threads}")]);
        }
        a.extend([s("solve"), s("solu"), s("{solution}")]);
        a
    } else {
        vec![s("{model}"), s("{solution}")]
    }
}

fn highs_options(cfg: &BackendConfig) -> String {
    let mut o = format!("mip_rel_gap = {}\n", cfg.gap);
    if let Some(t) = cfg.time_limit {
        o.push_str(&format!("time_limit = {t}\n"));
    }
    if let Some(t) = cfg.threads {
        o.push_str(&format!("threads = {t}\n"));
    }
    o
}

fn tail(bytes: &[u8]) -> String {
    let s = String::from_utf8_lossy(bytes);
    let lines: Vec<&str> = s.lines().collect();
    lines[lines.len().saturating_sub(20)..].join("\n")
}

pub(crate) fn run(
    model: &UcModel,
    cfg: &BackendConfig,
    executable: &Path,
    template: Option<&[String]>,
) -> Result<RawOutcome> {
    let dir = tempfile::tempdir().map_err(|e| Error::io("temporary directory", e))?;
    let model_path = dir.path().join("model.lp");
    let solution_path = dir.path().join("model.sol");
    let options_path = dir.path().join("options.txt");
    std::fs::write(&model_path, emit_model_file(model)?).map_err(|e| Error::io(&model_path, e))?;
    std::fs::write(&options_path, highs_options(cfg)).map_err(|e| Error::io(&options_path, e))?;

    let args = template.map(<[String]>::to_vec).unwrap_or_else(|| default_args(executable, cfg));
    let fill = |a: &String| {
        a.replace("{model}", &model_path.to_string_lossy())
            .replace("{solution}", &solution_path.to_string_lossy())
            .replace("{options}", &options_path.to_string_lossy())
            .replace("{gap}", &cfg.gap.to_string())
            .replace("{time_limit}", &cfg.time_limit.unwrap_or(1e8).to_string())
            .replace("{threads}", &cfg.threads.unwrap_or(1).to_string())
    };
    let args: Vec<String> = args.iter().map(fill).collect();
    log::debug!("running {} {}", executable.display(), args.join(" "));
    let failed = |message: String| {
        Ok(RawOutcome {
            status: SolveStatus::Error,
            x: None,
            gap: f64::INFINITY,
            message,
        })
    };
    let output = match Command::new(executable).args(&args).current_dir(dir.path()).output() {
        Ok(o) => o,
        Err(e) => return failed(format!("cannot run `{}`: {e}", executable.display())),
    };
    if !output.status.success() {
        return failed(format!(
            "`{}` exited with {}\nstdout:\n{}\nstderr:\n{}",
            executable.display(),
            output.status,
            tail(&output.stdout),
            tail(&output.stderr)
        ));
    }
    let text = match std::fs::read_to_string(&solution_path) {
        Ok(t) => t,
        Err(e) => {
            return failed(format!(
                "`{}` wrote no solution file ({e})\nstdout:\n{}",
                executable.display(),
                tail(&output.stdout)
            ))
        }
    };
    let parsed = match parse_solution(&text) {
        Ok(p) => p,
        Err(e) => return failed(format!("unreadable solution file: {e}")),
    };
    // A file without a status line is taken as the solver's optimum.
    let status = parsed.status.unwrap_or(SolveStatus::Optimal);
    if !matches!(status, SolveStatus::Optimal | SolveStatus::Feasible) {
        return Ok(RawOutcome {
            status,
            x: None,
            gap: f64::INFINITY,
            message: format!("`{}` reported {status:?}", executable.display()),
        });
    }
    for name in parsed.values.keys() {
        if model.var_by_label(name).is_none() {
            log::warn!("solution file mentions unknown variable `{name}`; ignored");
        }
    }
    // Solvers such as CBC omit zero values.
    let x = model
        .variables()
        .iter()
        .map(|v| parsed.values.get(&v.label).copied().unwrap_or(0.0))
        .collect();
    Ok(RawOutcome {
        status,
        x: Some(x),
        gap: if status == SolveStatus::Optimal { cfg.gap } else { f64::INFINITY },
        message: String::new(),
    })
}
