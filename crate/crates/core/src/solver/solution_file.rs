//! Solution files written by external MIP solvers.
//!
//! Recognised layouts:
//! - HiGHS raw solution files (`Model status` header, `# Columns` block);
//! - CBC solution files (status line, then `index name value [reduced]`);
//! - XML solutions with `<variable name=".." value=".."/>` elements;
//! - plain two-column `name value` lines, optionally preceded by
//!   `status <word>` and `objective <value>` lines. `#` starts a comment.

use std::collections::BTreeMap;

use quick_xml::events::Event;
use quick_xml::Reader;

use super::SolveStatus;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParsedSolution {
    /// `None` when the file does not state a status.
    pub status: Option<SolveStatus>,
    pub objective: Option<f64>,
    pub values: BTreeMap<String, f64>,
}

pub fn status_from_text(s: &str) -> SolveStatus {
    let s = s.to_ascii_lowercase();
    if s.contains("infeasible") {
        SolveStatus::Infeasible
    } else if s.contains("optimal") {
        SolveStatus::Optimal
    } else if s.contains("feasible") || s.contains("stopped") || s.contains("time limit") {
        SolveStatus::Feasible
    } else {
        SolveStatus::Error
    }
}

fn bad(line: usize, message: impl Into<String>) -> Error {
    Error::Data {
        path: "<solution>".into(),
        line,
        message: message.into(),
    }
}

fn number(tok: &str, line: usize) -> Result<f64> {
    tok.parse()
        .map_err(|_| bad(line, format!("expected a number, found `{tok}`")))
}

pub fn parse_solution(text: &str) -> Result<ParsedSolution> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('<') {
        parse_xml(text)
    } else if trimmed.starts_with("Model status") {
        parse_highs(text)
    } else if is_cbc_header(trimmed.lines().next().unwrap_or("")) {
        parse_cbc(text)
    } else {
        parse_plain(text)
    }
}

fn is_cbc_header(first: &str) -> bool {
    let l = first.to_ascii_lowercase();
    l.contains("objective value") || l.starts_with("infeasible") || l.starts_with("integer infeasible")
}

fn parse_highs(text: &str) -> Result<ParsedSolution> {
    let mut out = ParsedSolution::default();
    let mut lines = text.lines().enumerate().peekable();
    let mut in_columns = false;
    while let Some((i, line)) = lines.next() {
        let line = line.trim();
        if line == "Model status" {
            if let Some((_, s)) = lines.next() {
                out.status = Some(status_from_text(s));
            }
            continue;
        }
        if let Some(rest) = line.strip_prefix("# ") {
            in_columns = rest.starts_with("Columns");
            if rest.starts_with("Dual") {
                break;
            }
            continue;
        }
        if let Some(v) = line.strip_prefix("Objective ") {
            out.objective = Some(number(v.trim(), i + 1)?);
            continue;
        }
        if in_columns {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if let [name, value] = toks.as_slice() {
                out.values.insert(name.to_string(), number(value, i + 1)?);
            }
        }
    }
    Ok(out)
}

fn parse_cbc(text: &str) -> Result<ParsedSolution> {
    let mut out = ParsedSolution::default();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            out.status = Some(status_from_text(line));
            if let Some((_, v)) = line.rsplit_once("objective value") {
                out.objective = v.trim().parse().ok();
            }
            continue;
        }
        let toks: Vec<&str> = line
            .split_whitespace()
            .filter(|t| *t != "**")
            .collect();
        match toks.as_slice() {
            [] => {}
            [_, name, value] | [_, name, value, _] => {
                out.values.insert(name.to_string(), number(value, i + 1)?);
            }
            _ => return Err(bad(i + 1, format!("unrecognised line `{}`", line.trim()))),
        }
    }
    Ok(out)
}

fn parse_plain(text: &str) -> Result<ParsedSolution> {
    let mut out = ParsedSolution::default();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            [key, rest @ ..] if key.eq_ignore_ascii_case("status") => {
                out.status = Some(status_from_text(&rest.join(" ")));
            }
            [key, value] if key.eq_ignore_ascii_case("objective") => {
                out.objective = Some(number(value, i + 1)?);
            }
            [name, value] => {
                out.values.insert(name.to_string(), number(value, i + 1)?);
            }
            _ => return Err(bad(i + 1, format!("expected `name value`, found `{line}`"))),
        }
    }
    Ok(out)
}

fn parse_xml(text: &str) -> Result<ParsedSolution> {
    let mut out = ParsedSolution::default();
    let mut reader = Reader::from_str(text);
    loop {
        let ev = reader
            .read_event()
            .map_err(|e| bad(0, format!("malformed XML: {e}")))?;
        match ev {
            Event::Eof => break,
            Event::Start(e) | Event::Empty(e) => {
                let tag = String::from_utf8_lossy(e.local_name().as_ref()).to_ascii_lowercase();
                let mut attrs = BTreeMap::new();
                for a in e.attributes() {
                    let a = a.map_err(|err| bad(0, format!("malformed XML attribute: {err}")))?;
                    let key = String::from_utf8_lossy(a.key.local_name().as_ref()).to_string();
                    let value = a
                        .unescape_value()
                        .map_err(|err| bad(0, format!("malformed XML attribute: {err}")))?
                        .to_string();
                    attrs.insert(key, value);
                }
                match tag.as_str() {
                    "variable" => {
                        if let (Some(name), Some(value)) = (attrs.get("name"), attrs.get("value")) {
                            out.values.insert(name.clone(), number(value, 0)?);
                        }
                    }
                    "header" | "solution" | "status" => {
                        let status = ["solutionStatusString", "status", "value"]
                            .iter()
                            .find_map(|k| attrs.get(*k));
                        if let Some(s) = status {
                            out.status = Some(status_from_text(s));
                        }
                        if let Some(v) = attrs.get("objectiveValue").or(attrs.get("objective")) {
                            out.objective = Some(number(v, 0)?);
                        }
                    }
                    _ => {}
                }
            }
            _ => {}
        }
    }
    Ok(out)
}
