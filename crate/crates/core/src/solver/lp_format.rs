//! LP text format writer and reader.
//!
//! The writer is deterministic: variables appear in declaration order,
//! rows in insertion order and numbers with 12 significant digits. The
//! objective constant has no standard syntax and is written as a comment,
//! which the reader understands.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{LinExpr, Sense, UcModel, VarId, VarKind};

use super::verify::check_finite;

const CONSTANT_TAG: &str = "\\ objective constant:";
/// Terms per line before wrapping.
const TERMS_PER_LINE: usize = 8;

/// Formats `v` rounded to 12 significant digits, in plain decimal notation.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{v:.11e}").parse().unwrap_or(v);
    format!("{rounded}")
}

fn write_terms(out: &mut String, terms: &[(String, f64)]) {
    for (k, (name, c)) in terms.iter().enumerate() {
        if k > 0 && k % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let mag = format_number(c.abs());
        match (k, *c < 0.0) {
            (0, false) => write!(out, " {mag} {name}"),
            (0, true) => write!(out, " -{mag} {name}"),
            (_, false) => write!(out, " + {mag} {name}"),
            (_, true) => write!(out, " - {mag} {name}"),
        }
        .expect("writing to a String cannot fail");
    }
}

/// Serialises `model`, with fixings written as fixed bounds.
pub fn emit_model_file(model: &UcModel) -> Result<String> {
    check_finite(model)?;
    if model.n_vars() == 0 {
        return Err(Error::invalid("cannot write a model without variables"));
    }
    let name = |v: &VarId| model.variable(*v).label.clone();
    let mut out = String::new();
    out.push_str("\\ unit commitment model\n");
    if model.objective_offset() != 0.0 {
        writeln!(out, "{CONSTANT_TAG} {}", format_number(model.objective_offset())).ok();
    }
    out.push_str("Minimize\n obj:");
    let mut obj: Vec<(String, f64)> = model.objective().iter().map(|(v, c)| (name(v), *c)).collect();
    if obj.is_empty() {
        obj.push((model.variables()[0].label.clone(), 0.0));
    }
    write_terms(&mut out, &obj);
    out.push_str("\nSubject To\n");
    for row in model.constraints() {
        write!(out, " {}:", row.label).ok();
        let mut terms: Vec<(String, f64)> = row.coeffs.iter().map(|(v, c)| (name(v), *c)).collect();
        if terms.is_empty() {
            terms.push((model.variables()[0].label.clone(), 0.0));
        }
        write_terms(&mut out, &terms);
        writeln!(out, " {} {}", row.sense.symbol(), format_number_signed(row.rhs)).ok();
    }
    out.push_str("Bounds\n");
    for (i, v) in model.variables().iter().enumerate() {
        let (lo, hi) = model.bounds(VarId(i));
        let line = if lo == hi {
            format!(" {} = {}", v.label, format_number_signed(lo))
        } else {
            let lo_s = if lo == f64::NEG_INFINITY {
                "-inf".to_string()
            } else {
                format_number_signed(lo)
            };
            if hi == f64::INFINITY {
                if lo == f64::NEG_INFINITY {
                    format!(" {} free", v.label)
                } else {
                    format!(" {} >= {lo_s}", v.label)
                }
            } else {
                format!(" {lo_s} <= {} <= {}", v.label, format_number_signed(hi))
            }
        };
        out.push_str(&line);
        out.push('\n');
    }
    out.push_str("Binaries\n");
    for v in model.variables().iter().filter(|v| v.kind == VarKind::Binary) {
        writeln!(out, " {}", v.label).ok();
    }
    out.push_str("End\n");
    Ok(out)
}

fn format_number_signed(v: f64) -> String {
    if v < 0.0 {
        format!("-{}", format_number(-v))
    } else {
        format_number(v)
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Preamble,
    Objective,
    Constraints,
    Bounds,
    Binaries,
    Generals,
    End,
}

fn section_of(line: &str) -> Option<Section> {
    match line.to_ascii_lowercase().as_str() {
        "minimize" | "minimise" | "min" => Some(Section::Objective),
        "subject to" | "such that" | "st" | "s.t." => Some(Section::Constraints),
        "bounds" | "bound" => Some(Section::Bounds),
        "binaries" | "binary" | "bin" => Some(Section::Binaries),
        "generals" | "general" | "gen" => Some(Section::Generals),
        "end" => Some(Section::End),
        _ => None,
    }
}

fn parse_value(tok: &str, line: usize) -> Result<f64> {
    match tok.to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" | "+infinity" => Ok(f64::INFINITY),
        "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
        _ => tok.parse().map_err(|_| Error::Data {
            path: "<lp>".into(),
            line,
            message: format!("expected a number, found `{tok}`"),
        }),
    }
}

/// Linear terms of `text` as `(name, coefficient)`.
fn parse_terms(text: &str, line: usize) -> Result<Vec<(String, f64)>> {
    let spaced = text.replace('+', " + ").replace('-', " - ");
    let mut terms = Vec::new();
    let mut sign = 1.0;
    let mut coeff: Option<f64> = None;
    for tok in spaced.split_whitespace() {
        match tok {
            "+" => {}
            "-" => sign = -sign,
            _ => {
                if let Ok(c) = tok.parse::<f64>() {
                    coeff = Some(coeff.unwrap_or(1.0) * c);
                } else {
                    terms.push((tok.to_string(), sign * coeff.unwrap_or(1.0)));
                    sign = 1.0;
                    coeff = None;
                }
            }
        }
    }
    if coeff.is_some() {
        return Err(Error::Data {
            path: "<lp>".into(),
            line,
            message: "constant term outside the objective constant comment".into(),
        });
    }
    Ok(terms)
}

/// Reads a document produced by [`emit_model_file`] (and the common subset
/// of the format it uses). Fixed bounds become plain bounds.
pub fn parse_model_file(text: &str) -> Result<UcModel> {
    let mut section = Section::Preamble;
    let mut offset = 0.0;
    let mut objective: Vec<(String, f64)> = Vec::new();
    let mut rows: Vec<(String, Vec<(String, f64)>, Sense, f64)> = Vec::new();
    let mut bounds: Vec<(String, f64, f64)> = Vec::new();
    let mut binaries: Vec<String> = Vec::new();
    let mut pending = String::new();
    let mut pending_line = 0;

    let lines: Vec<&str> = text.lines().collect();
    for (idx, raw) in lines.iter().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if let Some(rest) = line.strip_prefix(CONSTANT_TAG) {
            offset = parse_value(rest.trim(), lineno)?;
            continue;
        }
        if line.is_empty() || line.starts_with('\\') {
            continue;
        }
        if let Some(s) = section_of(line) {
            section = s;
            continue;
        }
        let data_err = |message: String| Error::Data {
            path: "<lp>".into(),
            line: lineno,
            message,
        };
        match section {
            Section::Preamble | Section::End => return Err(data_err(format!("unexpected `{line}`"))),
            Section::Objective => {
                let body = match line.split_once(':') {
                    Some((_, b)) => b,
                    None => line,
                };
                objective.extend(parse_terms(body, lineno)?);
            }
            Section::Constraints => {
                if pending.is_empty() {
                    pending_line = lineno;
                }
                pending.push(' ');
                pending.push_str(line);
                let Some(pos) = pending.find(['<', '>', '=']) else {
                    continue;
                };
                let (lhs, rest) = pending.split_at(pos);
                let (sense, rhs) = if let Some(r) = rest.strip_prefix("<=").or(rest.strip_prefix("=<")) {
                    (Sense::Le, r)
                } else if let Some(r) = rest.strip_prefix(">=").or(rest.strip_prefix("=>")) {
                    (Sense::Ge, r)
                } else if let Some(r) = rest.strip_prefix('<') {
                    (Sense::Le, r)
                } else if let Some(r) = rest.strip_prefix('>') {
                    (Sense::Ge, r)
                } else {
                    (Sense::Eq, &rest[1..])
                };
                let (label, body) = lhs
                    .split_once(':')
                    .ok_or_else(|| data_err("constraint without a label".into()))?;
                let rhs = parse_value(rhs.trim(), lineno)?;
                let terms = parse_terms(body, pending_line)?;
                rows.push((label.trim().to_string(), terms, sense, rhs));
                pending.clear();
            }
            Section::Bounds => {
                let toks: Vec<&str> = line.split_whitespace().collect();
                let b = match toks.as_slice() {
                    [name, "free"] => (name.to_string(), f64::NEG_INFINITY, f64::INFINITY),
                    [name, "=", v] => {
                        let v = parse_value(v, lineno)?;
                        (name.to_string(), v, v)
                    }
                    [name, ">=", v] => (name.to_string(), parse_value(v, lineno)?, f64::INFINITY),
                    [name, "<=", v] => (name.to_string(), 0.0, parse_value(v, lineno)?),
                    [lo, "<=", name, "<=", hi] => {
                        (name.to_string(), parse_value(lo, lineno)?, parse_value(hi, lineno)?)
                    }
                    _ => return Err(data_err(format!("unsupported bound `{line}`"))),
                };
                bounds.push(b);
            }
            Section::Binaries => binaries.extend(line.split_whitespace().map(str::to_string)),
            Section::Generals => return Err(data_err("general integers are not supported".into())),
        }
    }
    if !pending.is_empty() {
        return Err(Error::Data {
            path: "<lp>".into(),
            line: pending_line,
            message: "unterminated constraint".into(),
        });
    }

    // Variables in the order of the bounds section, then any others.
    let mut order: Vec<String> = bounds.iter().map(|b| b.0.clone()).collect();
    let mentioned = objective
        .iter()
        .map(|t| &t.0)
        .chain(rows.iter().flat_map(|r| r.1.iter().map(|t| &t.0)))
        .chain(binaries.iter());
    for name in mentioned {
        if !order.contains(name) {
            order.push(name.clone());
        }
    }
    let mut m = UcModel::new();
    for name in &order {
        let is_bin = binaries.contains(name);
        let (lo, hi) = bounds
            .iter()
            .find(|b| &b.0 == name)
            .map(|b| (b.1, b.2))
            .unwrap_or(if is_bin { (0.0, 1.0) } else { (0.0, f64::INFINITY) });
        let kind = if is_bin { VarKind::Binary } else { VarKind::Continuous };
        m.add_var(name.clone(), kind, lo, hi)?;
    }
    let id = |m: &UcModel, n: &str| m.var_by_label(n).ok_or_else(|| Error::UnknownVariable(n.into()));
    let mut obj = LinExpr::new();
    for (n, c) in &objective {
        obj.add(id(&m, n)?, *c);
    }
    obj.add_constant(offset);
    m.set_objective(obj);
    for (label, terms, sense, rhs) in rows {
        let mut e = LinExpr::new();
        for (n, c) in &terms {
            e.add(id(&m, n)?, *c);
        }
        m.add_expr_constraint(label, e, sense, rhs)?;
    }
    Ok(m)
}
