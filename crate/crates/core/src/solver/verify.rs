//! Independent feasibility checks on candidate solutions.

use crate::error::{Error, Result};
use crate::model::{Sense, UcModel, VarKind};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    /// Largest bound, row or integrality violation.
    pub max_violation: f64,
    /// Label of the variable or row attaining it.
    pub worst: String,
}

/// Evaluates every bound (with fixings), integrality requirement and row.
pub fn check_solution(model: &UcModel, x: &[f64]) -> CheckReport {
    let mut report = CheckReport {
        max_violation: 0.0,
        worst: String::new(),
    };
    let mut note = |v: f64, label: &str| {
        if v > report.max_violation || v.is_nan() {
            report.max_violation = if v.is_nan() { f64::INFINITY } else { v };
            report.worst = label.to_string();
        }
    };
    if x.len() != model.n_vars() {
        note(f64::INFINITY, "dimension");
        return report;
    }
    for (i, var) in model.variables().iter().enumerate() {
        let (lo, hi) = model.bounds(crate::model::VarId(i));
        let v = x[i];
        note((lo - v).max(v - hi).max(0.0), &var.label);
        if var.kind == VarKind::Binary {
            note((v - v.round()).abs(), &var.label);
        }
    }
    for row in model.constraints() {
        let a: f64 = row.coeffs.iter().map(|(v, c)| c * x[v.0]).sum();
        let viol = match row.sense {
            Sense::Le => a - row.rhs,
            Sense::Ge => row.rhs - a,
            Sense::Eq => (a - row.rhs).abs(),
        };
        note(viol.max(0.0), &row.label);
    }
    report
}

/// Rejects NaN or infinite coefficients and right-hand sides.
pub fn check_finite(model: &UcModel) -> Result<()> {
    let bad = |what: String| Err(Error::NonFinite(what));
    if !model.objective_offset().is_finite() {
        return bad("objective constant".into());
    }
    for (v, c) in model.objective() {
        if !c.is_finite() {
            return bad(format!("objective coefficient of `{}`", model.variable(*v).label));
        }
    }
    for row in model.constraints() {
        if !row.rhs.is_finite() {
            return bad(format!("right-hand side of `{}`", row.label));
        }
        if let Some((v, _)) = row.coeffs.iter().find(|(_, c)| !c.is_finite()) {
            return bad(format!("coefficient of `{}` in `{}`", model.variable(*v).label, row.label));
        }
    }
    for var in model.variables() {
        if var.lower.is_nan() || var.upper.is_nan() || var.lower == f64::INFINITY || var.upper == f64::NEG_INFINITY {
            return bad(format!("bounds of `{}`", var.label));
        }
    }
    Ok(())
}
