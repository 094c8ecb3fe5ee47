//! In-process HiGHS backend.

use std::num::NonZeroU32;

use highs::{HighsModelStatus, HighsSolutionStatus, RowProblem};

use super::{BackendConfig, RawOutcome, SolveStatus};
use crate::error::Result;
use crate::model::{Sense, UcModel, VarId, VarKind};

fn build(model: &UcModel, integer: bool, fixed_binaries: Option<&[f64]>) -> RowProblem {
    let mut pb = RowProblem::default();
    let cols: Vec<_> = model
        .variables()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let id = VarId(i);
            let cost = model.objective().get(&id).copied().unwrap_or(0.0);
            let (mut lo, mut hi) = model.bounds(id);
            if let (VarKind::Binary, Some(x)) = (v.kind, fixed_binaries) {
                lo = x[i];
                hi = x[i];
            }
            if integer && v.kind == VarKind::Binary {
                pb.add_integer_column(cost, lo..=hi)
            } else {
                pb.add_column(cost, lo..=hi)
            }
        })
        .collect();
    // Carries the constant so that HiGHS gaps refer to the full objective.
    if model.objective_offset() != 0.0 {
        pb.add_column(model.objective_offset(), 1.0..=1.0);
    }
    for row in model.constraints() {
        let factors: Vec<_> = row.coeffs.iter().map(|(v, c)| (cols[v.0], *c)).collect();
        match row.sense {
            Sense::Le => pb.add_row(..=row.rhs, factors),
            Sense::Ge => pb.add_row(row.rhs.., factors),
            Sense::Eq => pb.add_row(row.rhs..=row.rhs, factors),
        }
    }
    pb
}

fn run(model: &UcModel, cfg: &BackendConfig, integer: bool, fixed: Option<&[f64]>) -> RawOutcome {
    let n = model.n_vars();
    if n == 0 {
        return RawOutcome {
            status: SolveStatus::Optimal,
            x: Some(Vec::new()),
            gap: 0.0,
            message: String::new(),
        };
    }
    let mut m = build(model, integer, fixed).optimise(highs::Sense::Minimise);
    m.make_quiet();
    m.set_option("mip_rel_gap", cfg.gap);
    if let Some(t) = cfg.time_limit {
        m.set_option("time_limit", t);
    }
    if let Some(t) = cfg.threads.and_then(NonZeroU32::new) {
        m.set_threads(t);
    }
    let solved = match m.try_solve() {
        Ok(s) => s,
        Err(e) => {
            return RawOutcome {
                status: SolveStatus::Error,
                x: None,
                gap: f64::INFINITY,
                message: format!("HiGHS run failed: {e:?}"),
            }
        }
    };
    let status = solved.status();
    let has_point = solved.primal_solution_status() == HighsSolutionStatus::Feasible;
    let point = || {
        let mut x = solved.get_solution().columns().to_vec();
        x.truncate(n);
        Some(x)
    };
    let has_binaries = integer && model.variables().iter().any(|v| v.kind == VarKind::Binary);
    let gap = if has_binaries { solved.mip_gap() } else { 0.0 };
    match status {
        HighsModelStatus::Optimal => RawOutcome {
            status: SolveStatus::Optimal,
            x: point(),
            gap: if gap.is_finite() { gap } else { 0.0 },
            message: String::new(),
        },
        HighsModelStatus::Infeasible => RawOutcome {
            status: SolveStatus::Infeasible,
            x: None,
            gap: f64::INFINITY,
            message: "HiGHS proved the model infeasible".into(),
        },
        HighsModelStatus::ReachedTimeLimit
        | HighsModelStatus::ReachedIterationLimit
        | HighsModelStatus::ReachedSolutionLimit
        | HighsModelStatus::ReachedInterrupt
        | HighsModelStatus::ReachedMemoryLimit
            if has_point =>
        {
            RawOutcome {
                status: SolveStatus::Feasible,
                x: point(),
                gap,
                message: format!("HiGHS stopped early: {status:?}"),
            }
        }
        other => RawOutcome {
            status: SolveStatus::Error,
            x: None,
            gap: f64::INFINITY,
            message: format!("HiGHS returned {other:?}"),
        },
    }
}

pub(crate) fn solve_mip(model: &UcModel, cfg: &BackendConfig) -> Result<RawOutcome> {
    Ok(run(model, cfg, true, None))
}

/// Re-solves the continuous part with every binary fixed to its value in `x`.
pub(crate) fn solve_fixed_binaries(model: &UcModel, x: &[f64]) -> Result<Option<Vec<f64>>> {
    let out = run(model, &BackendConfig::default(), false, Some(x));
    Ok(match out.status {
        SolveStatus::Optimal => out.x,
        _ => None,
    })
}
