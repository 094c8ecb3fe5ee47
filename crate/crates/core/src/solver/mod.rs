//! Solving [`UcModel`]s.
//!
//! Three backends share one post-processing path: binaries are snapped,
//! every returned point is re-checked against the model by an independent
//! residual checker and the objective is recomputed from the model.
//!
//! - [`Backend::Highs`] runs HiGHS in-process.
//! - [`Backend::External`] writes an LP file, runs an executable and reads
//!   its solution file.
//! - [`Backend::BruteForce`] enumerates binaries and solves every LP with a
//!   dense simplex; it is meant as a verification oracle.
//!
//! The `TAUC_SOLVER` environment variable overrides the configured backend:
//! `builtin:highs` and `builtin:brute-force` select the built-in backends,
//! anything else is taken as the path of an external executable.

pub mod brute_force;
pub mod external;
mod highs_backend;
pub mod lp_format;
pub mod simplex;
pub mod solution_file;
pub mod verify;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{UcModel, VarKind};

pub use brute_force::{brute_force_solve, MAX_BRUTE_FORCE_BINARIES};
pub use lp_format::{emit_model_file, parse_model_file};

/// Binaries further than this from 0 or 1 make a solution unusable.
pub const INTEGRALITY_TOL: f64 = 1e-6;
/// Largest bound or row violation accepted in a returned solution.
pub const FEASIBILITY_TOL: f64 = 1e-6;
/// Slack allowed between a reported gap and the configured one.
const GAP_SLACK: f64 = 1e-9;

pub const SOLVER_ENV: &str = "TAUC_SOLVER";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    Feasible,
    Infeasible,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MipSolution {
    pub status: SolveStatus,
    /// Objective including the model's constant term, €. NaN without a point.
    pub objective: f64,
    /// Values by variable label.
    pub values: BTreeMap<String, f64>,
    /// Values indexed like the model's variables; empty without a point.
    pub x: Vec<f64>,
    pub gap: f64,
    pub wall_time: f64,
    /// Diagnostics from the backend or the checks.
    pub message: String,
}

impl MipSolution {
    pub fn has_point(&self) -> bool {
        !self.x.is_empty() || matches!(self.status, SolveStatus::Optimal | SolveStatus::Feasible)
    }

    fn without_point(status: SolveStatus, message: impl Into<String>) -> Self {
        MipSolution {
            status,
            objective: f64::NAN,
            values: BTreeMap::new(),
            x: Vec::new(),
            gap: f64::INFINITY,
            wall_time: 0.0,
            message: message.into(),
        }
    }

    /// Errors unless the status is optimal.
    pub fn require_optimal(self, context: &str) -> Result<Self> {
        match self.status {
            SolveStatus::Optimal => Ok(self),
            SolveStatus::Infeasible => Err(Error::Infeasible(format!("{context}: {}", self.message))),
            s => Err(Error::Solver(format!("{context}: status {s:?}: {}", self.message))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Highs,
    External {
        executable: PathBuf,
        /// Argument template; see [`external`] for placeholders. `None`
        /// picks a default from the executable name.
        #[serde(default)]
        args: Option<Vec<String>>,
    },
    BruteForce,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackendConfig {
    #[serde(default = "default_backend")]
    pub backend: Backend,
    /// Relative optimality gap in [0, 1).
    #[serde(default)]
    pub gap: f64,
    /// Seconds.
    #[serde(default)]
    pub time_limit: Option<f64>,
    #[serde(default)]
    pub threads: Option<u32>,
}

fn default_backend() -> Backend {
    Backend::Highs
}

impl Default for BackendConfig {
    fn default() -> Self {
        BackendConfig {
            backend: Backend::Highs,
            gap: 0.0,
            time_limit: None,
            threads: None,
        }
    }
}

impl BackendConfig {
    pub fn brute_force() -> Self {
        BackendConfig {
            backend: Backend::BruteForce,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.gap) {
            return Err(Error::invalid(format!("gap must lie in [0, 1), got {}", self.gap)));
        }
        if let Some(t) = self.time_limit {
            if !(t > 0.0) {
                return Err(Error::invalid("time limit must be positive"));
            }
        }
        if self.threads == Some(0) {
            return Err(Error::invalid("threads must be positive"));
        }
        Ok(())
    }

    /// Backend after applying an override value of `TAUC_SOLVER`.
    pub fn resolve_backend(&self, env_value: Option<&str>) -> Backend {
        match env_value.map(str::trim).filter(|v| !v.is_empty()) {
            None => self.backend.clone(),
            Some("builtin:highs") => Backend::Highs,
            Some("builtin:brute-force") => Backend::BruteForce,
            Some(path) => {
                let args = match &self.backend {
                    Backend::External { args, .. } => args.clone(),
                    _ => None,
                };
                Backend::External {
                    executable: PathBuf::from(path),
                    args,
                }
            }
        }
    }
}

/// What a backend reports before post-processing.
pub(crate) struct RawOutcome {
    pub status: SolveStatus,
    pub x: Option<Vec<f64>>,
    pub gap: f64,
    pub message: String,
}

/// Solves `model` to the configured gap.
pub fn solve(model: &UcModel, cfg: &BackendConfig) -> Result<MipSolution> {
    let env = std::env::var(SOLVER_ENV).ok();
    solve_with_backend(model, cfg, &cfg.resolve_backend(env.as_deref()))
}

/// Like [`solve`] but ignores `TAUC_SOLVER`.
pub fn solve_with_backend(model: &UcModel, cfg: &BackendConfig, backend: &Backend) -> Result<MipSolution> {
    cfg.validate()?;
    verify::check_finite(model)?;
    let start = Instant::now();
    let raw = match backend {
        Backend::Highs => highs_backend::solve_mip(model, cfg)?,
        Backend::External { executable, args } => external::run(model, cfg, executable, args.as_deref())?,
        Backend::BruteForce => {
            let s = brute_force_solve(model)?;
            RawOutcome {
                status: s.status,
                x: (!s.x.is_empty()).then_some(s.x),
                gap: s.gap,
                message: s.message,
            }
        }
    };
    let mut sol = finish(model, cfg, backend, raw)?;
    sol.wall_time = start.elapsed().as_secs_f64();
    log::debug!(
        "solved {} vars / {} rows: {:?} objective {} in {:.3}s",
        model.n_vars(),
        model.constraints().len(),
        sol.status,
        sol.objective,
        sol.wall_time
    );
    Ok(sol)
}

fn finish(model: &UcModel, cfg: &BackendConfig, backend: &Backend, raw: RawOutcome) -> Result<MipSolution> {
    let Some(mut x) = raw.x.filter(|_| matches!(raw.status, SolveStatus::Optimal | SolveStatus::Feasible)) else {
        return Ok(MipSolution::without_point(raw.status, raw.message));
    };
    if x.len() != model.n_vars() {
        return Ok(MipSolution::without_point(
            SolveStatus::Error,
            format!("backend returned {} values for {} variables", x.len(), model.n_vars()),
        ));
    }
    if let Err(e) = snap_binaries(model, &mut x) {
        return Ok(MipSolution::without_point(SolveStatus::Error, e.to_string()));
    }
    let mut message = raw.message;
    let report = verify::check_solution(model, &x);
    if report.max_violation > FEASIBILITY_TOL {
        // Snapping can move a point off rows whose continuous part was
        // balanced against fractional binaries; re-solve the LP.
        log::debug!("polishing after snap: {} violated by {:e}", report.worst, report.max_violation);
        let polished = match backend {
            Backend::BruteForce => brute_force::solve_fixed_binaries(model, &x)?,
            _ => highs_backend::solve_fixed_binaries(model, &x)?,
        };
        match polished {
            Some(p) if verify::check_solution(model, &p).max_violation <= FEASIBILITY_TOL => x = p,
            _ => {
                return Ok(MipSolution::without_point(
                    SolveStatus::Error,
                    format!(
                        "solution violates `{}` by {:e} and could not be repaired",
                        report.worst, report.max_violation
                    ),
                ))
            }
        }
        message = format!("{message} (continuous part re-solved after rounding)").trim().to_string();
    }
    let gap = if raw.gap.is_finite() { raw.gap.max(0.0) } else { raw.gap };
    let status = match raw.status {
        SolveStatus::Optimal if gap <= cfg.gap + GAP_SLACK => SolveStatus::Optimal,
        _ => SolveStatus::Feasible,
    };
    Ok(MipSolution {
        status,
        objective: model.evaluate_objective(&x),
        values: model.label_values(&x),
        x,
        gap,
        wall_time: 0.0,
        message,
    })
}

fn snap_binaries(model: &UcModel, x: &mut [f64]) -> Result<()> {
    for (i, v) in model.variables().iter().enumerate() {
        if v.kind == VarKind::Binary {
            let r = x[i].round();
            if (x[i] - r).abs() > INTEGRALITY_TOL || !(r == 0.0 || r == 1.0) {
                return Err(Error::Solver(format!("binary `{}` has value {}", v.label, x[i])));
            }
            x[i] = r;
        }
    }
    Ok(())
}
