//! Exhaustive enumeration oracle.
//!
//! Every assignment of the free binaries is visited in lexicographic order.
//! Rows over binaries only are checked as soon as their last binary is
//! assigned; every surviving assignment leaves an LP that is presolved and
//! solved with [`super::simplex`]. The first strictly best assignment wins.

use std::collections::BTreeMap;

use super::simplex::{solve_lp, LpOutcome, LpProblem, LpRow};
use super::{MipSolution, SolveStatus};
use crate::error::{Error, Result};
use crate::model::{Sense, UcModel, VarId, VarKind};

pub const MAX_BRUTE_FORCE_BINARIES: usize = 20;

/// Tolerance for rows whose variables are all fixed.
const ROW_TOL: f64 = 1e-9;

fn row_violation(sense: Sense, activity: f64, rhs: f64) -> f64 {
    match sense {
        Sense::Le => activity - rhs,
        Sense::Ge => rhs - activity,
        Sense::Eq => (activity - rhs).abs(),
    }
}

/// Solves the LP left after fixing every binary to its value in `x`.
/// Returns the full point, or `None` if that LP is infeasible.
pub fn solve_fixed_binaries(model: &UcModel, x: &[f64]) -> Result<Option<Vec<f64>>> {
    let n = model.n_vars();
    let mut lower = vec![0.0; n];
    let mut upper = vec![0.0; n];
    let mut fixed = vec![false; n];
    for (i, v) in model.variables().iter().enumerate() {
        let (lo, hi) = model.bounds(VarId(i));
        if v.kind == VarKind::Binary {
            lower[i] = x[i];
            upper[i] = x[i];
            fixed[i] = true;
        } else {
            lower[i] = lo;
            upper[i] = hi;
            fixed[i] = lo == hi;
        }
    }

    // Presolve: constant rows are checked, singleton rows become bounds.
    let mut lp_rows: Vec<(Vec<(usize, f64)>, Sense, f64)> = Vec::new();
    for row in model.constraints() {
        let mut rhs = row.rhs;
        let mut free = Vec::new();
        for (v, &c) in &row.coeffs {
            if fixed[v.0] {
                rhs -= c * lower[v.0];
            } else {
                free.push((v.0, c));
            }
        }
        match free.as_slice() {
            [] => {
                if row_violation(row.sense, 0.0, rhs) > ROW_TOL {
                    return Ok(None);
                }
            }
            &[(j, a)] => {
                let b = rhs / a;
                let sense = if a > 0.0 { row.sense } else { flip(row.sense) };
                match sense {
                    Sense::Le => upper[j] = upper[j].min(b),
                    Sense::Ge => lower[j] = lower[j].max(b),
                    Sense::Eq => {
                        lower[j] = lower[j].max(b);
                        upper[j] = upper[j].min(b);
                    }
                }
                if lower[j] > upper[j] + ROW_TOL {
                    return Ok(None);
                }
                if lower[j] > upper[j] {
                    upper[j] = lower[j];
                }
            }
            _ => lp_rows.push((free, row.sense, rhs)),
        }
    }

    let cols: Vec<usize> = (0..n).filter(|&i| !fixed[i]).collect();
    let mut pos = vec![usize::MAX; n];
    for (k, &i) in cols.iter().enumerate() {
        pos[i] = k;
    }
    let lp = LpProblem {
        cost: cols
            .iter()
            .map(|&i| model.objective().get(&VarId(i)).copied().unwrap_or(0.0))
            .collect(),
        lower: cols.iter().map(|&i| lower[i]).collect(),
        upper: cols.iter().map(|&i| upper[i]).collect(),
        rows: lp_rows
            .into_iter()
            .map(|(free, sense, rhs)| LpRow {
                coeffs: free.into_iter().map(|(j, a)| (pos[j], a)).collect(),
                sense,
                rhs,
            })
            .collect(),
    };
    match solve_lp(&lp)? {
        LpOutcome::Optimal { x: y, .. } => {
            let mut full = lower.clone();
            for (k, &i) in cols.iter().enumerate() {
                full[i] = y[k];
            }
            Ok(Some(full))
        }
        LpOutcome::Infeasible => Ok(None),
        LpOutcome::Unbounded => Err(Error::Solver("LP relaxation is unbounded".into())),
    }
}

fn flip(s: Sense) -> Sense {
    match s {
        Sense::Le => Sense::Ge,
        Sense::Ge => Sense::Le,
        Sense::Eq => Sense::Eq,
    }
}

struct Search<'a> {
    model: &'a UcModel,
    free: Vec<usize>,
    /// Pure-binary rows grouped by the position (in `free`) of their last
    /// free binary; rows without free binaries sit at position 0.
    checks: Vec<Vec<usize>>,
    x: Vec<f64>,
    best: Option<(f64, Vec<f64>)>,
    visited: u64,
}

impl Search<'_> {
    fn rows_ok(&self, depth: usize) -> bool {
        self.checks[depth].iter().all(|&r| {
            let row = &self.model.constraints()[r];
            let a: f64 = row.coeffs.iter().map(|(v, c)| c * self.x[v.0]).sum();
            row_violation(row.sense, a, row.rhs) <= ROW_TOL
        })
    }

    fn run(&mut self, depth: usize) -> Result<()> {
        if depth == self.free.len() {
            self.visited += 1;
            if let Some(point) = solve_fixed_binaries(self.model, &self.x)? {
                let z = self.model.evaluate_objective(&point);
                let improves = match &self.best {
                    None => true,
                    Some((b, _)) => z < *b - 1e-9 * (1.0 + b.abs()),
                };
                if improves {
                    self.best = Some((z, point));
                }
            }
            return Ok(());
        }
        let var = self.free[depth];
        for value in [0.0, 1.0] {
            self.x[var] = value;
            if self.rows_ok(depth) {
                self.run(depth + 1)?;
            }
        }
        Ok(())
    }
}

/// Global optimum by enumeration. Refuses models with more than
/// [`MAX_BRUTE_FORCE_BINARIES`] unfixed binaries.
pub fn brute_force_solve(model: &UcModel) -> Result<MipSolution> {
    let start = std::time::Instant::now();
    let n = model.n_vars();
    let mut x = vec![0.0; n];
    let mut free = Vec::new();
    for (i, v) in model.variables().iter().enumerate() {
        if v.kind != VarKind::Binary {
            continue;
        }
        let (lo, hi) = model.bounds(VarId(i));
        let lo = lo.max(0.0).ceil();
        let hi = hi.min(1.0).floor();
        if lo > hi {
            return Ok(infeasible("binary with empty domain"));
        }
        if lo == hi {
            x[i] = lo;
        } else {
            free.push(i);
        }
    }
    if free.len() > MAX_BRUTE_FORCE_BINARIES {
        return Err(Error::Solver(format!(
            "brute force refuses {} binaries (limit {MAX_BRUTE_FORCE_BINARIES})",
            free.len()
        )));
    }
    let mut order = vec![usize::MAX; n];
    for (k, &i) in free.iter().enumerate() {
        order[i] = k;
    }
    let mut checks = vec![Vec::new(); free.len().max(1)];
    for (r, row) in model.constraints().iter().enumerate() {
        let pure = row
            .coeffs
            .keys()
            .all(|v| model.variable(*v).kind == VarKind::Binary);
        if pure {
            let last = row
                .coeffs
                .keys()
                .filter_map(|v| (order[v.0] != usize::MAX).then_some(order[v.0]))
                .max()
                .unwrap_or(0);
            checks[last].push(r);
        }
    }
    let mut search = Search {
        model,
        free,
        checks,
        x,
        best: None,
        visited: 0,
    };
    if search.free.is_empty() {
        if search.rows_ok(0) {
            search.run(0)?;
        }
    } else {
        search.run(0)?;
    }
    log::debug!("brute force visited {} assignments", search.visited);
    let wall_time = start.elapsed().as_secs_f64();
    Ok(match search.best {
        None => MipSolution {
            wall_time,
            ..infeasible("no binary assignment admits a feasible LP")
        },
        Some((objective, x)) => MipSolution {
            status: SolveStatus::Optimal,
            objective,
            values: model.label_values(&x),
            x,
            gap: 0.0,
            wall_time,
            message: String::new(),
        },
    })
}

fn infeasible(msg: &str) -> MipSolution {
    MipSolution {
        status: SolveStatus::Infeasible,
        objective: f64::NAN,
        values: BTreeMap::new(),
        x: Vec::new(),
        gap: f64::INFINITY,
        wall_time: 0.0,
        message: msg.into(),
    }
}
