//! Dense two-phase primal simplex for small bounded LPs.
//!
//! Variables carry finite lower bounds and possibly infinite upper bounds;
//! nonbasic variables sit at either bound. Entering and leaving variables
//! follow Bland's rule, so the method terminates on degenerate problems.

use crate::error::{Error, Result};
use crate::model::Sense;

/// Entries smaller than this are never used as pivots.
pub const PIVOT_TOL: f64 = 1e-9;
/// Reduced costs within this of zero count as optimal.
const COST_TOL: f64 = 1e-9;
/// Phase-one residual, relative to the right-hand side scale, above which
/// the LP is declared infeasible.
const FEAS_TOL: f64 = 1e-8;
const MAX_ITERATIONS: usize = 200_000;

#[derive(Debug, Clone, PartialEq)]
pub struct LpRow {
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// `min cost·x` subject to `rows` and `lower <= x <= upper`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LpProblem {
    pub cost: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub rows: Vec<LpRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, objective: f64 },
    Infeasible,
    Unbounded,
}

struct Tableau {
    /// `m + 1` rows; the last holds reduced costs.
    t: Vec<Vec<f64>>,
    m: usize,
    ub: Vec<f64>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    at_upper: Vec<bool>,
    xb: Vec<f64>,
    allowed: Vec<bool>,
}

enum Phase {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn value(&self, j: usize) -> f64 {
        if self.is_basic[j] {
            let r = self.basis.iter().position(|&b| b == j).unwrap_or(0);
            self.xb[r]
        } else if self.at_upper[j] {
            self.ub[j]
        } else {
            0.0
        }
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let p = self.t[r][j];
        for v in self.t[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[j];
            if f != 0.0 {
                for (v, pr) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pr;
                }
                row[j] = 0.0;
            }
        }
        let leaving = self.basis[r];
        self.is_basic[leaving] = false;
        self.is_basic[j] = true;
        self.basis[r] = j;
    }

    fn set_costs(&mut self, c: &[f64]) {
        let n = self.ub.len();
        let mut d = c.to_vec();
        for i in 0..self.m {
            let cb = c[self.basis[i]];
            if cb != 0.0 {
                for (dj, tij) in d.iter_mut().zip(&self.t[i]) {
                    *dj -= cb * tij;
                }
            }
        }
        for &b in &self.basis {
            d[b] = 0.0;
        }
        debug_assert_eq!(d.len(), n);
        self.t[self.m] = d;
    }

    fn iterate(&mut self) -> Result<Phase> {
        let n = self.ub.len();
        for _ in 0..MAX_ITERATIONS {
            let d = &self.t[self.m];
            let entering = (0..n).find(|&j| {
                self.allowed[j]
                    && !self.is_basic[j]
                    && self.ub[j] > 0.0
                    && ((!self.at_upper[j] && d[j] < -COST_TOL) || (self.at_upper[j] && d[j] > COST_TOL))
            });
            let Some(j) = entering else {
                return Ok(Phase::Optimal);
            };
            let delta = if self.at_upper[j] { -1.0 } else { 1.0 };
            let mut theta = self.ub[j];
            let mut leave: Option<(usize, bool)> = None;
            for i in 0..self.m {
                let alpha = self.t[i][j];
                if alpha.abs() <= PIVOT_TOL {
                    continue;
                }
                let rate = -delta * alpha;
                let b = self.basis[i];
                let (limit, to_upper) = if rate < 0.0 {
                    (self.xb[i] / -rate, false)
                } else if self.ub[b].is_finite() {
                    ((self.ub[b] - self.xb[i]) / rate, true)
                } else {
                    continue;
                };
                let limit = limit.max(0.0);
                // Ties go to the smallest basic index; a tie with the
                // entering bound keeps the bound flip.
                let better = if limit < theta - 1e-12 {
                    true
                } else if limit <= theta + 1e-12 {
                    leave.is_some_and(|(r, _)| b < self.basis[r])
                } else {
                    false
                };
                if better {
                    theta = limit;
                    leave = Some((i, to_upper));
                }
            }
            if !theta.is_finite() {
                return Ok(Phase::Unbounded);
            }
            for i in 0..self.m {
                let alpha = self.t[i][j];
                if alpha != 0.0 {
                    self.xb[i] -= delta * theta * alpha;
                }
            }
            match leave {
                None => self.at_upper[j] = !self.at_upper[j],
                Some((r, to_upper)) => {
                    let entering_value = if delta > 0.0 { theta } else { self.ub[j] - theta };
                    let leaving = self.basis[r];
                    self.at_upper[leaving] = to_upper;
                    self.pivot(r, j);
                    self.xb[r] = entering_value;
                    self.at_upper[j] = false;
                }
            }
        }
        Err(Error::Solver("simplex iteration limit reached".into()))
    }
}

/// Solves `lp` exactly up to the pivot tolerance.
pub fn solve_lp(lp: &LpProblem) -> Result<LpOutcome> {
    let n = lp.cost.len();
    if lp.lower.len() != n || lp.upper.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: lp.lower.len().min(lp.upper.len()),
        });
    }
    for j in 0..n {
        if !lp.lower[j].is_finite() {
            return Err(Error::Solver("simplex needs finite lower bounds".into()));
        }
        if lp.upper[j] < lp.lower[j] {
            return Ok(LpOutcome::Infeasible);
        }
    }
    let m = lp.rows.len();
    let n_slack = lp.rows.iter().filter(|r| r.sense != Sense::Eq).count();
    // Shifted right-hand sides and row orientation.
    let mut rows: Vec<(Vec<(usize, f64)>, Option<f64>, f64)> = Vec::with_capacity(m);
    let mut need_art = 0;
    for row in &lp.rows {
        let shift: f64 = row.coeffs.iter().map(|&(j, a)| a * lp.lower[j]).sum();
        let mut rhs = row.rhs - shift;
        let mut coeffs = row.coeffs.clone();
        let mut slack = match row.sense {
            Sense::Le => Some(1.0),
            Sense::Ge => Some(-1.0),
            Sense::Eq => None,
        };
        if rhs < 0.0 {
            rhs = -rhs;
            for c in coeffs.iter_mut() {
                c.1 = -c.1;
            }
            slack = slack.map(|s| -s);
        }
        if slack != Some(1.0) {
            need_art += 1;
        }
        rows.push((coeffs, slack, rhs));
    }
    let n_cols = n + n_slack + need_art;
    let mut t = vec![vec![0.0; n_cols]; m + 1];
    let mut ub = vec![f64::INFINITY; n_cols];
    for j in 0..n {
        ub[j] = lp.upper[j] - lp.lower[j];
    }
    let mut basis = vec![0; m];
    let mut xb = vec![0.0; m];
    let mut artificial = vec![false; n_cols];
    let (mut next_slack, mut next_art) = (n, n + n_slack);
    for (i, (coeffs, slack, rhs)) in rows.iter().enumerate() {
        for &(j, a) in coeffs {
            t[i][j] += a;
        }
        if let Some(s) = slack {
            t[i][next_slack] = *s;
            if *s == 1.0 {
                basis[i] = next_slack;
            }
            next_slack += 1;
        }
        if *slack != Some(1.0) {
            t[i][next_art] = 1.0;
            artificial[next_art] = true;
            basis[i] = next_art;
            next_art += 1;
        }
        xb[i] = *rhs;
    }
    let mut is_basic = vec![false; n_cols];
    for &b in &basis {
        is_basic[b] = true;
    }
    let mut tab = Tableau {
        t,
        m,
        ub,
        basis,
        is_basic,
        at_upper: vec![false; n_cols],
        xb,
        allowed: vec![true; n_cols],
    };

    if need_art > 0 {
        let c1: Vec<f64> = artificial.iter().map(|&a| if a { 1.0 } else { 0.0 }).collect();
        tab.set_costs(&c1);
        if let Phase::Unbounded = tab.iterate()? {
            return Err(Error::Solver("phase one reported unbounded".into()));
        }
        let scale = 1.0 + rows.iter().map(|r| r.2).fold(0.0, f64::max);
        let infeas: f64 = (0..m).filter(|&i| artificial[tab.basis[i]]).map(|i| tab.xb[i]).sum();
        if infeas > FEAS_TOL * scale {
            return Ok(LpOutcome::Infeasible);
        }
        for j in 0..n_cols {
            if artificial[j] {
                tab.allowed[j] = false;
            }
        }
        // Drive zero-level artificials out of the basis where possible.
        for r in 0..m {
            if !artificial[tab.basis[r]] {
                continue;
            }
            let k = (0..n_cols)
                .filter(|&k| !artificial[k] && !tab.is_basic[k] && tab.t[r][k].abs() > PIVOT_TOL)
                .max_by(|&a, &b| tab.t[r][a].abs().total_cmp(&tab.t[r][b].abs()));
            if let Some(k) = k {
                let v = if tab.at_upper[k] { tab.ub[k] } else { 0.0 };
                tab.pivot(r, k);
                tab.xb[r] = v;
                tab.at_upper[k] = false;
            }
        }
    }

    let mut c2 = vec![0.0; n_cols];
    c2[..n].copy_from_slice(&lp.cost);
    tab.set_costs(&c2);
    if let Phase::Unbounded = tab.iterate()? {
        return Ok(LpOutcome::Unbounded);
    }
    let x: Vec<f64> = (0..n)
        .map(|j| (lp.lower[j] + tab.value(j)).clamp(lp.lower[j], lp.upper[j]))
        .collect();
    let objective = x.iter().zip(&lp.cost).map(|(a, b)| a * b).sum();
    Ok(LpOutcome::Optimal { x, objective })
}
