//! Duration-aware unit-commitment formulation.
//!
//! With every `d_t = 1` the rows below are exactly the classic hourly
//! commitment model with start-up/shutdown ramp limits.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::milp::{LinExpr, Sense, UcModel, VarId, VarKind};
use super::params::EffectiveParams;
use super::unit::SystemInstance;
use crate::error::{Error, Result};

/// Fixings by variable label.
pub type Fixings = BTreeMap<String, f64>;

/// Variable labels. Periods are numbered from 1.
pub mod labels {
    pub fn commit(unit: &str, t: usize) -> String {
        format!("u_{unit}_{t}")
    }
    pub fn output(unit: &str, t: usize) -> String {
        format!("pg_{unit}_{t}")
    }
    pub fn startup(unit: &str, t: usize) -> String {
        format!("su_{unit}_{t}")
    }
    pub fn wind(t: usize) -> String {
        format!("pw_{t}")
    }
    pub fn solar(t: usize) -> String {
        format!("ps_{t}")
    }
    pub fn served(t: usize) -> String {
        format!("pd_{t}")
    }
}

/// Where each family of variables lives, plus the data needed to derive
/// shedding and spillage from a solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UcLayout {
    pub unit_ids: Vec<String>,
    pub durations: Vec<f64>,
    pub demand: Vec<f64>,
    pub wind_available: Vec<f64>,
    pub solar_available: Vec<f64>,
    pub commit: Vec<Vec<VarId>>,
    pub output: Vec<Vec<VarId>>,
    pub startup: Vec<Vec<VarId>>,
    pub wind: Vec<VarId>,
    pub solar: Vec<VarId>,
    pub served: Vec<VarId>,
}

impl UcModel {
    pub fn layout(&self) -> Option<&UcLayout> {
        self.layout.as_ref()
    }
}

/// Builds the MILP for `instance` over its periods.
pub fn build_uc_model(
    instance: &SystemInstance,
    params: &EffectiveParams,
    fixings: Option<&Fixings>,
) -> Result<UcModel> {
    instance.validate()?;
    let n_t = instance.n_periods();
    let n_g = instance.units.len();
    if params.d_hat.len() != n_t
        || params.ramps.len() != n_g
        || params.min_times.len() != n_g
        || params.ramps.iter().any(|r| r.ramp_up.len() != n_t)
        || params.min_times.iter().any(|m| m.up.len() != n_t)
    {
        return Err(Error::invalid("effective parameters do not match the instance"));
    }

    let mut m = UcModel::new();
    let cont = VarKind::Continuous;
    let mut commit = Vec::with_capacity(n_g);
    let mut output = Vec::with_capacity(n_g);
    let mut startup = Vec::with_capacity(n_g);
    for u in &instance.units {
        commit.push(
            (1..=n_t)
                .map(|t| m.add_var(labels::commit(&u.id, t), VarKind::Binary, 0.0, 1.0))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    for u in &instance.units {
        output.push(
            (1..=n_t)
                .map(|t| m.add_var(labels::output(&u.id, t), cont, 0.0, u.pmax))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    for u in &instance.units {
        startup.push(
            (1..=n_t)
                .map(|t| m.add_var(labels::startup(&u.id, t), cont, 0.0, f64::INFINITY))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    let wind_available: Vec<f64> = instance
        .periods
        .iter()
        .map(|p| p.wind_cf * instance.wind_capacity)
        .collect();
    let solar_available: Vec<f64> = instance
        .periods
        .iter()
        .map(|p| p.solar_cf * instance.solar_capacity)
        .collect();
    let demand: Vec<f64> = instance.periods.iter().map(|p| p.demand_mw).collect();
    let wind = (0..n_t)
        .map(|t| m.add_var(labels::wind(t + 1), cont, 0.0, wind_available[t]))
        .collect::<Result<Vec<_>>>()?;
    let solar = (0..n_t)
        .map(|t| m.add_var(labels::solar(t + 1), cont, 0.0, solar_available[t]))
        .collect::<Result<Vec<_>>>()?;
    let served = (0..n_t)
        .map(|t| m.add_var(labels::served(t + 1), cont, 0.0, demand[t]))
        .collect::<Result<Vec<_>>>()?;
    let durations = instance.durations();

    // Objective: production + start-up + load shedding.
    let mut obj = LinExpr::new();
    for (g, u) in instance.units.iter().enumerate() {
        for t in 0..n_t {
            obj.add(output[g][t], u.marginal_cost * durations[t]);
            obj.add(startup[g][t], 1.0);
        }
    }
    for t in 0..n_t {
        let w = instance.load_shed_cost * durations[t];
        obj.add_constant(w * demand[t]);
        obj.add(served[t], -w);
    }
    m.set_objective(obj);

    // Power balance.
    for t in 0..n_t {
        let mut e = LinExpr::new();
        for out in &output {
            e.add(out[t], 1.0);
        }
        e.add(wind[t], 1.0).add(solar[t], 1.0).add(served[t], -1.0);
        m.add_expr_constraint(format!("bal_{}", t + 1), e, Sense::Eq, 0.0)?;
    }

    for (g, unit) in instance.units.iter().enumerate() {
        let id = unit.id.as_str();
        let u = &commit[g];
        let p = &output[g];
        let s = &startup[g];
        let ramps = &params.ramps[g];
        let counts = &params.min_times[g];
        let u0 = unit.initial.u0();
        let p0 = unit.initial.output_mw;
        let pmax = unit.pmax;

        // u_{g,t-1} and p_{g,t-1}, with the initial state at t = 1.
        let add_prev_u = |e: &mut LinExpr, t: usize, c: f64| {
            if t == 0 {
                e.add_constant(c * u0);
            } else {
                e.add(u[t - 1], c);
            }
        };
        let add_prev_p = |e: &mut LinExpr, t: usize, c: f64| {
            if t == 0 {
                e.add_constant(c * p0);
            } else {
                e.add(p[t - 1], c);
            }
        };

        for t in 0..n_t {
            let k = t + 1;
            let mut e = LinExpr::new();
            e.add(p[t], 1.0).add(u[t], -unit.pmin);
            m.add_expr_constraint(format!("pmin_{id}_{k}"), e, Sense::Ge, 0.0)?;
            let mut e = LinExpr::new();
            e.add(p[t], 1.0).add(u[t], -pmax);
            m.add_expr_constraint(format!("pmax_{id}_{k}"), e, Sense::Le, 0.0)?;

            // s >= C^SU (u_t - u_{t-1})
            let mut e = LinExpr::new();
            e.add(s[t], 1.0).add(u[t], -unit.startup_cost);
            add_prev_u(&mut e, t, unit.startup_cost);
            m.add_expr_constraint(format!("sucost_{id}_{k}"), e, Sense::Ge, 0.0)?;

            // p_t - p_{t-1} <= RU u_{t-1} + SU (u_t - u_{t-1}) + pmax (1 - u_t)
            let (ru, su) = (ramps.ramp_up[t], ramps.startup[t]);
            let mut e = LinExpr::new();
            e.add(p[t], 1.0).add(u[t], pmax - su);
            add_prev_p(&mut e, t, -1.0);
            add_prev_u(&mut e, t, su - ru);
            m.add_expr_constraint(format!("rampup_{id}_{k}"), e, Sense::Le, pmax)?;

            // p_{t-1} - p_t <= RD u_t + SD (u_{t-1} - u_t) + pmax (1 - u_{t-1})
            let (rd, sd) = (ramps.ramp_down[t], ramps.shutdown[t]);
            let mut e = LinExpr::new();
            e.add(p[t], -1.0).add(u[t], sd - rd);
            add_prev_p(&mut e, t, 1.0);
            add_prev_u(&mut e, t, pmax - sd);
            m.add_expr_constraint(format!("rampdown_{id}_{k}"), e, Sense::Le, pmax)?;

            // p_t <= pmax u_{t+1} + SD (u_t - u_{t+1}), t < N_T
            if t + 1 < n_t {
                let mut e = LinExpr::new();
                e.add(p[t], 1.0).add(u[t], -sd).add(u[t + 1], sd - pmax);
                m.add_expr_constraint(format!("shutdown_{id}_{k}"), e, Sense::Le, 0.0)?;
            }
        }

        if unit.min_up > 0.0 {
            add_min_time_rows(&mut m, MinTimeKind::Up, id, u, counts.up_initial, counts.up_end, &counts.up, u0)?;
        }
        if unit.min_down > 0.0 {
            add_min_time_rows(&mut m, MinTimeKind::Down, id, u, counts.down_initial, counts.down_end, &counts.down, u0)?;
        }
    }

    m.layout = Some(UcLayout {
        unit_ids: instance.units.iter().map(|u| u.id.clone()).collect(),
        durations,
        demand,
        wind_available,
        solar_available,
        commit,
        output,
        startup,
        wind,
        solar,
        served,
    });
    if let Some(f) = fixings {
        m.apply_fixings(f)?;
    }
    Ok(m)
}

#[derive(Clone, Copy, PartialEq)]
enum MinTimeKind {
    Up,
    Down,
}

/// Minimum up (or down) time families: initial forced periods, the sliding
/// window rows and the end-of-horizon rows.
///
/// For down time every `u` is replaced by `1 - u`, which flips the sign of
/// the binary terms and adds the constants.
#[allow(clippy::too_many_arguments)]
fn add_min_time_rows(
    m: &mut UcModel,
    kind: MinTimeKind,
    id: &str,
    u: &[VarId],
    initial: usize,
    end: usize,
    window: &[usize],
    u0: f64,
) -> Result<()> {
    let n_t = u.len();
    let (tag, sign) = match kind {
        MinTimeKind::Up => ("up", 1.0),
        MinTimeKind::Down => ("down", -1.0),
    };
    // Adds coeff * v_t where v = u (up) or v = 1 - u (down).
    let add_state = |e: &mut LinExpr, t: usize, c: f64| {
        if kind == MinTimeKind::Down {
            e.add_constant(c);
        }
        e.add(u[t], sign * c);
    };
    // Adds coeff * (v_t - v_{t-1}), with v_0 from the initial state.
    let add_switch = |e: &mut LinExpr, t: usize, c: f64| {
        e.add(u[t], sign * c);
        if t == 0 {
            e.add_constant(-sign * c * u0);
        } else {
            e.add(u[t - 1], -sign * c);
        }
    };

    if initial > 0 {
        // sum_{t <= initial} (1 - v_t) = 0
        let mut e = LinExpr::new();
        for t in 0..initial.min(n_t) {
            e.add_constant(1.0);
            add_state(&mut e, t, -1.0);
        }
        m.add_expr_constraint(format!("min{tag}_init_{id}"), e, Sense::Eq, 0.0)?;
    }

    // t = initial + 1 ..= N_T - end + 1 (1-based)
    let first = initial;
    let last = (n_t + 1).saturating_sub(end);
    for t in first..last {
        let w = window[t];
        let mut e = LinExpr::new();
        for tau in t..(t + w).min(n_t) {
            add_state(&mut e, tau, 1.0);
        }
        add_switch(&mut e, t, -(w as f64));
        m.add_expr_constraint(format!("min{tag}_{id}_{}", t + 1), e, Sense::Ge, 0.0)?;
    }

    // t = N_T - end + 2 ..= N_T: sum_{tau >= t} (v_tau - (v_t - v_{t-1})) >= 0
    for t in last.max(first)..n_t {
        let len = (n_t - t) as f64;
        let mut e = LinExpr::new();
        for tau in t..n_t {
            add_state(&mut e, tau, 1.0);
        }
        add_switch(&mut e, t, -len);
        m.add_expr_constraint(format!("min{tag}_end_{id}_{}", t + 1), e, Sense::Ge, 0.0)?;
    }
    Ok(())
}
