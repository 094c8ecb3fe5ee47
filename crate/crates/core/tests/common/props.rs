//! Invariants of one simulated mode, reported as a list of violations.

use tauc_core::model::{FlexClass, Fixings, Schedule, UnitState};
use tauc_core::simulation::{
    generation_shares, run_real_time, DayInput, DayOutcome, ModeOutcome, PowerSystem, SimulationConfig,
};

pub const BALANCE_TOL: f64 = 1e-6;
pub const SHARE_TOL: f64 = 1e-9;
/// Relative slack on the dominance comparison of two optimal objectives.
pub const DOMINANCE_TOL: f64 = 1e-7;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

pub fn balance_residual(s: &Schedule) -> f64 {
    (0..s.n_periods())
        .map(|t| {
            let thermal: f64 = s.dispatch.iter().map(|p| p[t]).sum();
            let supply = (thermal + s.wind[t] + s.solar[t] - s.served[t]).abs();
            let demand = (s.served[t] + s.shed[t] - s.demand[t]).abs();
            supply.max(demand)
        })
        .fold(0.0, f64::max)
}

/// Checks `out` on `input`; the unfixed re-solve for dominance is skipped
/// when `dominance` is false.
pub fn check_mode(
    input: &DayInput,
    system: &PowerSystem,
    cfg: &SimulationConfig,
    out: &ModeOutcome,
    dominance: bool,
) -> Vec<String> {
    let mut v = Vec::new();
    let name = out.plan.mode.name();
    let rt = &out.real_time;
    let s = &rt.schedule;
    let step_h = f64::from(input.series.step_minutes) / 60.0;

    let r = balance_residual(s);
    if r > BALANCE_TOL {
        v.push(format!("{name}: real-time balance residual {r:e}"));
    }
    if let Some(plan) = &out.plan.solved {
        let r = balance_residual(&plan.schedule);
        if r > BALANCE_TOL {
            v.push(format!("{name}: day-ahead balance residual {r:e}"));
        }
    }

    let n = out.plan.n_points();
    let horizon = n as f64 * step_h;
    let da_hours: f64 = out.plan.durations().iter().sum();
    let rt_hours: f64 = s.durations.iter().sum();
    if !close(da_hours, horizon, 1e-12) || !close(rt_hours, horizon, 1e-12) {
        v.push(format!("{name}: durations {da_hours} / {rt_hours} h over a {horizon} h window"));
    }

    for t in 0..s.n_periods() {
        let wind = system.capacity.wind_mw * input.series.wind_cf[t];
        let solar = system.capacity.solar_mw * input.series.solar_cf[t];
        if (s.wind[t] + s.wind_spill[t] - wind).abs() > BALANCE_TOL
            || (s.solar[t] + s.solar_spill[t] - solar).abs() > BALANCE_TOL
        {
            v.push(format!("{name}: renewable accounting at sample {t}"));
        }
        if (s.demand[t] - input.series.demand[t]).abs() > BALANCE_TOL {
            v.push(format!("{name}: demand mismatch at sample {t}"));
        }
    }

    match generation_shares(rt, &system.units) {
        Ok(shares) if (shares.total() - 100.0).abs() <= SHARE_TOL => {}
        Ok(shares) => v.push(format!("{name}: shares sum to {}", shares.total())),
        Err(e) => v.push(format!("{name}: shares: {e}")),
    }

    for i in 0..n {
        let k = out.plan.bounds.iter().position(|r| r.contains(&i)).unwrap();
        for (g, u) in system.units.iter().enumerate() {
            if u.flex_class != FlexClass::Peak && s.commitment[g][i] != out.plan.commitment[g][k] {
                v.push(format!("{name}: {} commitment differs from the plan at sample {i}", u.id));
            }
            if u.flex_class == FlexClass::Base && (s.dispatch[g][i] - out.plan.dispatch[g][k].clamp(0.0, u.pmax)).abs() > 1e-6 {
                v.push(format!("{name}: {} output differs from the plan at sample {i}", u.id));
            }
        }
    }

    if dominance {
        match run_real_time(input, n, &Fixings::new(), system, cfg) {
            Ok(free) => {
                if rt.objective < free.objective - DOMINANCE_TOL * free.objective.abs().max(1.0) {
                    v.push(format!(
                        "{name}: fixed objective {} below unfixed {} ({} relaxed rows)",
                        rt.objective,
                        free.objective,
                        rt.relaxed_rows.len()
                    ));
                }
            }
            Err(e) => v.push(format!("{name}: unfixed re-solve failed: {e}")),
        }
    }
    v
}

/// Trailing run length of the last status in `commitment[..end]`.
fn streak(commitment: &[bool], end: usize) -> usize {
    let last = commitment[end - 1];
    commitment[..end].iter().rev().take_while(|c| **c == last).count()
}

/// Every day starts from the previous day's real-time terminal states, and
/// those states match the schedule's last sample and trailing streak.
pub fn chain_violations(initial: &[UnitState], days: &[DayOutcome]) -> Vec<String> {
    let mut v = Vec::new();
    let mut expected = (initial.to_vec(), initial.to_vec());
    for d in days {
        if d.initial_ch != expected.0 || d.initial_ta != expected.1 {
            v.push(format!("{}: initial states differ from the previous terminal states", d.date));
        }
        for (start, m) in [(&d.initial_ch, &d.ch), (&d.initial_ta, &d.ta)] {
            let s = &m.real_time.schedule;
            let end = m.real_time.day_points;
            for (g, st) in m.real_time.terminal_states.iter().enumerate() {
                let on = s.commitment[g][end - 1];
                let run = streak(&s.commitment[g], end);
                let mut hours: f64 = s.durations[end - run..end].iter().sum();
                if run == end && start[g].online == on {
                    hours += if on { start[g].hours_on } else { start[g].hours_off };
                }
                let carried = if on { st.hours_on } else { st.hours_off };
                let output_ok = !on || (st.output_mw - s.dispatch[g][end - 1]).abs() <= 1e-6;
                if st.online != on || (carried - hours).abs() > 1e-9 || !output_ok {
                    v.push(format!("{} {}: terminal state {st:?} does not match the schedule", d.date, m.plan.mode.name()));
                }
            }
        }
        expected = (d.ch.real_time.terminal_states.clone(), d.ta.real_time.terminal_states.clone());
    }
    v
}
