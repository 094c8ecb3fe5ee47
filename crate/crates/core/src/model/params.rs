//! Duration-dependent technical limits, computed ex ante from the grid.

use serde::{Deserialize, Serialize};

use super::unit::{SystemInstance, ThermalUnit};
use crate::error::{Error, Result};

/// Slack used when comparing duration sums against hour thresholds, so that
/// e.g. six 10-minute periods cover one hour.
const COVER_EPS: f64 = 1e-9;

/// Ramp limits in MW per period for one unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RampLimits {
    pub ramp_up: Vec<f64>,
    pub ramp_down: Vec<f64>,
    pub startup: Vec<f64>,
    pub shutdown: Vec<f64>,
}

/// Minimum up/down times converted to period counts for one unit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinTimeCounts {
    /// Periods the unit must stay online from the start.
    pub up_initial: usize,
    /// Periods the unit must stay offline from the start.
    pub down_initial: usize,
    /// Tail length handled by the end-of-horizon up-time constraints.
    pub up_end: usize,
    pub down_end: usize,
    /// Per-period minimum up time in periods.
    pub up: Vec<usize>,
    pub down: Vec<usize>,
}

/// Ex-ante parameters for every unit over one grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectiveParams {
    /// Midpoint distances `0.5 (d_{t-1} + d_t)` in hours.
    pub d_hat: Vec<f64>,
    pub ramps: Vec<RampLimits>,
    pub min_times: Vec<MinTimeCounts>,
}

impl EffectiveParams {
    /// `d_prev` is the duration of the period preceding the horizon; `None`
    /// reuses the first duration.
    pub fn compute(instance: &SystemInstance, d_prev: Option<f64>) -> Result<Self> {
        let durations = instance.durations();
        if durations.is_empty() {
            return Err(Error::invalid("no periods"));
        }
        let d_hat = midpoint_durations(&durations, d_prev);
        let ramps = instance
            .units
            .iter()
            .map(|u| effective_ramp_limits(u, &durations, d_prev))
            .collect();
        let min_times = instance
            .units
            .iter()
            .map(|u| effective_min_times(u, &durations))
            .collect();
        Ok(EffectiveParams {
            d_hat,
            ramps,
            min_times,
        })
    }
}

pub fn midpoint_durations(durations: &[f64], d_prev: Option<f64>) -> Vec<f64> {
    let first = d_prev.unwrap_or_else(|| durations.first().copied().unwrap_or(0.0));
    let mut prev = first;
    durations
        .iter()
        .map(|&d| {
            let h = 0.5 * (prev + d);
            prev = d;
            h
        })
        .collect()
}

/// `min{pmax, max{pmin, rate * d̂}}`; an unlimited rate saturates at pmax.
pub fn clamp_ramp(unit: &ThermalUnit, rate: Option<f64>, d_hat: f64) -> f64 {
    match rate {
        Some(r) => (r * d_hat).max(unit.pmin).min(unit.pmax),
        None => unit.pmax,
    }
}

pub fn effective_ramp_limits(unit: &ThermalUnit, durations: &[f64], d_prev: Option<f64>) -> RampLimits {
    let d_hat = midpoint_durations(durations, d_prev);
    let su = unit.effective_startup_ramp();
    let sd = unit.effective_shutdown_ramp();
    let map = |rate: Option<f64>| d_hat.iter().map(|&h| clamp_ramp(unit, rate, h)).collect();
    RampLimits {
        ramp_up: map(unit.ramp_up),
        ramp_down: map(unit.ramp_down),
        startup: map(su),
        shutdown: map(sd),
    }
}

/// Smallest `ω >= 1` such that `durations[start..start + ω]` sums to at least
/// `hours`, capped at the number of remaining periods.
pub fn forward_cover(durations: &[f64], start: usize, hours: f64) -> usize {
    let remaining = durations.len() - start;
    let mut sum = 0.0;
    for (k, d) in durations[start..].iter().enumerate() {
        sum += d;
        if sum + COVER_EPS >= hours {
            return k + 1;
        }
    }
    remaining
}

/// Smallest `ω >= 1` such that the last `ω` durations sum to at least `hours`,
/// capped at the horizon length.
pub fn backward_cover(durations: &[f64], hours: f64) -> usize {
    let mut sum = 0.0;
    for (k, d) in durations.iter().rev().enumerate() {
        sum += d;
        if sum + COVER_EPS >= hours {
            return k + 1;
        }
    }
    durations.len()
}

fn initial_count(durations: &[f64], hours: f64) -> usize {
    if hours <= COVER_EPS {
        0
    } else {
        forward_cover(durations, 0, hours)
    }
}

pub fn effective_min_times(unit: &ThermalUnit, durations: &[f64]) -> MinTimeCounts {
    let n = durations.len();
    let s = &unit.initial;
    let n_t = n as f64;
    let up_hours = ((unit.min_up - s.hours_on) * s.u0()).min(n_t);
    // The down-time carry-over applies to units that start offline.
    let down_hours = ((unit.min_down - s.hours_off) * (1.0 - s.u0())).min(n_t);
    MinTimeCounts {
        up_initial: initial_count(durations, up_hours),
        down_initial: initial_count(durations, down_hours),
        up_end: backward_cover(durations, unit.min_up),
        down_end: backward_cover(durations, unit.min_down),
        up: (0..n).map(|t| forward_cover(durations, t, unit.min_up)).collect(),
        down: (0..n).map(|t| forward_cover(durations, t, unit.min_down)).collect(),
    }
}
