use std::collections::BTreeMap;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::milp::UcModel;
use crate::error::{Error, Result};

/// Negative values down to this are treated as solver noise and clamped.
const NOISE_TOL: f64 = 1e-6;

/// Operating decisions of one solved model, indexed `[unit][period]` or
/// `[period]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub unit_ids: Vec<String>,
    pub durations: Vec<f64>,
    pub commitment: Vec<Vec<bool>>,
    pub dispatch: Vec<Vec<f64>>,
    /// Start-up cost incurred per period, €.
    pub startup: Vec<Vec<f64>>,
    pub wind: Vec<f64>,
    pub solar: Vec<f64>,
    pub demand: Vec<f64>,
    pub served: Vec<f64>,
    pub shed: Vec<f64>,
    pub wind_spill: Vec<f64>,
    pub solar_spill: Vec<f64>,
}

/// Cost components over a set of periods, €.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub production: f64,
    pub startup: f64,
    pub shedding: f64,
}

impl CostBreakdown {
    pub fn total(&self) -> f64 {
        self.production + self.startup + self.shedding
    }

    pub fn scaled(&self, w: f64) -> Self {
        CostBreakdown {
            production: self.production * w,
            startup: self.startup * w,
            shedding: self.shedding * w,
        }
    }

    pub fn add(&mut self, other: &CostBreakdown) {
        self.production += other.production;
        self.startup += other.startup;
        self.shedding += other.shedding;
    }
}

fn nonneg(label: &str, v: f64) -> Result<f64> {
    if v < -NOISE_TOL {
        Err(Error::invalid(format!("{label} is negative ({v})")))
    } else {
        Ok(v.max(0.0))
    }
}

/// Maps a solution vector (indexed like the model's variables) onto the
/// unit-commitment layout. Shedding and spillage are derived.
pub fn extract_schedule(model: &UcModel, values: &[f64]) -> Result<Schedule> {
    let layout = model
        .layout()
        .ok_or_else(|| Error::invalid("model has no unit-commitment layout"))?;
    if values.len() != model.n_vars() {
        return Err(Error::DimensionMismatch {
            expected: model.n_vars(),
            actual: values.len(),
        });
    }
    let n_t = layout.durations.len();
    let get = |id: super::milp::VarId| -> Result<f64> {
        let label = &model.variable(id).label;
        nonneg(label, values[id.0])
    };
    let mut commitment = Vec::new();
    let mut dispatch = Vec::new();
    let mut startup = Vec::new();
    for g in 0..layout.unit_ids.len() {
        commitment.push(
            layout.commit[g]
                .iter()
                .map(|&v| values[v.0] > 0.5)
                .collect(),
        );
        dispatch.push(layout.output[g].iter().map(|&v| get(v)).collect::<Result<Vec<_>>>()?);
        startup.push(layout.startup[g].iter().map(|&v| get(v)).collect::<Result<Vec<_>>>()?);
    }
    let wind = layout.wind.iter().map(|&v| get(v)).collect::<Result<Vec<_>>>()?;
    let solar = layout.solar.iter().map(|&v| get(v)).collect::<Result<Vec<_>>>()?;
    let served = layout.served.iter().map(|&v| get(v)).collect::<Result<Vec<_>>>()?;
    let mut shed = Vec::with_capacity(n_t);
    let mut wind_spill = Vec::with_capacity(n_t);
    let mut solar_spill = Vec::with_capacity(n_t);
    for t in 0..n_t {
        shed.push(nonneg("shed", layout.demand[t] - served[t])?);
        wind_spill.push(nonneg("wind spillage", layout.wind_available[t] - wind[t])?);
        solar_spill.push(nonneg("solar spillage", layout.solar_available[t] - solar[t])?);
    }
    Ok(Schedule {
        unit_ids: layout.unit_ids.clone(),
        durations: layout.durations.clone(),
        commitment,
        dispatch,
        startup,
        wind,
        solar,
        demand: layout.demand.clone(),
        served,
        shed,
        wind_spill,
        solar_spill,
    })
}

/// Solution values keyed by label, as returned by external solvers.
pub fn values_from_labels(model: &UcModel, by_label: &BTreeMap<String, f64>) -> Result<Vec<f64>> {
    model
        .variables()
        .iter()
        .map(|v| {
            by_label
                .get(&v.label)
                .copied()
                .ok_or_else(|| Error::UnknownVariable(v.label.clone()))
        })
        .collect()
}

impl Schedule {
    pub fn n_periods(&self) -> usize {
        self.durations.len()
    }

    pub fn n_units(&self) -> usize {
        self.unit_ids.len()
    }

    /// Costs over `periods`, given marginal costs per unit and the
    /// load-shedding cost.
    pub fn cost(&self, marginal_costs: &[f64], load_shed_cost: f64, periods: Range<usize>) -> CostBreakdown {
        let mut c = CostBreakdown::default();
        for t in periods {
            let d = self.durations[t];
            for g in 0..self.n_units() {
                c.production += marginal_costs[g] * self.dispatch[g][t] * d;
                c.startup += self.startup[g][t];
            }
            c.shedding += load_shed_cost * self.shed[t] * d;
        }
        c
    }

    /// Thermal output summed over units, per period.
    pub fn thermal_total(&self, t: usize) -> f64 {
        self.dispatch.iter().map(|p| p[t]).sum()
    }

    /// Largest absolute power-balance residual over all periods, MW.
    pub fn max_balance_residual(&self) -> f64 {
        (0..self.n_periods())
            .map(|t| (self.thermal_total(t) + self.wind[t] + self.solar[t] - self.served[t]).abs())
            .fold(0.0, f64::max)
    }
}
