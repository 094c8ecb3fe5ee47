use serde::{Deserialize, Serialize};

use crate::aggregation::{PeriodRecord, RenewableCapacity};
use crate::error::{Error, Result};

/// Flexibility class, deciding what is frozen at day-ahead.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlexClass {
    /// Commitment and dispatch decided day-ahead.
    Base,
    /// Commitment decided day-ahead, dispatch free in real time.
    Medium,
    /// Fully flexible in real time.
    Peak,
}

/// Operating state of a unit just before the first period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitState {
    pub online: bool,
    /// Hours online before the first period (`UT^0`).
    #[serde(default)]
    pub hours_on: f64,
    /// Hours offline before the first period (`DT^0`).
    #[serde(default)]
    pub hours_off: f64,
    /// Output in the period before the first one, MW.
    #[serde(default)]
    pub output_mw: f64,
}

impl UnitState {
    pub fn offline(hours_off: f64) -> Self {
        UnitState {
            online: false,
            hours_on: 0.0,
            hours_off,
            output_mw: 0.0,
        }
    }

    pub fn online(hours_on: f64, output_mw: f64) -> Self {
        UnitState {
            online: true,
            hours_on,
            hours_off: 0.0,
            output_mw,
        }
    }

    pub fn u0(&self) -> f64 {
        if self.online {
            1.0
        } else {
            0.0
        }
    }
}

impl Default for UnitState {
    /// Cold, long offline.
    fn default() -> Self {
        UnitState::offline(168.0)
    }
}

/// Techno-economic record of a thermal generating unit.
///
/// Ramp rates are MW/h; `None` means unlimited. When the start-up or
/// shutdown ramp is omitted it defaults to `max(pmin, ramp)` of the matching
/// ramp direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermalUnit {
    pub id: String,
    pub flex_class: FlexClass,
    pub pmin: f64,
    pub pmax: f64,
    #[serde(default)]
    pub ramp_up: Option<f64>,
    #[serde(default)]
    pub ramp_down: Option<f64>,
    #[serde(default)]
    pub startup_ramp: Option<f64>,
    #[serde(default)]
    pub shutdown_ramp: Option<f64>,
    /// Minimum up time, hours.
    #[serde(default)]
    pub min_up: f64,
    /// Minimum down time, hours.
    #[serde(default)]
    pub min_down: f64,
    /// Cost per start-up, €.
    #[serde(default)]
    pub startup_cost: f64,
    /// €/MWh.
    pub marginal_cost: f64,
    #[serde(default)]
    pub initial: UnitState,
}

impl ThermalUnit {
    /// Unit with unlimited ramps, no minimum times and a cold initial state.
    pub fn simple(
        id: impl Into<String>,
        flex_class: FlexClass,
        pmin: f64,
        pmax: f64,
        marginal_cost: f64,
    ) -> Self {
        ThermalUnit {
            id: id.into(),
            flex_class,
            pmin,
            pmax,
            ramp_up: None,
            ramp_down: None,
            startup_ramp: None,
            shutdown_ramp: None,
            min_up: 0.0,
            min_down: 0.0,
            startup_cost: 0.0,
            marginal_cost,
            initial: UnitState::default(),
        }
    }

    pub fn effective_startup_ramp(&self) -> Option<f64> {
        self.startup_ramp
            .or_else(|| self.ramp_up.map(|r| r.max(self.pmin)))
    }

    pub fn effective_shutdown_ramp(&self) -> Option<f64> {
        self.shutdown_ramp
            .or_else(|| self.ramp_down.map(|r| r.max(self.pmin)))
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::invalid(format!("unit {}: {msg}", self.id)));
        if self.id.is_empty() {
            return Err(Error::invalid("unit id must not be empty"));
        }
        if !self.id.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return fail("id may only contain ASCII letters, digits and '_'".into());
        }
        if !(0.0 <= self.pmin && self.pmin <= self.pmax && self.pmax.is_finite()) {
            return fail(format!("need 0 <= pmin <= pmax, got {} / {}", self.pmin, self.pmax));
        }
        for (name, r) in [
            ("ramp_up", self.ramp_up),
            ("ramp_down", self.ramp_down),
            ("startup_ramp", self.startup_ramp),
            ("shutdown_ramp", self.shutdown_ramp),
        ] {
            if let Some(r) = r {
                if !(r > 0.0 && r.is_finite()) {
                    return fail(format!("{name} must be positive, got {r}"));
                }
            }
        }
        if self.min_up < 0.0 || self.min_down < 0.0 {
            return fail("minimum up/down times must be >= 0".into());
        }
        if self.startup_cost < 0.0 || !self.marginal_cost.is_finite() {
            return fail("costs must be finite and start-up cost >= 0".into());
        }
        let s = &self.initial;
        if s.online {
            if s.hours_on <= 0.0 {
                return fail("online initial state needs hours_on > 0".into());
            }
            if s.output_mw < self.pmin - 1e-9 || s.output_mw > self.pmax + 1e-9 {
                return fail(format!("initial output {} outside [pmin, pmax]", s.output_mw));
            }
        } else {
            if s.hours_off <= 0.0 {
                return fail("offline initial state needs hours_off > 0".into());
            }
            if s.output_mw != 0.0 {
                return fail("offline initial state needs zero output".into());
            }
        }
        Ok(())
    }
}

/// Everything needed to build one UC model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemInstance {
    pub units: Vec<ThermalUnit>,
    pub wind_capacity: f64,
    pub solar_capacity: f64,
    /// €/MWh of unserved demand.
    pub load_shed_cost: f64,
    pub periods: Vec<PeriodRecord>,
}

impl SystemInstance {
    pub fn n_periods(&self) -> usize {
        self.periods.len()
    }

    pub fn durations(&self) -> Vec<f64> {
        self.periods.iter().map(|p| p.duration_h).collect()
    }

    pub fn capacity(&self) -> RenewableCapacity {
        RenewableCapacity {
            wind_mw: self.wind_capacity,
            solar_mw: self.solar_capacity,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.periods.is_empty() {
            return Err(Error::invalid("instance has no periods"));
        }
        for u in &self.units {
            u.validate()?;
        }
        let mut ids: Vec<&str> = self.units.iter().map(|u| u.id.as_str()).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("unit ids must be unique"));
        }
        for (t, p) in self.periods.iter().enumerate() {
            if !(p.duration_h > 0.0) {
                return Err(Error::invalid(format!("period {} has non-positive duration", t + 1)));
            }
            if !(0.0..=1.0).contains(&p.wind_cf) || !(0.0..=1.0).contains(&p.solar_cf) {
                return Err(Error::invalid(format!("period {} capacity factor outside [0, 1]", t + 1)));
            }
            if !(p.demand_mw >= 0.0) {
                return Err(Error::invalid(format!("period {} has negative demand", t + 1)));
            }
        }
        if self.wind_capacity < 0.0 || self.solar_capacity < 0.0 {
            return Err(Error::invalid("renewable capacities must be >= 0"));
        }
        let max_mc = self
            .units
            .iter()
            .map(|u| u.marginal_cost)
            .fold(f64::NEG_INFINITY, f64::max);
        if self.load_shed_cost <= max_mc {
            return Err(Error::invalid(format!(
                "load shedding cost {} must exceed every marginal cost (max {max_mc})",
                self.load_shed_cost
            )));
        }
        Ok(())
    }
}
