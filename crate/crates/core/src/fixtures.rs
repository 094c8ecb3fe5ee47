//! The six-unit illustrative example: three hours at 30-minute resolution,
//! a morning of constant net demand followed by a steep evening ramp.

use crate::aggregation::{HiResSeries, RenewableCapacity};
use crate::ingestion::{build_portfolio, PortfolioId};
use crate::model::{FlexClass, ThermalUnit};
use crate::simulation::{DayAheadPlan, DayInput, Mode, PowerSystem, SimulationConfig};

pub const STEP_MINUTES: u32 = 30;
pub const DEMAND_MW: [f64; 6] = [500.0, 500.0, 500.0, 500.0, 650.0, 850.0];
pub const SOLAR_MW: [f64; 6] = [300.0, 300.0, 300.0, 300.0, 200.0, 0.0];
pub const SOLAR_CAPACITY_MW: f64 = 300.0;
pub const LOAD_SHED_COST: f64 = 100.0;
pub const TA_PERIODS: usize = 3;

/// Published real-time costs, €.
pub const GOLDEN_COST_CH: f64 = 18_500.0;
pub const GOLDEN_COST_TA: f64 = 11_500.0;

pub fn series() -> HiResSeries {
    HiResSeries::new(
        STEP_MINUTES,
        DEMAND_MW.to_vec(),
        vec![0.0; 6],
        SOLAR_MW.iter().map(|p| p / SOLAR_CAPACITY_MW).collect(),
    )
    .expect("fixture series is valid")
}

pub fn units() -> Vec<ThermalUnit> {
    build_portfolio(&PortfolioId::Example6).expect("built-in portfolio")
}

/// The portfolio with every base unit's minimum output replaced by `pmin`.
pub fn units_with_base_pmin(pmin: f64) -> Vec<ThermalUnit> {
    units()
        .into_iter()
        .map(|u| match u.flex_class {
            FlexClass::Base => ThermalUnit { pmin, ..u },
            _ => u,
        })
        .collect()
}

pub fn system() -> PowerSystem {
    system_with_units(units())
}

pub fn system_with_units(units: Vec<ThermalUnit>) -> PowerSystem {
    PowerSystem {
        units,
        capacity: RenewableCapacity {
            wind_mw: 0.0,
            solar_mw: SOLAR_CAPACITY_MW,
        },
        load_shed_cost: LOAD_SHED_COST,
    }
}

/// Exact solves, no look-ahead.
pub fn config() -> SimulationConfig {
    SimulationConfig {
        lookahead_hours: 0,
        ta_periods: Some(TA_PERIODS),
        ..SimulationConfig::default()
    }
}

pub fn input() -> DayInput {
    let sys = system();
    DayInput::standalone("illustrative", series(), sys.initial_states())
}

fn plan(mode: Mode, bounds: Vec<std::ops::Range<usize>>, dispatch: Vec<Vec<f64>>) -> DayAheadPlan {
    let unit_ids = units().into_iter().map(|u| u.id).collect();
    let commitment = dispatch.iter().map(|row| row.iter().map(|p| *p > 0.0).collect()).collect();
    DayAheadPlan {
        mode,
        bounds,
        step_minutes: STEP_MINUTES,
        unit_ids,
        commitment,
        dispatch,
        solved: None,
    }
}

/// Published hourly plan: base 200, 200, 600 MW and medium 50 MW in the
/// last hour.
pub fn published_ch_plan() -> DayAheadPlan {
    plan(
        Mode::Ch,
        vec![0..2, 2..4, 4..6],
        vec![
            vec![200.0, 200.0, 200.0],
            vec![0.0, 0.0, 200.0],
            vec![0.0, 0.0, 200.0],
            vec![0.0, 0.0, 0.0],
            vec![0.0, 0.0, 50.0],
            vec![0.0, 0.0, 0.0],
        ],
    )
}

/// Published time-adaptive plan over the periods {1-4}, {5}, {6}: base 200,
/// 400, 800 MW and medium 0, 50, 50 MW.
pub fn published_ta_plan() -> DayAheadPlan {
    plan(
        Mode::Ta,
        vec![0..4, 4..5, 5..6],
        vec![
            vec![200.0, 200.0, 200.0],
            vec![0.0, 200.0, 200.0],
            vec![0.0, 0.0, 200.0],
            vec![0.0, 0.0, 200.0],
            vec![0.0, 50.0, 50.0],
            vec![0.0, 0.0, 0.0],
        ],
    )
}

/// Self-contained description of a single-window example, as read by the
/// command-line reproduction.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ExampleFixture {
    pub step_minutes: u32,
    pub demand_mw: Vec<f64>,
    pub wind_cf: Vec<f64>,
    pub solar_cf: Vec<f64>,
    pub system: PowerSystem,
    pub ta_periods: usize,
    pub golden_cost_ch: f64,
    pub golden_cost_ta: f64,
}

impl ExampleFixture {
    pub fn illustrative() -> Self {
        let s = series();
        ExampleFixture {
            step_minutes: s.step_minutes,
            demand_mw: s.demand,
            wind_cf: s.wind_cf,
            solar_cf: s.solar_cf,
            system: system(),
            ta_periods: TA_PERIODS,
            golden_cost_ch: GOLDEN_COST_CH,
            golden_cost_ta: GOLDEN_COST_TA,
        }
    }

    pub fn input(&self) -> crate::Result<DayInput> {
        let s = HiResSeries::new(
            self.step_minutes,
            self.demand_mw.clone(),
            self.wind_cf.clone(),
            self.solar_cf.clone(),
        )?;
        Ok(DayInput::standalone("example", s, self.system.initial_states()))
    }

    pub fn config(&self) -> SimulationConfig {
        SimulationConfig {
            ta_periods: Some(self.ta_periods),
            ..config()
        }
    }
}
