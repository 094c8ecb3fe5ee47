#![allow(dead_code)]

pub mod greedy;
pub mod hourly;
pub mod props;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tauc_core::aggregation::{HiResSeries, PeriodRecord, RenewableCapacity};
use tauc_core::model::{FlexClass, SystemInstance, ThermalUnit, UnitState};
use tauc_core::simulation::{PowerSystem, SimulationConfig};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small random instance with random durations, ramps, minimum times and
/// initial states. `max_binaries` bounds units times periods.
pub fn random_instance(r: &mut ChaCha8Rng, max_binaries: usize) -> SystemInstance {
    let n_g = r.gen_range(1..=3usize);
    let n_t = r.gen_range(2..=6usize).min(max_binaries / n_g).max(1);
    let classes = [FlexClass::Base, FlexClass::Medium, FlexClass::Peak];
    let units = (0..n_g)
        .map(|g| {
            let pmax = r.gen_range(50.0..200.0f64).round();
            let pmin = (pmax * r.gen_range(0.0..0.6f64)).round();
            let ramp = |r: &mut ChaCha8Rng| r.gen_bool(0.7).then(|| r.gen_range(20.0..150.0f64).round());
            let online = r.gen_bool(0.5);
            let initial = if online {
                UnitState::online(r.gen_range(1..=6) as f64, (pmin + (pmax - pmin) * r.gen_range(0.0..1.0f64)).round())
            } else {
                UnitState::offline(r.gen_range(1..=6) as f64)
            };
            ThermalUnit {
                id: format!("g{}", g + 1),
                flex_class: classes[g % 3],
                pmin,
                pmax,
                ramp_up: ramp(r),
                ramp_down: ramp(r),
                startup_ramp: None,
                shutdown_ramp: None,
                min_up: [0.0, 1.0, 2.0, 3.0, 4.5][r.gen_range(0..5)],
                min_down: [0.0, 1.0, 2.0, 3.0, 2.5][r.gen_range(0..5)],
                startup_cost: r.gen_range(0.0..500.0f64).round(),
                marginal_cost: r.gen_range(10.0..90.0f64).round(),
                initial,
            }
        })
        .collect::<Vec<_>>();
    let total: f64 = units.iter().map(|u| u.pmax).sum();
    let periods = (0..n_t)
        .map(|_| PeriodRecord {
            duration_h: [0.5, 1.0, 1.5, 2.0, 3.0][r.gen_range(0..5)],
            demand_mw: (total * r.gen_range(0.2..1.05f64)).round(),
            wind_cf: r.gen_range(0.0..1.0f64),
            solar_cf: r.gen_range(0.0..1.0f64),
        })
        .collect();
    SystemInstance {
        units,
        wind_capacity: (total * r.gen_range(0.0..0.4f64)).round(),
        solar_capacity: (total * r.gen_range(0.0..0.4f64)).round(),
        load_shed_cost: 200.0,
        periods,
    }
}

/// Two units of each flexibility class.
pub fn synthetic_fleet() -> Vec<ThermalUnit> {
    let unit = |id: &str, class, pmin, pmax, ramp, t: f64, su, mc| ThermalUnit {
        ramp_up: Some(ramp),
        ramp_down: Some(ramp),
        min_up: t,
        min_down: t,
        startup_cost: su,
        ..ThermalUnit::simple(id, class, pmin, pmax, mc)
    };
    vec![
        unit("b1", FlexClass::Base, 100.0, 300.0, 100.0, 6.0, 1000.0, 20.0),
        unit("b2", FlexClass::Base, 100.0, 300.0, 120.0, 5.0, 1000.0, 21.0),
        unit("m1", FlexClass::Medium, 50.0, 200.0, 150.0, 3.0, 500.0, 50.0),
        unit("m2", FlexClass::Medium, 50.0, 200.0, 160.0, 2.0, 500.0, 52.0),
        unit("p1", FlexClass::Peak, 0.0, 150.0, 150.0, 0.0, 100.0, 80.0),
        unit("p2", FlexClass::Peak, 0.0, 150.0, 150.0, 0.0, 100.0, 85.0),
    ]
}

/// One unit of each flexibility class, sized for the synthetic traces.
pub fn small_fleet() -> Vec<ThermalUnit> {
    let f = synthetic_fleet();
    let scale = |u: &ThermalUnit, k: f64| ThermalUnit {
        id: u.id.clone(),
        pmin: u.pmin * k,
        pmax: u.pmax * k,
        ramp_up: u.ramp_up.map(|r| r * k),
        ramp_down: u.ramp_down.map(|r| r * k),
        ..u.clone()
    };
    vec![scale(&f[0], 2.0), scale(&f[2], 2.0), scale(&f[4], 2.0)]
}

/// Long-running base and medium units, peak offline.
pub fn warm_start(units: &mut [ThermalUnit]) {
    for u in units {
        u.initial = match u.flex_class {
            FlexClass::Base => UnitState::online(24.0, u.pmax),
            FlexClass::Medium => UnitState::online(24.0, u.pmin),
            FlexClass::Peak => UnitState::offline(24.0),
        };
    }
}

pub fn synthetic_system(units: Vec<ThermalUnit>, wind_mw: f64, solar_mw: f64) -> PowerSystem {
    PowerSystem {
        units,
        capacity: RenewableCapacity { wind_mw, solar_mw },
        load_shed_cost: 1000.0,
    }
}

/// Clear-sky solar capacity factor at hour `h` of the day.
pub fn solar_shape(h: f64) -> f64 {
    let x = (h - 6.0) / 12.0;
    if (0.0..=1.0).contains(&x) {
        (std::f64::consts::PI * x).sin().powi(2)
    } else {
        0.0
    }
}

/// Random synthetic trace of `hours` hours starting at midnight.
pub fn random_trace(r: &mut ChaCha8Rng, hours: usize, step_minutes: u32) -> HiResSeries {
    let per_hour = (60 / step_minutes) as usize;
    let n = hours * per_hour;
    let base = r.gen_range(780.0..900.0);
    let swing = r.gen_range(60.0..180.0);
    let peak_hour = r.gen_range(17.0..21.0);
    let cloud = r.gen_range(0.6..1.0);
    let wind_level: f64 = r.gen_range(0.1..0.7);
    let mut wind = wind_level;
    let mut demand = Vec::with_capacity(n);
    let mut wind_cf = Vec::with_capacity(n);
    let mut solar_cf = Vec::with_capacity(n);
    for i in 0..n {
        let h = i as f64 / per_hour as f64;
        let hd = h % 24.0;
        let daily = (-(hd - peak_hour).powi(2) / 8.0).exp() - 0.5 * (-(hd - 4.0).powi(2) / 6.0).exp();
        let noise = r.gen_range(-15.0..15.0);
        demand.push((base + swing * daily + noise).max(720.0));
        wind = (wind + r.gen_range(-0.03..0.03)).clamp(0.0, 1.0);
        wind_cf.push(wind);
        solar_cf.push((solar_shape(hd) * cloud * r.gen_range(0.9..1.0f64)).clamp(0.0, 1.0));
    }
    HiResSeries::new(step_minutes, demand, wind_cf, solar_cf).unwrap()
}

pub fn sim_config(lookahead_hours: u32) -> SimulationConfig {
    SimulationConfig {
        lookahead_hours,
        ..SimulationConfig::default()
    }
}

/// The window a rolling run hands to day `range`.
pub fn day_input(series: &HiResSeries, label: &str, range: std::ops::Range<usize>, states: Vec<UnitState>, d_prev: Option<f64>) -> tauc_core::simulation::DayInput {
    tauc_core::simulation::DayInput {
        label: label.to_string(),
        series: series.slice(range.start..series.len()).unwrap(),
        day_points: range.len(),
        states,
        d_prev,
    }
}

/// Consecutive whole days of `points_per_day` samples.
pub fn day_ranges(n_days: usize, points_per_day: usize) -> Vec<(String, std::ops::Range<usize>)> {
    (0..n_days)
        .map(|d| (format!("day{}", d + 1), d * points_per_day..(d + 1) * points_per_day))
        .collect()
}

fn logistic(x: f64, centre: f64, width: f64) -> f64 {
    1.0 / (1.0 + (-(x - centre) / width).exp())
}

/// Solar-heavy day: flat night, morning and evening plateaus, a deep midday
/// valley in net demand and steep shoulders between them.
pub fn duck_day(hours: usize, step_minutes: u32) -> HiResSeries {
    let per_hour = (60 / step_minutes) as usize;
    let n = hours * per_hour;
    let h = |i: usize| (i as f64 / per_hour as f64) % 24.0;
    let demand = (0..n)
        .map(|i| 800.0 + 250.0 * (logistic(h(i), 6.5, 0.25) - logistic(h(i), 22.5, 0.25)))
        .collect();
    let solar = (0..n)
        .map(|i| (logistic(h(i), 8.0, 0.15) - logistic(h(i), 16.5, 0.15)).clamp(0.0, 1.0))
        .collect();
    HiResSeries::new(step_minutes, demand, vec![0.2; n], solar).unwrap()
}

/// Constant demand with a slow daily wind swing and no solar.
pub fn smooth_wind_day(hours: usize, step_minutes: u32) -> HiResSeries {
    let per_hour = (60 / step_minutes) as usize;
    let n = hours * per_hour;
    let wind = (0..n)
        .map(|i| 0.4 + 0.2 * (2.0 * std::f64::consts::PI * i as f64 / (24 * per_hour) as f64).sin())
        .collect();
    HiResSeries::new(step_minutes, vec![850.0; n], wind, vec![0.0; n]).unwrap()
}
