//! Day-ahead planning, real-time re-dispatch and the hourly versus
//! time-adaptive comparison over rolling horizons.
//!
//! A day is simulated in two stages per mode. The day-ahead stage solves the
//! model on a low-resolution grid (hourly for [`Mode::Ch`], clustered for
//! [`Mode::Ta`]) over the day plus a look-ahead window. The real-time stage
//! re-solves on the original resolution with base units frozen (commitment
//! and output) and medium units frozen (commitment only). Costs are
//! accounted over the day itself and the terminal states of the real-time
//! stage seed the next day.

use std::ops::Range;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::aggregation::{
    cluster_adjacent, high_resolution_records, normalize_features, reduce_series, FeatureSelector, HiResSeries,
    RenewableCapacity, TimeGrid,
};
use crate::error::{Error, Result};
use crate::ingestion::{LookaheadMode, Scenario, ScenarioConfig};
use crate::model::{
    build_uc_model, extract_schedule, labels, CostBreakdown, EffectiveParams, Fixings, FlexClass, Schedule,
    SystemInstance, ThermalUnit, UcModel, UnitState,
};
use crate::solver::{solve, BackendConfig};

/// Tolerance for rows left constant by the real-time fixings.
const FIXED_ROW_TOL: f64 = 1e-6;
/// Relative tolerance under which two daily costs count as equal.
pub const TIE_REL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Conventional hourly scheduling.
    Ch,
    /// Time-adaptive scheduling on clustered periods.
    Ta,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Ch => "CH",
            Mode::Ta => "TA",
        }
    }
}

/// Generators, renewable capacities and shedding cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerSystem {
    pub units: Vec<ThermalUnit>,
    pub capacity: RenewableCapacity,
    pub load_shed_cost: f64,
}

impl PowerSystem {
    /// Instance over `series` reduced by `grid`, with the given initial states.
    fn instance(&self, periods: Vec<crate::aggregation::PeriodRecord>, states: &[UnitState]) -> Result<SystemInstance> {
        if states.len() != self.units.len() {
            return Err(Error::DimensionMismatch {
                expected: self.units.len(),
                actual: states.len(),
            });
        }
        let units = self
            .units
            .iter()
            .zip(states)
            .map(|(u, s)| ThermalUnit {
                initial: *s,
                ..u.clone()
            })
            .collect();
        Ok(SystemInstance {
            units,
            wind_capacity: self.capacity.wind_mw,
            solar_capacity: self.capacity.solar_mw,
            load_shed_cost: self.load_shed_cost,
            periods,
        })
    }

    pub fn from_scenario(scenario: &Scenario) -> Self {
        PowerSystem {
            units: scenario.units.clone(),
            capacity: scenario.capacity,
            load_shed_cost: scenario.load_shed_cost,
        }
    }

    pub fn initial_states(&self) -> Vec<UnitState> {
        self.units.iter().map(|u| u.initial).collect()
    }

    fn marginal_costs(&self) -> Vec<f64> {
        self.units.iter().map(|u| u.marginal_cost).collect()
    }
}

fn default_periods() -> usize {
    24
}
fn default_lookahead() -> u32 {
    8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    #[serde(default)]
    pub solver: BackendConfig,
    /// Time-adaptive periods per 24 h.
    #[serde(default = "default_periods")]
    pub periods_per_day: usize,
    #[serde(default = "default_lookahead")]
    pub lookahead_hours: u32,
    #[serde(default)]
    pub lookahead_mode: LookaheadMode,
    #[serde(default)]
    pub features: FeatureSelector,
    /// Overrides the number of time-adaptive periods of the whole window.
    #[serde(default)]
    pub ta_periods: Option<usize>,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            solver: BackendConfig::default(),
            periods_per_day: default_periods(),
            lookahead_hours: default_lookahead(),
            lookahead_mode: LookaheadMode::default(),
            features: FeatureSelector::default(),
            ta_periods: None,
        }
    }
}

impl SimulationConfig {
    pub fn from_scenario(cfg: &ScenarioConfig) -> Self {
        SimulationConfig {
            solver: cfg.solver.clone(),
            periods_per_day: cfg.periods_per_day,
            lookahead_hours: cfg.lookahead_hours,
            lookahead_mode: cfg.lookahead_mode,
            features: cfg.clustering,
            ta_periods: None,
        }
    }
}

/// Data of one simulated day.
#[derive(Debug, Clone, PartialEq)]
pub struct DayInput {
    pub label: String,
    /// Day `D` followed by whatever data of the following day is available.
    pub series: HiResSeries,
    /// Samples belonging to day `D`.
    pub day_points: usize,
    pub states: Vec<UnitState>,
    /// Duration of the period preceding the window, hours.
    pub d_prev: Option<f64>,
}

impl DayInput {
    /// A standalone window without look-ahead data.
    pub fn standalone(label: impl Into<String>, series: HiResSeries, states: Vec<UnitState>) -> Self {
        DayInput {
            label: label.into(),
            day_points: series.len(),
            series,
            states,
            d_prev: None,
        }
    }

    fn points_per_hour(&self) -> Result<usize> {
        self.series.points_per_hour().ok_or_else(|| {
            Error::invalid(format!(
                "{}: a {}-minute step does not divide an hour",
                self.label, self.series.step_minutes
            ))
        })
    }

    fn available_lookahead(&self) -> usize {
        self.series.len() - self.day_points
    }
}

/// Day-ahead decisions on a low-resolution grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DayAheadPlan {
    pub mode: Mode,
    /// Index ranges of each period over the high-resolution window.
    pub bounds: Vec<Range<usize>>,
    pub step_minutes: u32,
    pub unit_ids: Vec<String>,
    /// `[unit][period]`.
    pub commitment: Vec<Vec<bool>>,
    pub dispatch: Vec<Vec<f64>>,
    /// Present when the plan was produced by a solve.
    pub solved: Option<PlanSolve>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanSolve {
    pub objective: f64,
    /// Objective share of day `D`; straddling periods count pro rata.
    pub day_cost: f64,
    pub solve_time: f64,
    pub schedule: Schedule,
}

impl DayAheadPlan {
    pub fn n_periods(&self) -> usize {
        self.bounds.len()
    }

    pub fn n_points(&self) -> usize {
        self.bounds.last().map_or(0, |r| r.end)
    }

    pub fn durations(&self) -> Vec<f64> {
        let h = f64::from(self.step_minutes) / 60.0;
        self.bounds.iter().map(|r| r.len() as f64 * h).collect()
    }

    pub fn grid(&self) -> Result<TimeGrid> {
        TimeGrid::from_bounds(self.bounds.clone(), self.step_minutes, None)
    }

    fn period_of(&self, index: usize) -> Option<usize> {
        let k = self.bounds.partition_point(|r| r.end <= index);
        (k < self.bounds.len() && self.bounds[k].contains(&index)).then_some(k)
    }
}

fn window_points(input: &DayInput, mode: Mode, cfg: &SimulationConfig) -> Result<(usize, Option<TimeGrid>)> {
    let pph = input.points_per_hour()?;
    let want = cfg.lookahead_hours as usize * pph;
    if cfg.lookahead_hours == 0 {
        return Ok((input.day_points, None));
    }
    let available = input.available_lookahead();
    if mode == Mode::Ta && cfg.lookahead_mode == LookaheadMode::Intervals {
        // First clusters of the following day, clustered as a whole day.
        let next_len = available.min(input.day_points);
        let k = cfg.lookahead_hours as usize * cfg.periods_per_day / 24;
        if next_len == 0 || k == 0 || k > next_len {
            return Err(Error::invalid(format!("{}: missing look-ahead data", input.label)));
        }
        let next = input.series.slice(input.day_points..input.day_points + next_len)?;
        let target = (next_len as f64 / input.day_points as f64 * cfg.periods_per_day as f64).round() as usize;
        let grid = cluster_grid(&next, target.clamp(k, next_len), cfg.features, None)?;
        let end = grid.bounds()[k - 1].end;
        let head = TimeGrid::from_bounds(grid.bounds()[..k].to_vec(), grid.step_minutes(), None)?;
        return Ok((input.day_points + end, Some(head)));
    }
    if available < want {
        return Err(Error::invalid(format!(
            "{}: missing look-ahead data ({available} of {want} samples)",
            input.label
        )));
    }
    Ok((input.day_points + want, None))
}

fn cluster_grid(
    series: &HiResSeries,
    target: usize,
    features: FeatureSelector,
    capacity: Option<RenewableCapacity>,
) -> Result<TimeGrid> {
    let f = normalize_features(series, features, capacity)?;
    cluster_adjacent(&f, target, series.step_minutes)
}

/// Low-resolution grid for `mode` over the day-ahead window.
pub fn day_ahead_grid(input: &DayInput, system: &PowerSystem, mode: Mode, cfg: &SimulationConfig) -> Result<TimeGrid> {
    let (n, lookahead_grid) = window_points(input, mode, cfg)?;
    let window = input.series.slice(0..n)?;
    let pph = input.points_per_hour()?;
    match mode {
        Mode::Ch => {
            if n % pph != 0 {
                return Err(Error::invalid(format!("{}: window is not a whole number of hours", input.label)));
            }
            TimeGrid::hourly(n, window.step_minutes)
        }
        Mode::Ta => {
            let capacity = Some(system.capacity);
            if let Some(head) = lookahead_grid {
                let day = window.slice(0..input.day_points)?;
                let target = cfg.ta_periods.unwrap_or(cfg.periods_per_day);
                return cluster_grid(&day, target, cfg.features, capacity)?.concat(&head);
            }
            let hours = window.horizon_hours();
            let target = cfg
                .ta_periods
                .unwrap_or_else(|| (hours * cfg.periods_per_day as f64 / 24.0).round() as usize)
                .clamp(1, n);
            cluster_grid(&window, target, cfg.features, capacity)
        }
    }
}

fn solve_model(model: &UcModel, cfg: &SimulationConfig, context: &str) -> Result<(Schedule, f64, f64)> {
    let start = Instant::now();
    let sol = solve(model, &cfg.solver)?.require_optimal(context)?;
    let elapsed = start.elapsed().as_secs_f64();
    let schedule = extract_schedule(model, &sol.x)?;
    Ok((schedule, sol.objective, elapsed))
}

/// Solves the day-ahead model for `mode`.
pub fn run_day_ahead(input: &DayInput, system: &PowerSystem, mode: Mode, cfg: &SimulationConfig) -> Result<DayAheadPlan> {
    let grid = day_ahead_grid(input, system, mode, cfg)?;
    let window = input.series.slice(0..grid.n_points())?;
    let instance = system.instance(reduce_series(&window, &grid)?, &input.states)?;
    let params = EffectiveParams::compute(&instance, input.d_prev)?;
    let model = build_uc_model(&instance, &params, None)?;
    let context = format!("{} day-ahead {}", input.label, mode.name());
    let (schedule, objective, solve_time) = solve_model(&model, cfg, &context)?;

    let mc = system.marginal_costs();
    let mut day_cost = 0.0;
    for (k, r) in grid.bounds().iter().enumerate() {
        let inside = r.end.min(input.day_points).saturating_sub(r.start);
        if inside > 0 {
            let share = inside as f64 / r.len() as f64;
            day_cost += schedule.cost(&mc, system.load_shed_cost, k..k + 1).scaled(share).total();
        }
    }
    Ok(DayAheadPlan {
        mode,
        bounds: grid.bounds().to_vec(),
        step_minutes: grid.step_minutes(),
        unit_ids: schedule.unit_ids.clone(),
        commitment: schedule.commitment.clone(),
        dispatch: schedule.dispatch.clone(),
        solved: Some(PlanSolve {
            objective,
            day_cost,
            solve_time,
            schedule,
        }),
    })
}

/// Real-time fixings over the first `n_points` samples: base units get
/// commitment and output, medium units commitment only.
pub fn fix_from_plan(plan: &DayAheadPlan, units: &[ThermalUnit], n_points: usize) -> Result<Fixings> {
    if plan.unit_ids.len() != units.len() || plan.unit_ids.iter().zip(units).any(|(id, u)| *id != u.id) {
        return Err(Error::invalid("plan units do not match the portfolio"));
    }
    let mut fixings = Fixings::new();
    for i in 0..n_points {
        let k = plan
            .period_of(i)
            .ok_or_else(|| Error::invalid(format!("high-resolution period {} is not covered by the plan", i + 1)))?;
        for (g, u) in units.iter().enumerate() {
            if u.flex_class == FlexClass::Peak {
                continue;
            }
            let on = plan.commitment[g][k];
            fixings.insert(labels::commit(&u.id, i + 1), if on { 1.0 } else { 0.0 });
            if u.flex_class == FlexClass::Base {
                let p = if on { plan.dispatch[g][k].clamp(0.0, u.pmax) } else { 0.0 };
                fixings.insert(labels::output(&u.id, i + 1), p);
            }
        }
    }
    Ok(fixings)
}

/// Energy by technology, MWh.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TechEnergy {
    pub wind: f64,
    pub solar: f64,
    pub base: f64,
    pub medium: f64,
    pub peak: f64,
}

impl TechEnergy {
    pub fn total(&self) -> f64 {
        self.wind + self.solar + self.base + self.medium + self.peak
    }

    pub fn add(&mut self, o: &TechEnergy) {
        self.wind += o.wind;
        self.solar += o.solar;
        self.base += o.base;
        self.medium += o.medium;
        self.peak += o.peak;
    }

    /// Percentages of the total.
    pub fn shares(&self) -> Result<TechEnergy> {
        let total = self.total();
        if !(total > 0.0) {
            return Err(Error::invalid("no energy was produced"));
        }
        let s = |e: f64| 100.0 * e / total;
        Ok(TechEnergy {
            wind: s(self.wind),
            solar: s(self.solar),
            base: s(self.base),
            medium: s(self.medium),
            peak: s(self.peak),
        })
    }
}

/// Energy by technology over `periods` of a schedule.
pub fn tech_energy(schedule: &Schedule, units: &[ThermalUnit], periods: Range<usize>) -> TechEnergy {
    let mut e = TechEnergy::default();
    for t in periods {
        let d = schedule.durations[t];
        e.wind += schedule.wind[t] * d;
        e.solar += schedule.solar[t] * d;
        for (g, u) in units.iter().enumerate() {
            let v = schedule.dispatch[g][t] * d;
            match u.flex_class {
                FlexClass::Base => e.base += v,
                FlexClass::Medium => e.medium += v,
                FlexClass::Peak => e.peak += v,
            }
        }
    }
    e
}

/// Generation shares in percent of the energy served over day `D`.
pub fn generation_shares(result: &RealTimeResult, units: &[ThermalUnit]) -> Result<TechEnergy> {
    tech_energy(&result.schedule, units, 0..result.day_points).shares()
}

/// Outcome of the high-resolution re-dispatch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealTimeResult {
    /// Cost of day `D`.
    pub cost: CostBreakdown,
    /// Objective over the whole window.
    pub objective: f64,
    pub schedule: Schedule,
    pub day_points: usize,
    /// Rows made constant by the fixings and violated by them; dropped.
    pub relaxed_rows: Vec<String>,
    /// States at the end of day `D`.
    pub terminal_states: Vec<UnitState>,
    pub solve_time: f64,
}

impl RealTimeResult {
    pub fn shed_energy(&self) -> f64 {
        (0..self.day_points).map(|t| self.schedule.shed[t] * self.schedule.durations[t]).sum()
    }

    pub fn spilled_energy(&self) -> f64 {
        (0..self.day_points)
            .map(|t| (self.schedule.wind_spill[t] + self.schedule.solar_spill[t]) * self.schedule.durations[t])
            .sum()
    }
}

/// Re-solves the first `n_points` samples of the window on their own
/// resolution with `fixings` applied.
pub fn run_real_time(
    input: &DayInput,
    n_points: usize,
    fixings: &Fixings,
    system: &PowerSystem,
    cfg: &SimulationConfig,
) -> Result<RealTimeResult> {
    if n_points < input.day_points || n_points > input.series.len() {
        return Err(Error::invalid(format!("{}: real-time window of {n_points} samples", input.label)));
    }
    let window = input.series.slice(0..n_points)?;
    let instance = system.instance(high_resolution_records(&window), &input.states)?;
    let params = EffectiveParams::compute(&instance, input.d_prev)?;
    let mut model = build_uc_model(&instance, &params, Some(fixings))?;
    let relaxed_rows = model.drop_constant_rows(FIXED_ROW_TOL);
    if !relaxed_rows.is_empty() {
        log::warn!(
            "{}: {} rows violated by the day-ahead fixings were dropped (first: {})",
            input.label,
            relaxed_rows.len(),
            relaxed_rows[0]
        );
    }
    let context = format!("{} real-time", input.label);
    let (schedule, objective, solve_time) = solve_model(&model, cfg, &context)?;
    let cost = schedule.cost(&system.marginal_costs(), system.load_shed_cost, 0..input.day_points);
    let terminal_states = terminal_states(&schedule, &system.units, &input.states, input.day_points)?;
    Ok(RealTimeResult {
        cost,
        objective,
        schedule,
        day_points: input.day_points,
        relaxed_rows,
        terminal_states,
        solve_time,
    })
}

/// Unit states after the first `end` periods of `schedule`. A streak that
/// spans all of them extends the initial streak of the same status.
pub fn terminal_states(
    schedule: &Schedule,
    units: &[ThermalUnit],
    initial: &[UnitState],
    end: usize,
) -> Result<Vec<UnitState>> {
    if end == 0 || end > schedule.n_periods() {
        return Err(Error::invalid(format!("cannot take states after {end} periods")));
    }
    let last = end - 1;
    Ok(units
        .iter()
        .enumerate()
        .map(|(g, u)| {
            let status = schedule.commitment[g][last];
            let mut first = last;
            while first > 0 && schedule.commitment[g][first - 1] == status {
                first -= 1;
            }
            let mut hours: f64 = schedule.durations[first..end].iter().sum();
            if first == 0 && initial[g].online == status {
                hours += if status { initial[g].hours_on } else { initial[g].hours_off };
            }
            if status {
                UnitState::online(hours, schedule.dispatch[g][last].clamp(u.pmin, u.pmax))
            } else {
                UnitState::offline(hours)
            }
        })
        .collect())
}

/// Both stages of one mode for one day.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeOutcome {
    pub plan: DayAheadPlan,
    pub real_time: RealTimeResult,
}

impl ModeOutcome {
    pub fn cost(&self) -> f64 {
        self.real_time.cost.total()
    }

    pub fn solve_time(&self) -> f64 {
        self.plan.solved.as_ref().map_or(0.0, |s| s.solve_time) + self.real_time.solve_time
    }
}

/// Plans `mode` and simulates its real-time operation.
pub fn simulate_mode(input: &DayInput, system: &PowerSystem, mode: Mode, cfg: &SimulationConfig) -> Result<ModeOutcome> {
    let plan = run_day_ahead(input, system, mode, cfg)?;
    replay_plan(input, system, plan, cfg)
}

/// Simulates the real-time operation of a given plan.
pub fn replay_plan(input: &DayInput, system: &PowerSystem, plan: DayAheadPlan, cfg: &SimulationConfig) -> Result<ModeOutcome> {
    let n = plan.n_points();
    let fixings = fix_from_plan(&plan, &system.units, n)?;
    let real_time = run_real_time(input, n, &fixings, system, cfg)?;
    Ok(ModeOutcome { plan, real_time })
}

/// `100 (c_ch - c_ta) / c_ch`.
pub fn cost_delta(c_ch: f64, c_ta: f64) -> Result<f64> {
    if !(c_ch > 0.0) {
        return Err(Error::invalid(format!("reference cost must be positive, got {c_ch}")));
    }
    Ok(100.0 * (c_ch - c_ta) / c_ch)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub date: String,
    pub c_ch: f64,
    pub c_ta: f64,
    /// `None` when `c_ch` is not positive.
    pub delta_pct: Option<f64>,
    pub energy_ch: TechEnergy,
    pub energy_ta: TechEnergy,
    pub shares_ch: TechEnergy,
    pub shares_ta: TechEnergy,
    pub solve_time_ch: f64,
    pub solve_time_ta: f64,
}

impl ComparisonReport {
    pub fn new(date: impl Into<String>, ch: &ModeOutcome, ta: &ModeOutcome, units: &[ThermalUnit]) -> Result<Self> {
        let day = |o: &ModeOutcome| tech_energy(&o.real_time.schedule, units, 0..o.real_time.day_points);
        let (energy_ch, energy_ta) = (day(ch), day(ta));
        let (c_ch, c_ta) = (ch.cost(), ta.cost());
        Ok(ComparisonReport {
            date: date.into(),
            c_ch,
            c_ta,
            delta_pct: cost_delta(c_ch, c_ta).ok(),
            energy_ch,
            energy_ta,
            shares_ch: energy_ch.shares()?,
            shares_ta: energy_ta.shares()?,
            solve_time_ch: ch.solve_time(),
            solve_time_ta: ta.solve_time(),
        })
    }
}

/// Totals over a set of days.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonSummary {
    pub days: usize,
    pub c_ch: f64,
    pub c_ta: f64,
    pub delta_pct: Option<f64>,
    pub ta_lt_ch: usize,
    pub ta_eq_ch: usize,
    pub ta_gt_ch: usize,
    pub energy_ch: TechEnergy,
    pub energy_ta: TechEnergy,
}

pub fn summarize(reports: &[ComparisonReport]) -> ComparisonSummary {
    let mut s = ComparisonSummary {
        days: reports.len(),
        c_ch: 0.0,
        c_ta: 0.0,
        delta_pct: None,
        ta_lt_ch: 0,
        ta_eq_ch: 0,
        ta_gt_ch: 0,
        energy_ch: TechEnergy::default(),
        energy_ta: TechEnergy::default(),
    };
    for r in reports {
        s.c_ch += r.c_ch;
        s.c_ta += r.c_ta;
        s.energy_ch.add(&r.energy_ch);
        s.energy_ta.add(&r.energy_ta);
        let tol = TIE_REL_TOL * r.c_ch.abs().max(r.c_ta.abs()).max(1.0);
        if (r.c_ta - r.c_ch).abs() <= tol {
            s.ta_eq_ch += 1;
        } else if r.c_ta < r.c_ch {
            s.ta_lt_ch += 1;
        } else {
            s.ta_gt_ch += 1;
        }
    }
    s.delta_pct = cost_delta(s.c_ch, s.c_ta).ok();
    s
}

const SHARE_COLUMNS: [&str; 5] = ["wind", "solar", "base", "medium", "peak"];

fn share_fields(shares: &TechEnergy) -> [String; 5] {
    [shares.wind, shares.solar, shares.base, shares.medium, shares.peak].map(|v| v.to_string())
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes one row per report followed by a `total` row over all of them.
pub fn write_reports_csv(path: &Path, reports: &[ComparisonReport]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    let mut header = vec!["date".to_string(), "c_ch".into(), "c_ta".into(), "delta_pct".into()];
    for mode in ["ch", "ta"] {
        header.extend(SHARE_COLUMNS.iter().map(|c| format!("share_{c}_{mode}")));
    }
    header.extend(["solve_time_ch".into(), "solve_time_ta".into()]);
    w.write_record(&header)?;
    let row = |date: &str, c_ch: f64, c_ta: f64, delta: Option<f64>, sh: [&TechEnergy; 2], times: [f64; 2]| {
        let mut r = vec![date.to_string(), c_ch.to_string(), c_ta.to_string(), opt(delta)];
        r.extend(share_fields(sh[0]));
        r.extend(share_fields(sh[1]));
        r.extend(times.map(|t| t.to_string()));
        r
    };
    for r in reports {
        w.write_record(row(
            &r.date,
            r.c_ch,
            r.c_ta,
            r.delta_pct,
            [&r.shares_ch, &r.shares_ta],
            [r.solve_time_ch, r.solve_time_ta],
        ))?;
    }
    let s = summarize(reports);
    let zero = TechEnergy::default();
    let sh_ch = s.energy_ch.shares().unwrap_or(zero);
    let sh_ta = s.energy_ta.shares().unwrap_or(zero);
    let times = [
        reports.iter().map(|r| r.solve_time_ch).sum(),
        reports.iter().map(|r| r.solve_time_ta).sum(),
    ];
    w.write_record(row("total", s.c_ch, s.c_ta, s.delta_pct, [&sh_ch, &sh_ta], times))?;
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Writes the day counts and totals of `summary` as a single-row CSV.
pub fn write_summary_csv(path: &Path, summary: &ComparisonSummary) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(["days", "c_ch", "c_ta", "delta_pct", "ta_lt_ch", "ta_eq_ch", "ta_gt_ch"])?;
    w.write_record([
        summary.days.to_string(),
        summary.c_ch.to_string(),
        summary.c_ta.to_string(),
        opt(summary.delta_pct),
        summary.ta_lt_ch.to_string(),
        summary.ta_eq_ch.to_string(),
        summary.ta_gt_ch.to_string(),
    ])?;
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// One simulated day of a rolling run.
#[derive(Debug, Clone, PartialEq)]
pub struct DayOutcome {
    pub date: String,
    /// States each mode started the day from.
    pub initial_ch: Vec<UnitState>,
    pub initial_ta: Vec<UnitState>,
    pub ch: ModeOutcome,
    pub ta: ModeOutcome,
    pub report: ComparisonReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedDay {
    pub date: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RollingOutcome {
    pub reports: Vec<ComparisonReport>,
    pub skipped: Vec<SkippedDay>,
}

/// Simulates `days` (labelled index ranges into `series`) in order, each
/// mode chained on its own real-time terminal states. `observe` sees every
/// simulated day.
pub fn run_rolling_horizon_with(
    series: &HiResSeries,
    days: &[(String, Range<usize>)],
    system: &PowerSystem,
    cfg: &SimulationConfig,
    mut observe: impl FnMut(&DayOutcome),
) -> Result<RollingOutcome> {
    let mut out = RollingOutcome::default();
    let mut states_ch = system.initial_states();
    let mut states_ta = states_ch.clone();
    let mut d_prev = None;
    let mut prev_end: Option<usize> = None;
    for (date, range) in days {
        if range.is_empty() || range.end > series.len() {
            out.skipped.push(SkippedDay {
                date: date.clone(),
                reason: "day outside the data".into(),
            });
            continue;
        }
        if prev_end.is_some_and(|e| e != range.start) {
            log::warn!("{date}: not contiguous with the previous simulated day");
        }
        let tail = series.slice(range.start..series.len())?;
        let make = |states: &Vec<UnitState>| DayInput {
            label: date.clone(),
            series: tail.clone(),
            day_points: range.len(),
            states: states.clone(),
            d_prev,
        };
        let (input_ch, input_ta) = (make(&states_ch), make(&states_ta));
        let missing = [Mode::Ch, Mode::Ta]
            .into_iter()
            .zip([&input_ch, &input_ta])
            .find_map(|(m, i)| window_points(i, m, cfg).err());
        if let Some(e) = missing {
            log::warn!("skipping {date}: {e}");
            out.skipped.push(SkippedDay {
                date: date.clone(),
                reason: e.to_string(),
            });
            continue;
        }
        let ch = simulate_mode(&input_ch, system, Mode::Ch, cfg)?;
        let ta = simulate_mode(&input_ta, system, Mode::Ta, cfg)?;
        let report = ComparisonReport::new(date.clone(), &ch, &ta, &system.units)?;
        let outcome = DayOutcome {
            date: date.clone(),
            initial_ch: input_ch.states,
            initial_ta: input_ta.states,
            ch,
            ta,
            report,
        };
        observe(&outcome);
        states_ch = outcome.ch.real_time.terminal_states.clone();
        states_ta = outcome.ta.real_time.terminal_states.clone();
        d_prev = Some(series.step_hours());
        prev_end = Some(range.end);
        out.reports.push(outcome.report);
    }
    Ok(out)
}

pub fn run_rolling_horizon(
    series: &HiResSeries,
    days: &[(String, Range<usize>)],
    system: &PowerSystem,
    cfg: &SimulationConfig,
) -> Result<RollingOutcome> {
    run_rolling_horizon_with(series, days, system, cfg, |_| {})
}
