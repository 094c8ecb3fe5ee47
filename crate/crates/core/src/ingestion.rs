//! Trace loading, renewable sizing, generator portfolios and scenario
//! configuration.
//!
//! Traces are CSV files with the header `timestamp,demand_mw,wind_cf,solar_cf`.
//! Timestamps are UTC, either RFC 3339 (`2017-03-19T00:10:00Z`) or naive
//! (`2017-03-19 00:10:00` / `2017-03-19T00:10:00`).

use std::ops::Range;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::{DateTime, NaiveDate, NaiveDateTime, Timelike};
use serde::{Deserialize, Serialize};

use crate::aggregation::{FeatureSelector, HiResSeries, RenewableCapacity};
use crate::error::{Error, Result};
use crate::model::{FlexClass, ThermalUnit};
use crate::solver::BackendConfig;

pub const CSV_HEADER: [&str; 4] = ["timestamp", "demand_mw", "wind_cf", "solar_cf"];
pub const ALLOWED_STEPS: [u32; 4] = [5, 10, 30, 60];

/// A trace together with the time of its first sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub start: NaiveDateTime,
    pub series: HiResSeries,
}

impl Trace {
    pub fn new(start: NaiveDateTime, mut series: HiResSeries) -> Result<Self> {
        series.validate()?;
        series.start_offset_hours = f64::from(start.num_seconds_from_midnight()) / 3600.0;
        Ok(Trace { start, series })
    }

    pub fn timestamp(&self, index: usize) -> NaiveDateTime {
        self.start + chrono::Duration::minutes(i64::from(self.series.step_minutes) * index as i64)
    }

    /// Calendar days fully covered by the trace, with their index ranges.
    pub fn full_days(&self) -> Vec<(NaiveDate, Range<usize>)> {
        let step = self.series.step_minutes as usize;
        if 1440 % step != 0 {
            return Vec::new();
        }
        let per_day = 1440 / step;
        let since_midnight = self.start.num_seconds_from_midnight() as usize / 60;
        let first = if since_midnight == 0 {
            0
        } else if since_midnight % step == 0 {
            (1440 - since_midnight) / step
        } else {
            return Vec::new();
        };
        let mut days = Vec::new();
        let mut i = first;
        while i + per_day <= self.series.len() {
            days.push((self.timestamp(i).date(), i..i + per_day));
            i += per_day;
        }
        days
    }
}

fn parse_timestamp(s: &str) -> Option<NaiveDateTime> {
    let s = s.trim();
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Some(t.naive_utc());
    }
    ["%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M", "%Y-%m-%dT%H:%M"]
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(s, f).ok())
}

/// Reads a trace and checks header, timestamps, step and value ranges.
pub fn load_trace(path: &Path, step_minutes: u32) -> Result<Trace> {
    let data_err = |line: usize, message: String| Error::Data {
        path: path.to_path_buf(),
        line,
        message,
    };
    if !ALLOWED_STEPS.contains(&step_minutes) {
        return Err(Error::invalid(format!("unsupported step of {step_minutes} minutes")));
    }
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(data_err(1, format!("expected header `{}`, found `{}`", CSV_HEADER.join(","), header.join(","))));
    }
    let step = chrono::Duration::minutes(i64::from(step_minutes));
    let (mut demand, mut wind, mut solar) = (Vec::new(), Vec::new(), Vec::new());
    let mut start = None;
    let mut prev: Option<NaiveDateTime> = None;
    for (k, rec) in reader.records().enumerate() {
        let line = k + 2;
        let rec = rec.map_err(|e| data_err(line, e.to_string()))?;
        if rec.len() != 4 {
            return Err(data_err(line, format!("expected 4 fields, found {}", rec.len())));
        }
        let ts = parse_timestamp(&rec[0]).ok_or_else(|| data_err(line, format!("bad timestamp `{}`", &rec[0])))?;
        let num = |i: usize, name: &str| -> Result<f64> {
            let v: f64 = rec[i]
                .parse()
                .map_err(|_| data_err(line, format!("{name} `{}` is not a number", &rec[i])))?;
            if !v.is_finite() {
                return Err(data_err(line, format!("{name} is not finite")));
            }
            Ok(v)
        };
        let d = num(1, "demand_mw")?;
        let w = num(2, "wind_cf")?;
        let s = num(3, "solar_cf")?;
        if d < 0.0 {
            return Err(data_err(line, format!("negative demand {d}")));
        }
        for (name, v) in [("wind_cf", w), ("solar_cf", s)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(data_err(line, format!("{name} = {v} outside [0, 1]")));
            }
        }
        if let Some(p) = prev {
            let diff = ts - p;
            if diff <= chrono::Duration::zero() {
                return Err(data_err(line, "timestamps must increase".into()));
            }
            if diff > step {
                return Err(data_err(line, format!("gap of {} minutes", diff.num_minutes())));
            }
            if diff != step {
                return Err(data_err(
                    line,
                    format!("step of {} minutes, expected {step_minutes}", diff.num_minutes()),
                ));
            }
        } else {
            start = Some(ts);
        }
        prev = Some(ts);
        demand.push(d);
        wind.push(w);
        solar.push(s);
    }
    let start = start.ok_or(Error::EmptyInput)?;
    Trace::new(start, HiResSeries::new(step_minutes, demand, wind, solar)?)
}

pub fn load_timeseries(path: &Path, step_minutes: u32) -> Result<HiResSeries> {
    Ok(load_trace(path, step_minutes)?.series)
}

/// Writes `trace` in the format read by [`load_trace`]; values round-trip
/// exactly.
pub fn write_trace(path: &Path, trace: &Trace) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(CSV_HEADER)?;
    let s = &trace.series;
    for i in 0..s.len() {
        let ts = trace.timestamp(i).format("%Y-%m-%dT%H:%M:%SZ").to_string();
        w.write_record([ts, s.demand[i].to_string(), s.wind_cf[i].to_string(), s.solar_cf[i].to_string()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Capacity whose production covers the share `alpha` of total demand:
/// `alpha * sum(demand) / sum(cf)`.
pub fn compute_installed_capacity(alpha: f64, demand: &[f64], cf: &[f64]) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::invalid(format!("alpha = {alpha} outside [0, 1]")));
    }
    if demand.len() != cf.len() {
        return Err(Error::DimensionMismatch {
            expected: demand.len(),
            actual: cf.len(),
        });
    }
    if alpha == 0.0 {
        return Ok(0.0);
    }
    let cf_sum: f64 = cf.iter().sum();
    if !(cf_sum > 0.0) {
        return Err(Error::invalid("capacity factors are all zero"));
    }
    Ok(alpha * demand.iter().sum::<f64>() / cf_sum)
}

/// Wind and solar capacities covering the given shares of the demand of
/// `series`.
pub fn size_renewables(series: &HiResSeries, alpha_wind: f64, alpha_solar: f64) -> Result<RenewableCapacity> {
    Ok(RenewableCapacity {
        wind_mw: compute_installed_capacity(alpha_wind, &series.demand, &series.wind_cf)?,
        solar_mw: compute_installed_capacity(alpha_solar, &series.demand, &series.solar_cf)?,
    })
}

/// Named generator portfolios, or a JSON file holding a list of units.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PortfolioId {
    Example6,
    Study13,
    Spanish70,
    File(PathBuf),
}

impl FromStr for PortfolioId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "example6" => PortfolioId::Example6,
            "study13" => PortfolioId::Study13,
            "spanish70" => PortfolioId::Spanish70,
            _ if s.ends_with(".json") => PortfolioId::File(PathBuf::from(s)),
            _ => return Err(Error::invalid(format!("unknown portfolio `{s}`"))),
        })
    }
}

pub fn build_portfolio(id: &PortfolioId) -> Result<Vec<ThermalUnit>> {
    let units = match id {
        PortfolioId::Example6 => example6(),
        PortfolioId::Study13 => study13(),
        PortfolioId::Spanish70 => spanish70(),
        PortfolioId::File(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            serde_json::from_str(&text)?
        }
    };
    for u in &units {
        u.validate()?;
    }
    Ok(units)
}

/// Four base, one medium and one peak unit; no ramp or minimum-time limits.
fn example6() -> Vec<ThermalUnit> {
    let mut units: Vec<ThermalUnit> = (1..=4)
        .map(|k| ThermalUnit::simple(format!("base{k}"), FlexClass::Base, 150.0, 200.0, 10.0))
        .collect();
    units.push(ThermalUnit::simple("medium1", FlexClass::Medium, 50.0, 100.0, 30.0));
    units.push(ThermalUnit::simple("peak1", FlexClass::Peak, 0.0, 50.0, 50.0));
    units
}

#[allow(clippy::too_many_arguments)]
fn unit(id: &str, class: FlexClass, pmin: f64, pmax: f64, ramp: f64, min_time: f64, su: f64, mc: f64) -> ThermalUnit {
    ThermalUnit {
        ramp_up: Some(ramp),
        ramp_down: Some(ramp),
        min_up: min_time,
        min_down: min_time,
        startup_cost: su,
        ..ThermalUnit::simple(id, class, pmin, pmax, mc)
    }
}

fn study13() -> Vec<ThermalUnit> {
    use FlexClass::*;
    let rows: [(&str, FlexClass, f64, f64, f64, f64, f64, f64); 13] = [
        ("g1", Base, 200.0, 400.0, 120.0, 9.0, 1000.0, 20.0),
        ("g2", Base, 200.0, 400.0, 130.0, 8.5, 1000.0, 21.0),
        ("g3", Base, 200.0, 400.0, 140.0, 8.0, 1000.0, 22.0),
        ("g4", Medium, 100.0, 300.0, 105.0, 5.0, 800.0, 50.0),
        ("g5", Medium, 100.0, 300.0, 120.0, 4.7, 800.0, 51.0),
        ("g6", Medium, 100.0, 300.0, 135.0, 4.3, 800.0, 52.0),
        ("g7", Medium, 100.0, 300.0, 150.0, 4.0, 800.0, 53.0),
        ("g8", Peak, 0.0, 250.0, 125.0, 0.0, 500.0, 80.0),
        ("g9", Peak, 0.0, 250.0, 130.0, 0.0, 500.0, 81.0),
        ("g10", Peak, 0.0, 250.0, 135.0, 0.0, 500.0, 82.0),
        ("g11", Peak, 0.0, 250.0, 140.0, 0.0, 500.0, 83.0),
        ("g12", Peak, 0.0, 250.0, 145.0, 0.0, 500.0, 84.0),
        ("g13", Peak, 0.0, 250.0, 150.0, 0.0, 500.0, 85.0),
    ];
    rows.iter()
        .map(|&(id, c, pmin, pmax, r, t, su, mc)| unit(id, c, pmin, pmax, r, t, su, mc))
        .collect()
}

/// `k`-th of `n` evenly spaced values over `[lo, hi]`.
fn spaced(lo: f64, hi: f64, k: usize, n: usize) -> f64 {
    if n <= 1 {
        lo
    } else {
        lo + (hi - lo) * k as f64 / (n - 1) as f64
    }
}

fn spanish70() -> Vec<ThermalUnit> {
    use FlexClass::*;
    // (prefix, class, count, pmin, pmax, ramp, min time range, start-up, cost range)
    let groups = [
        ("b", Base, 8, 500.0, 1000.0, 3000.0, (7.5, 9.0), 2000.0, (20.0, 25.0)),
        ("m", Medium, 12, 400.0, 800.0, 4800.0, (4.0, 5.0), 1000.0, (50.0, 55.0)),
        ("p", Peak, 50, 0.0, 500.0, 4500.0, (0.0, 0.0), 500.0, (80.0, 90.0)),
    ];
    let mut units = Vec::new();
    for (prefix, class, n, pmin, pmax, ramp, (t_lo, t_hi), su, (c_lo, c_hi)) in groups {
        for k in 0..n {
            // Flexibility and cost grow together within a class.
            let t = spaced(t_hi, t_lo, k, n);
            let mc = spaced(c_lo, c_hi, k, n);
            units.push(unit(&format!("{prefix}{}", k + 1), class, pmin, pmax, ramp, t, su, mc));
        }
    }
    units
}

/// How the look-ahead window is sized.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LookaheadMode {
    /// A fixed number of hours of the following day.
    #[default]
    Hours,
    /// The first clusters of the following day, as many as the number of
    /// look-ahead hours.
    Intervals,
}

fn default_scale() -> f64 {
    1.0
}
fn default_lookahead() -> u32 {
    8
}
fn default_shed_cost() -> f64 {
    10_000.0
}
fn default_periods() -> usize {
    24
}

/// Scenario description, read from JSON. Relative paths are resolved
/// against `data_root`, itself relative to the configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub data_path: PathBuf,
    #[serde(default)]
    pub data_root: Option<PathBuf>,
    pub step_minutes: u32,
    #[serde(default = "default_scale")]
    pub demand_scale: f64,
    #[serde(default)]
    pub alpha_wind: f64,
    #[serde(default)]
    pub alpha_solar: f64,
    pub portfolio: String,
    #[serde(default = "default_shed_cost")]
    pub load_shed_cost: f64,
    #[serde(default)]
    pub solver: BackendConfig,
    #[serde(default)]
    pub clustering: FeatureSelector,
    #[serde(default = "default_periods")]
    pub periods_per_day: usize,
    #[serde(default = "default_lookahead")]
    pub lookahead_hours: u32,
    #[serde(default)]
    pub lookahead_mode: LookaheadMode,
    #[serde(default)]
    pub start_date: Option<NaiveDate>,
    #[serde(default)]
    pub end_date: Option<NaiveDate>,
    /// Directory the configuration was read from.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: ScenarioConfig = serde_json::from_str(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, a) in [("alpha_wind", self.alpha_wind), ("alpha_solar", self.alpha_solar)] {
            if !(0.0..=1.0).contains(&a) {
                return Err(Error::invalid(format!("{name} = {a} outside [0, 1]")));
            }
        }
        if !(self.demand_scale > 0.0) {
            return Err(Error::invalid("demand_scale must be positive"));
        }
        if !ALLOWED_STEPS.contains(&self.step_minutes) {
            return Err(Error::invalid(format!(
                "step_minutes must be one of {ALLOWED_STEPS:?}, got {}",
                self.step_minutes
            )));
        }
        if self.periods_per_day == 0 {
            return Err(Error::invalid("periods_per_day must be positive"));
        }
        if let (Some(a), Some(b)) = (self.start_date, self.end_date) {
            if b < a {
                return Err(Error::invalid("end_date precedes start_date"));
            }
        }
        self.solver.validate()
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            return p.to_path_buf();
        }
        let root = match &self.data_root {
            Some(r) if r.is_absolute() => r.clone(),
            Some(r) => self.base_dir.join(r),
            None => self.base_dir.clone(),
        };
        root.join(p)
    }

    pub fn data_file(&self) -> PathBuf {
        self.resolve(&self.data_path)
    }

    pub fn portfolio_id(&self) -> Result<PortfolioId> {
        Ok(match self.portfolio.parse()? {
            PortfolioId::File(p) => PortfolioId::File(self.resolve(&p)),
            other => other,
        })
    }
}

/// Everything a simulation needs, materialised from a configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub trace: Trace,
    pub units: Vec<ThermalUnit>,
    pub capacity: RenewableCapacity,
    pub load_shed_cost: f64,
}

impl Scenario {
    /// Loads and scales the trace and sizes renewables over the whole trace.
    pub fn from_config(cfg: &ScenarioConfig) -> Result<Self> {
        let mut trace = load_trace(&cfg.data_file(), cfg.step_minutes)?;
        for d in trace.series.demand.iter_mut() {
            *d *= cfg.demand_scale;
        }
        let capacity = size_renewables(&trace.series, cfg.alpha_wind, cfg.alpha_solar)?;
        Ok(Scenario {
            trace,
            units: build_portfolio(&cfg.portfolio_id()?)?,
            capacity,
            load_shed_cost: cfg.load_shed_cost,
        })
    }

    /// Full days within the configured date range.
    pub fn days(&self, cfg: &ScenarioConfig) -> Vec<(NaiveDate, Range<usize>)> {
        self.trace
            .full_days()
            .into_iter()
            .filter(|(d, _)| cfg.start_date.is_none_or(|s| *d >= s) && cfg.end_date.is_none_or(|e| *d <= e))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn capacity_closed_forms() {
        let demand = vec![1000.0; 10];
        assert_eq!(compute_installed_capacity(0.0, &demand, &[0.0; 10]).unwrap(), 0.0);
        let p = compute_installed_capacity(0.2, &demand, &[0.25; 10]).unwrap();
        assert!((p - 800.0).abs() < 1e-9);
        assert_eq!(compute_installed_capacity(1.0, &demand, &[1.0; 10]).unwrap(), 1000.0);
        assert!(compute_installed_capacity(0.1, &demand, &[0.0; 10]).is_err());
        assert!(compute_installed_capacity(1.5, &demand, &[1.0; 10]).is_err());
    }

    #[test]
    fn portfolio_sizes_and_costs() {
        let e = build_portfolio(&PortfolioId::Example6).unwrap();
        assert_eq!(e.len(), 6);
        let mut costs: Vec<f64> = e.iter().map(|u| u.marginal_cost).collect();
        costs.dedup();
        assert_eq!(costs, vec![10.0, 30.0, 50.0]);

        let s = build_portfolio(&PortfolioId::Spanish70).unwrap();
        assert_eq!(s.len(), 70);
        let count = |c| s.iter().filter(|u| u.flex_class == c).count();
        assert_eq!((count(FlexClass::Base), count(FlexClass::Medium), count(FlexClass::Peak)), (8, 12, 50));
        let base_costs: Vec<f64> = s.iter().take(8).map(|u| u.marginal_cost).collect();
        assert_eq!(base_costs[0], 20.0);
        assert_eq!(base_costs[7], 25.0);
        assert_eq!(s[0].min_up, 9.0);
        assert_eq!(s[7].min_up, 7.5);
        assert!(s.iter().all(|u| u.ramp_up == u.ramp_down));
    }

    #[test]
    fn portfolio_ids_parse() {
        assert_eq!("study13".parse::<PortfolioId>().unwrap(), PortfolioId::Study13);
        assert!(matches!("units.json".parse::<PortfolioId>().unwrap(), PortfolioId::File(_)));
        assert!("nope".parse::<PortfolioId>().is_err());
    }

    #[test]
    fn timestamps_parse() {
        let a = parse_timestamp("2017-03-19T00:10:00Z").unwrap();
        let b = parse_timestamp("2017-03-19 00:10:00").unwrap();
        assert_eq!(a, b);
        assert!(parse_timestamp("19/03/2017").is_none());
    }
}
