//! `tauc`: clustering, planning and hourly versus time-adaptive comparisons
//! from a scenario configuration.
//!
//! Exit codes: 0 on success, 1 when a reproduced value misses its expected
//! value, 2 on any other error.

use std::fmt;
use std::fs;
use std::ops::Range;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use tauc_core::aggregation::{cluster_adjacent, normalize_features};
use tauc_core::fixtures::{self, ExampleFixture};
use tauc_core::ingestion::{size_renewables, Scenario, ScenarioConfig};
use tauc_core::model::FlexClass;
use tauc_core::simulation::{
    cost_delta, replay_plan, run_day_ahead, run_rolling_horizon, simulate_mode, summarize, write_reports_csv,
    write_summary_csv, DayAheadPlan, DayInput, Mode, ModeOutcome, PowerSystem, SimulationConfig,
};

#[derive(Parser)]
#[command(name = "tauc", version, about = "Time-adaptive unit commitment studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster each day of the trace and write period durations and centroids.
    Cluster(Common),
    /// Solve the day-ahead models of one day.
    Plan {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = ModeArg::Both)]
        mode: ModeArg,
        /// Day to plan (YYYY-MM-DD); defaults to the first one.
        #[arg(long)]
        date: Option<String>,
    },
    /// Simulate every day in both modes and compare real-time costs.
    Compare(Common),
    /// Run the comparison for a grid of wind and solar shares.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Worker threads; defaults to the available parallelism.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Solve the illustrative example and check the expected costs.
    ReproduceExample {
        /// Read the example from a JSON file instead of the built-in one.
        #[arg(long)]
        fixture: Option<PathBuf>,
        /// Write the built-in example as JSON and exit.
        #[arg(long)]
        write_fixture: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Relative MIP gap.
    #[arg(long)]
    gap: Option<f64>,
    #[arg(long)]
    lookahead_hours: Option<u32>,
    /// Time-adaptive periods per day (or for the whole trace when it is
    /// shorter than a day).
    #[arg(long)]
    periods: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Ch,
    Ta,
    Both,
}

impl ModeArg {
    fn modes(self) -> Vec<Mode> {
        match self {
            ModeArg::Ch => vec![Mode::Ch],
            ModeArg::Ta => vec![Mode::Ta],
            ModeArg::Both => vec![Mode::Ch, Mode::Ta],
        }
    }
}

/// A reproduced value that does not match.
#[derive(Debug)]
struct Mismatch(String);

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Mismatch {}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Cluster(c) => cmd_cluster(&c),
        Command::Plan { common, mode, date } => cmd_plan(&common, mode, date.as_deref()),
        Command::Compare(c) => cmd_compare(&c),
        Command::Sweep { common, threads } => cmd_sweep(&common, threads),
        Command::ReproduceExample { fixture, write_fixture } => cmd_reproduce(fixture.as_deref(), write_fixture.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<Mismatch>() => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Scenario, effective settings and the windows to simulate.
struct Loaded {
    config: ScenarioConfig,
    scenario: Scenario,
    sim: SimulationConfig,
    windows: Vec<(String, Range<usize>)>,
    /// The trace is shorter than a day and is used as a single window.
    partial: bool,
}

fn load(common: &Common) -> Result<Loaded> {
    let mut config = ScenarioConfig::load(&common.config)
        .with_context(|| format!("reading configuration {}", common.config.display()))?;
    if let Some(g) = common.gap {
        config.solver.gap = g;
    }
    if let Some(h) = common.lookahead_hours {
        config.lookahead_hours = h;
    }
    if let Some(p) = common.periods {
        config.periods_per_day = p;
    }
    config.validate()?;
    let scenario = Scenario::from_config(&config)?;
    let mut sim = SimulationConfig::from_scenario(&config);
    let mut windows: Vec<(String, Range<usize>)> = scenario
        .days(&config)
        .into_iter()
        .map(|(d, r)| (d.to_string(), r))
        .collect();
    let partial = windows.is_empty() && scenario.trace.full_days().is_empty();
    if partial {
        let label = scenario.trace.start.date().to_string();
        windows.push((label, 0..scenario.trace.series.len()));
        sim.lookahead_hours = 0;
        if let Some(p) = common.periods {
            sim.ta_periods = Some(p);
        }
    }
    if windows.is_empty() {
        bail!("no day of the trace falls within the configured date range");
    }
    Ok(Loaded {
        config,
        scenario,
        sim,
        windows,
        partial,
    })
}

fn create_out(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))
}

fn cmd_cluster(common: &Common) -> Result<()> {
    let l = load(common)?;
    create_out(&common.out)?;
    let grid_path = common.out.join("grid.csv");
    let centroid_path = common.out.join("centroids.csv");
    let mut grid_w = csv_writer(&grid_path)?;
    let mut cent_w = csv_writer(&centroid_path)?;
    grid_w.write_record(["window", "period", "start", "end", "duration_h"])?;
    let mut header_done = false;
    for (label, range) in &l.windows {
        let series = l.scenario.trace.series.slice(range.clone())?;
        let target = match l.sim.ta_periods {
            Some(n) => n,
            None if l.partial => (series.horizon_hours() * l.sim.periods_per_day as f64 / 24.0).round().max(1.0) as usize,
            None => l.sim.periods_per_day,
        };
        let features = normalize_features(&series, l.config.clustering, Some(l.scenario.capacity))?;
        let grid = cluster_adjacent(&features, target.min(series.len()), series.step_minutes)
            .with_context(|| format!("clustering {label}"))?;
        if !header_done {
            let mut h = vec!["window".to_string(), "period".into()];
            h.extend((1..=features.cols()).map(|k| format!("feature_{k}")));
            cent_w.write_record(&h)?;
            header_done = true;
        }
        for (k, (r, d)) in grid.bounds().iter().zip(grid.durations()).enumerate() {
            grid_w.write_record([label.clone(), (k + 1).to_string(), r.start.to_string(), r.end.to_string(), d.to_string()])?;
            let mut row = vec![label.clone(), (k + 1).to_string()];
            row.extend(grid.centroids()[k].iter().map(f64::to_string));
            cent_w.write_record(&row)?;
        }
        println!("{label}: {} periods, durations {:?}", grid.n_periods(), grid.durations());
    }
    grid_w.flush()?;
    cent_w.flush()?;
    Ok(())
}

fn day_input(l: &Loaded, index: usize) -> DayInput {
    let (label, range) = &l.windows[index];
    let series = &l.scenario.trace.series;
    DayInput {
        label: label.clone(),
        series: series.slice(range.start..series.len()).expect("window lies within the trace"),
        day_points: range.len(),
        states: l.scenario.units.iter().map(|u| u.initial).collect(),
        d_prev: None,
    }
}

/// Output summed by flexibility class: base, medium, peak.
fn class_totals(dispatch: &[Vec<f64>], classes: &[FlexClass], t: usize) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (g, c) in classes.iter().enumerate() {
        let k = match c {
            FlexClass::Base => 0,
            FlexClass::Medium => 1,
            FlexClass::Peak => 2,
        };
        out[k] += dispatch[g][t];
    }
    out
}

fn cmd_plan(common: &Common, mode: ModeArg, date: Option<&str>) -> Result<()> {
    let l = load(common)?;
    create_out(&common.out)?;
    let index = match date {
        Some(d) => l
            .windows
            .iter()
            .position(|(label, _)| label == d)
            .with_context(|| format!("no simulated day {d}"))?,
        None => 0,
    };
    let input = day_input(&l, index);
    let system = PowerSystem::from_scenario(&l.scenario);
    for m in mode.modes() {
        let plan = run_day_ahead(&input, &system, m, &l.sim)?;
        let path = common.out.join(format!("plan_{}.csv", m.name().to_ascii_lowercase()));
        let mut w = csv_writer(&path)?;
        w.write_record(["period", "start", "end", "duration_h", "unit", "committed", "output_mw"])?;
        let durations = plan.durations();
        for (k, r) in plan.bounds.iter().enumerate() {
            for (g, id) in plan.unit_ids.iter().enumerate() {
                w.write_record([
                    (k + 1).to_string(),
                    r.start.to_string(),
                    r.end.to_string(),
                    durations[k].to_string(),
                    id.clone(),
                    u8::from(plan.commitment[g][k]).to_string(),
                    plan.dispatch[g][k].to_string(),
                ])?;
            }
        }
        w.flush()?;
        let solved = plan.solved.as_ref().expect("solved plan");
        println!(
            "{} {}: {} periods, objective {:.2}, day cost {:.2}",
            input.label,
            m.name(),
            plan.n_periods(),
            solved.objective,
            solved.day_cost
        );
    }
    Ok(())
}

fn print_summary(reports: &[tauc_core::simulation::ComparisonReport]) {
    let s = summarize(reports);
    let delta = s.delta_pct.map_or("n/a".to_string(), |d| format!("{d:.4}%"));
    println!(
        "days {}  C_CH {:.2}  C_TA {:.2}  dC {}  TA<CH {}  TA=CH {}  TA>CH {}",
        s.days, s.c_ch, s.c_ta, delta, s.ta_lt_ch, s.ta_eq_ch, s.ta_gt_ch
    );
}

fn cmd_compare(common: &Common) -> Result<()> {
    let l = load(common)?;
    create_out(&common.out)?;
    let system = PowerSystem::from_scenario(&l.scenario);
    let outcome = run_rolling_horizon(&l.scenario.trace.series, &l.windows, &system, &l.sim)?;
    for r in &outcome.reports {
        let delta = r.delta_pct.map_or("n/a".to_string(), |d| format!("{d:.4}%"));
        println!("{}  C_CH {:.2}  C_TA {:.2}  dC {}", r.date, r.c_ch, r.c_ta, delta);
    }
    write_reports_csv(&common.out.join("report.csv"), &outcome.reports)?;
    write_summary_csv(&common.out.join("summary.csv"), &summarize(&outcome.reports))?;
    if !outcome.skipped.is_empty() {
        let mut w = csv_writer(&common.out.join("skipped.csv"))?;
        w.write_record(["date", "reason"])?;
        for s in &outcome.skipped {
            eprintln!("warning: skipped {}: {}", s.date, s.reason);
            w.write_record([&s.date, &s.reason])?;
        }
        w.flush()?;
    }
    print_summary(&outcome.reports);
    Ok(())
}

/// Grid of renewable shares over one scenario.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepConfig {
    /// Scenario configuration, relative to the sweep file.
    scenario: PathBuf,
    alpha_wind: Vec<f64>,
    alpha_solar: Vec<f64>,
}

struct CaseResult {
    index: usize,
    alpha_wind: f64,
    alpha_solar: f64,
    outcome: Result<tauc_core::simulation::ComparisonSummary>,
}

fn cmd_sweep(common: &Common, threads: Option<usize>) -> Result<()> {
    let text = fs::read_to_string(&common.config).with_context(|| format!("reading {}", common.config.display()))?;
    let sweep: SweepConfig = serde_json::from_str(&text).with_context(|| format!("parsing {}", common.config.display()))?;
    let base = common.config.parent().unwrap_or(Path::new(""));
    let scenario_common = Common {
        config: base.join(&sweep.scenario),
        out: common.out.clone(),
        gap: common.gap,
        lookahead_hours: common.lookahead_hours,
        periods: common.periods,
    };
    let l = load(&scenario_common)?;
    create_out(&common.out)?;
    let cases: Vec<(f64, f64)> = sweep
        .alpha_wind
        .iter()
        .flat_map(|&w| sweep.alpha_solar.iter().map(move |&s| (w, s)))
        .collect();
    for &(w, s) in &cases {
        if !(0.0..=1.0).contains(&w) || !(0.0..=1.0).contains(&s) {
            bail!("renewable shares must lie in [0, 1], got ({w}, {s})");
        }
    }
    let workers = threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .clamp(1, cases.len().max(1));
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel::<CaseResult>();
    let mut results: Vec<CaseResult> = Vec::with_capacity(cases.len());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            let tx = tx.clone();
            let (l, cases, next) = (&l, &cases, &next);
            scope.spawn(move || loop {
                let index = next.fetch_add(1, Ordering::SeqCst);
                let Some(&(alpha_wind, alpha_solar)) = cases.get(index) else { break };
                let outcome = (|| {
                    let mut system = PowerSystem::from_scenario(&l.scenario);
                    system.capacity = size_renewables(&l.scenario.trace.series, alpha_wind, alpha_solar)?;
                    let r = run_rolling_horizon(&l.scenario.trace.series, &l.windows, &system, &l.sim)?;
                    Ok(summarize(&r.reports))
                })();
                if tx.send(CaseResult { index, alpha_wind, alpha_solar, outcome }).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        for r in rx {
            eprintln!("finished case alpha_wind={} alpha_solar={}", r.alpha_wind, r.alpha_solar);
            results.push(r);
        }
    });
    results.sort_by_key(|r| r.index);
    let path = common.out.join("sweep.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["alpha_wind", "alpha_solar", "days", "c_ch", "c_ta", "delta_pct", "ta_lt_ch", "ta_eq_ch", "ta_gt_ch"])?;
    for r in results {
        let s = r
            .outcome
            .with_context(|| format!("case alpha_wind={} alpha_solar={}", r.alpha_wind, r.alpha_solar))?;
        w.write_record([
            r.alpha_wind.to_string(),
            r.alpha_solar.to_string(),
            s.days.to_string(),
            s.c_ch.to_string(),
            s.c_ta.to_string(),
            s.delta_pct.map(|d| d.to_string()).unwrap_or_default(),
            s.ta_lt_ch.to_string(),
            s.ta_eq_ch.to_string(),
            s.ta_gt_ch.to_string(),
        ])?;
        println!(
            "alpha_wind {:.3}  alpha_solar {:.3}  dC {}",
            r.alpha_wind,
            r.alpha_solar,
            s.delta_pct.map_or("n/a".to_string(), |d| format!("{d:.4}%"))
        );
    }
    w.flush()?;
    Ok(())
}

fn print_plan(plan: &DayAheadPlan, classes: &[FlexClass]) {
    println!("  day-ahead ({} periods)", plan.n_periods());
    println!("    {:>6} {:>10} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9}", "period", "hours", "base", "medium", "peak", "wind", "solar", "shed");
    let durations = plan.durations();
    let schedule = plan.solved.as_ref().map(|s| &s.schedule);
    for (k, r) in plan.bounds.iter().enumerate() {
        let totals = class_totals(&plan.dispatch, classes, k);
        let (wind, solar, shed) = schedule.map_or((f64::NAN, f64::NAN, f64::NAN), |s| (s.wind[k], s.solar[k], s.shed[k]));
        println!(
            "    {:>6} {:>10} {:>9.1} {:>9.1} {:>9.1} {:>9.1} {:>9.1} {:>9.1}",
            format!("{}-{}", r.start + 1, r.end),
            durations[k],
            totals[0],
            totals[1],
            totals[2],
            wind,
            solar,
            shed
        );
    }
}

fn print_real_time(o: &ModeOutcome, classes: &[FlexClass]) {
    let s = &o.real_time.schedule;
    println!("  real-time");
    println!("    {:>6} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9}", "t", "base", "medium", "peak", "wind", "solar", "spill", "shed");
    for t in 0..o.real_time.day_points {
        let c = class_totals(&s.dispatch, classes, t);
        println!(
            "    {:>6} {:>9.1} {:>9.1} {:>9.1} {:>9.1} {:>9.1} {:>9.1} {:>9.1}",
            t + 1,
            c[0],
            c[1],
            c[2],
            s.wind[t],
            s.solar[t],
            s.wind_spill[t] + s.solar_spill[t],
            s.shed[t]
        );
    }
    println!("  real-time cost {:.2}", o.cost());
}

fn cmd_reproduce(fixture: Option<&Path>, write_fixture: Option<&Path>) -> Result<()> {
    if let Some(path) = write_fixture {
        let json = serde_json::to_string_pretty(&ExampleFixture::illustrative())?;
        fs::write(path, json + "\n").with_context(|| format!("writing {}", path.display()))?;
        return Ok(());
    }
    let fx = match fixture {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => ExampleFixture::illustrative(),
    };
    let input = fx.input()?;
    let cfg = fx.config();
    let classes: Vec<FlexClass> = fx.system.units.iter().map(|u| u.flex_class).collect();
    let mut costs = Vec::new();
    for mode in [Mode::Ch, Mode::Ta] {
        let o = simulate_mode(&input, &fx.system, mode, &cfg)?;
        println!("{} scheduling", mode.name());
        print_plan(&o.plan, &classes);
        print_real_time(&o, &classes);
        println!();
        costs.push(o.cost());
    }
    let delta = cost_delta(costs[0], costs[1])?;
    println!("cost reduction {delta:.2}%");

    if fixture.is_none() {
        println!();
        println!("published plans, replayed in real time");
        for plan in [fixtures::published_ch_plan(), fixtures::published_ta_plan()] {
            let mode = plan.mode;
            let o = replay_plan(&input, &fx.system, plan, &cfg)?;
            println!("  {} real-time cost {:.2}", mode.name(), o.cost());
        }
    }

    let mut failures = Vec::new();
    for (mode, got, want) in [("CH", costs[0], fx.golden_cost_ch), ("TA", costs[1], fx.golden_cost_ta)] {
        let ok = (got - want).abs() <= 1e-6 * want.abs().max(1.0);
        println!("{} {mode} real-time cost {got:.2}, expected {want:.2}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            failures.push(format!("{mode} cost {got:.2} != {want:.2}"));
        }
    }
    if !failures.is_empty() {
        return Err(Mismatch(failures.join("; ")).into());
    }
    Ok(())
}
