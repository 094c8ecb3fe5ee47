//! One PASS/FAIL line per acceptance criterion. Exits non-zero when any
//! criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::time::{Duration, Instant};

use tauc_core::aggregation::{cluster_adjacent, normalize_features, FeatureSelector};
use tauc_core::fixtures;
use tauc_core::ingestion::{build_portfolio, PortfolioId};
use tauc_core::model::{build_uc_model, effective_min_times, effective_ramp_limits, EffectiveParams};
use tauc_core::simulation::{
    cost_delta, replay_plan, run_rolling_horizon, run_rolling_horizon_with, simulate_mode, DayInput, Mode,
};
use tauc_core::solver::{brute_force_solve, solve_with_backend, Backend, BackendConfig, SolveStatus};

/// Relative tolerance on the example's real-time costs.
const COST_RTOL: f64 = 1e-6;
/// The cost reduction is stated to two decimals.
const DELTA_ATOL: f64 = 0.005;
const EXAMPLE_DELTA_PCT: f64 = 37.84;
const EXAMPLE_TIME_LIMIT: Duration = Duration::from_secs(5);
const ORACLE_INSTANCES: usize = 50;
/// Upper bound on units times periods, so every instance fits the brute force.
const ORACLE_MAX_BINARIES: usize = 18;
const ORACLE_RTOL: f64 = 1e-6;
const ORACLE_TIME_LIMIT: Duration = Duration::from_secs(60);
const PROPERTY_DAYS: u64 = 20;
const FLAT_DELTA_LIMIT_PCT: f64 = 0.1;
const ROLLING_DAYS: usize = 7;

type Outcome = (bool, String);

fn rel_close(a: f64, b: f64, rtol: f64) -> bool {
    (a - b).abs() <= rtol * b.abs().max(1.0)
}

fn illustrative_example() -> Outcome {
    let start = Instant::now();
    let (system, input, cfg) = (fixtures::system(), fixtures::input(), fixtures::config());
    let ch = simulate_mode(&input, &system, Mode::Ch, &cfg).map(|o| o.cost());
    let ta = simulate_mode(&input, &system, Mode::Ta, &cfg).map(|o| o.cost());
    let elapsed = start.elapsed();
    let (c_ch, c_ta) = match (ch, ta) {
        (Ok(a), Ok(b)) => (a, b),
        (a, b) => return (false, format!("simulation failed: {a:?} {b:?}")),
    };
    let delta = cost_delta(c_ch, c_ta).unwrap_or(f64::NAN);
    let replay = |plan| replay_plan(&input, &system, plan, &cfg).map(|o| o.cost()).unwrap_or(f64::NAN);
    let (r_ch, r_ta) = (replay(fixtures::published_ch_plan()), replay(fixtures::published_ta_plan()));
    let ok = rel_close(c_ch, fixtures::GOLDEN_COST_CH, COST_RTOL)
        && rel_close(c_ta, fixtures::GOLDEN_COST_TA, COST_RTOL)
        && (delta - EXAMPLE_DELTA_PCT).abs() <= DELTA_ATOL
        && elapsed < EXAMPLE_TIME_LIMIT;
    (
        ok,
        format!(
            "C_CH = {c_ch:.2} (want {}), C_TA = {c_ta:.2} (want {}), dC = {delta:.2}% (want {EXAMPLE_DELTA_PCT}%), \
             {:.2} s; published plans replay to {r_ch:.2} / {r_ta:.2}",
            fixtures::GOLDEN_COST_CH,
            fixtures::GOLDEN_COST_TA,
            elapsed.as_secs_f64()
        ),
    )
}

fn example_clustering() -> Outcome {
    let grid = normalize_features(&fixtures::series(), FeatureSelector::NetDemandOnly, Some(fixtures::system().capacity))
        .and_then(|f| cluster_adjacent(&f, 3, fixtures::STEP_MINUTES));
    match grid {
        Ok(g) => {
            let b = g.bounds().to_vec();
            (b == [0..4, 4..5, 5..6], format!("partition {b:?}, durations {:?} h", g.durations()))
        }
        Err(e) => (false, e.to_string()),
    }
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut r = common::rng(2024);
    let cfg = BackendConfig::default();
    let (mut optimal, mut infeasible, mut mismatches) = (0, 0, Vec::new());
    for k in 0..ORACLE_INSTANCES {
        let inst = common::random_instance(&mut r, ORACLE_MAX_BINARIES);
        let result = EffectiveParams::compute(&inst, None)
            .and_then(|p| build_uc_model(&inst, &p, None))
            .and_then(|m| Ok((solve_with_backend(&m, &cfg, &Backend::Highs)?, brute_force_solve(&m)?)));
        match result {
            Ok((h, b)) if h.status == SolveStatus::Optimal && b.status == SolveStatus::Optimal => {
                if rel_close(h.objective, b.objective, ORACLE_RTOL) {
                    optimal += 1;
                } else {
                    mismatches.push(format!("#{k}: {} vs {}", h.objective, b.objective));
                }
            }
            Ok((h, b)) if h.status == SolveStatus::Infeasible && b.status == SolveStatus::Infeasible => infeasible += 1,
            Ok((h, b)) => mismatches.push(format!("#{k}: status {:?} vs {:?}", h.status, b.status)),
            Err(e) => mismatches.push(format!("#{k}: {e}")),
        }
    }
    let elapsed = start.elapsed();
    (
        mismatches.is_empty() && elapsed < ORACLE_TIME_LIMIT,
        format!(
            "{optimal} optimal and {infeasible} infeasible agree, {} disagree {:?}, {:.1} s",
            mismatches.len(),
            mismatches,
            elapsed.as_secs_f64()
        ),
    )
}

fn hourly_degeneration() -> Outcome {
    let inst = common::hourly::fixture();
    let ours = EffectiveParams::compute(&inst, None).and_then(|p| build_uc_model(&inst, &p, None));
    match ours {
        Ok(m) => {
            let a = common::hourly::canon(&m);
            let d = common::hourly::diff(&a, &common::hourly::conventional_hourly(&inst));
            (
                d.is_empty(),
                format!("{} variables, {} rows, {} differences {:?}", a.vars.len(), a.rows.len(), d.len(), d),
            )
        }
        Err(e) => (false, e.to_string()),
    }
}

fn effective_parameters() -> Outcome {
    let units = match build_portfolio(&PortfolioId::Study13) {
        Ok(u) => u,
        Err(e) => return (false, e.to_string()),
    };
    let by_id = |id: &str| units.iter().find(|u| u.id == id).unwrap();
    // (unit, d, ramp-up limit, start-up limit, minimum up-time periods)
    let table: [(&str, f64, f64, f64, Option<usize>); 20] = [
        ("g1", 0.5, 200.0, 200.0, Some(18)),
        ("g1", 1.0, 200.0, 200.0, Some(9)),
        ("g1", 2.0, 240.0, 400.0, Some(5)),
        ("g1", 3.0, 360.0, 400.0, Some(3)),
        ("g2", 0.5, 200.0, 200.0, Some(17)),
        ("g2", 1.0, 200.0, 200.0, Some(9)),
        ("g2", 2.0, 260.0, 400.0, Some(5)),
        ("g2", 3.0, 390.0, 400.0, Some(3)),
        ("g4", 0.5, 100.0, 100.0, Some(10)),
        ("g4", 1.0, 105.0, 105.0, Some(5)),
        ("g4", 2.0, 210.0, 210.0, Some(3)),
        ("g4", 3.0, 300.0, 300.0, Some(2)),
        ("g5", 0.5, 100.0, 100.0, Some(10)),
        ("g5", 1.0, 120.0, 120.0, Some(5)),
        ("g5", 2.0, 240.0, 240.0, Some(3)),
        ("g5", 3.0, 300.0, 300.0, Some(2)),
        ("g13", 0.5, 75.0, 75.0, None),
        ("g13", 1.0, 150.0, 150.0, None),
        ("g13", 2.0, 250.0, 250.0, None),
        ("g13", 3.0, 250.0, 250.0, None),
    ];
    let mut bad = Vec::new();
    for (id, d, ru, su, ut) in table {
        let u = by_id(id);
        let durations = vec![d; (24.0 / d) as usize];
        let l = effective_ramp_limits(u, &durations, None);
        let c = effective_min_times(u, &durations);
        let mid = durations.len() / 2;
        if l.ramp_up[mid] != ru || l.ramp_down[mid] != ru || l.startup[mid] != su {
            bad.push(format!("{id} d={d}: ramp {} / start-up {}", l.ramp_up[mid], l.startup[mid]));
        }
        if ut.is_some_and(|n| c.up[0] != n || c.down[0] != n) {
            bad.push(format!("{id} d={d}: {} up periods", c.up[0]));
        }
    }
    // Mixed grid: midpoints 2, 1.25, 0.5 h.
    let l = effective_ramp_limits(by_id("g1"), &[2.0, 0.5, 0.5], None);
    if l.ramp_up != [240.0, 200.0, 200.0] {
        bad.push(format!("g1 on 2/0.5/0.5 h: {:?}", l.ramp_up));
    }
    // 8.5 h: 3+3+2+0.5 from the start, 3+2+0.5+0.5+1+3 from the second period.
    let c = effective_min_times(by_id("g2"), &[3.0, 3.0, 2.0, 0.5, 0.5, 1.0, 3.0]);
    if c.up[0] != 4 || c.up[1] != 6 {
        bad.push(format!("g2 on a mixed grid: {:?}", c.up));
    }
    (bad.is_empty(), format!("{} table rows and 2 mixed grids, {} mismatches {:?}", table.len(), bad.len(), bad))
}

fn small_system(wind_mw: f64, solar_mw: f64) -> tauc_core::simulation::PowerSystem {
    let mut units = common::small_fleet();
    common::warm_start(&mut units);
    common::synthetic_system(units, wind_mw, solar_mw)
}

fn property_suite() -> Outcome {
    let start = Instant::now();
    let cfg = common::sim_config(4);
    let system = small_system(150.0, 250.0);
    let threads = std::thread::available_parallelism().map_or(1, usize::from).min(PROPERTY_DAYS as usize);
    let next = std::sync::atomic::AtomicU64::new(0);
    let violations: Vec<String> = std::thread::scope(|scope| {
        let workers: Vec<_> = (0..threads)
            .map(|_| {
                scope.spawn(|| {
                    let mut v = Vec::new();
                    loop {
                        let k = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                        if k >= PROPERTY_DAYS {
                            return v;
                        }
                        let mut r = common::rng(1000 + k);
                        let series = common::random_trace(&mut r, 28, 30);
                        let input = DayInput {
                            day_points: 48,
                            ..DayInput::standalone(format!("day{k}"), series, system.initial_states())
                        };
                        for mode in [Mode::Ch, Mode::Ta] {
                            match simulate_mode(&input, &system, mode, &cfg) {
                                Ok(out) => v.extend(
                                    common::props::check_mode(&input, &system, &cfg, &out, true)
                                        .into_iter()
                                        .map(|e| format!("day{k} {e}")),
                                ),
                                Err(e) => v.push(format!("day{k} {}: {e}", mode.name())),
                            }
                        }
                    }
                })
            })
            .collect();
        workers.into_iter().flat_map(|w| w.join().unwrap()).collect()
    });
    (
        violations.is_empty(),
        format!(
            "{PROPERTY_DAYS} days x 2 modes, {} violations {:?}, {:.1} s",
            violations.len(),
            violations,
            start.elapsed().as_secs_f64()
        ),
    )
}

fn duck_curve() -> Outcome {
    let cfg = common::sim_config(4);
    let run = |series, system| {
        run_rolling_horizon(&series, &common::day_ranges(1, 48), &system, &cfg)
            .ok()
            .and_then(|o| o.reports.into_iter().next())
    };
    let duck = run(common::duck_day(28, 30), small_system(100.0, 600.0));
    let flat = run(common::smooth_wind_day(28, 30), small_system(300.0, 0.0));
    match (duck, flat) {
        (Some(d), Some(f)) => {
            let fd = f.delta_pct.unwrap_or(f64::NAN);
            (
                d.c_ta < d.c_ch && fd.abs() < FLAT_DELTA_LIMIT_PCT,
                format!(
                    "solar day C_CH = {:.0}, C_TA = {:.0} ({:.3}%); smooth day dC = {fd:.4}%",
                    d.c_ch,
                    d.c_ta,
                    d.delta_pct.unwrap_or(f64::NAN)
                ),
            )
        }
        _ => (false, "a synthetic day could not be simulated".into()),
    }
}

fn rolling_chaining() -> Outcome {
    let start = Instant::now();
    let mut r = common::rng(77);
    let series = common::random_trace(&mut r, ROLLING_DAYS * 24 + 4, 30);
    let system = small_system(150.0, 250.0);
    let mut seen = Vec::new();
    let out = run_rolling_horizon_with(&series, &common::day_ranges(ROLLING_DAYS, 48), &system, &common::sim_config(4), |d| {
        seen.push(d.clone())
    });
    match out {
        Ok(out) => {
            let v = common::props::chain_violations(&system.initial_states(), &seen);
            (
                out.reports.len() == ROLLING_DAYS && out.skipped.is_empty() && v.is_empty(),
                format!(
                    "{} days simulated, {} skipped, {} handover violations {:?}, {:.1} s",
                    out.reports.len(),
                    out.skipped.len(),
                    v.len(),
                    v,
                    start.elapsed().as_secs_f64()
                ),
            )
        }
        Err(e) => (false, e.to_string()),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("illustrative example costs", illustrative_example),
        ("illustrative example clustering", example_clustering),
        ("backend matches brute force", oracle_equivalence),
        ("hourly grid degenerates to conventional UC", hourly_degeneration),
        ("effective ramp and minimum-time parameters", effective_parameters),
        ("property suite on random days", property_suite),
        ("duck-curve direction", duck_curve),
        ("rolling-horizon state chaining", rolling_chaining),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let (ok, detail) = check();
        failed += usize::from(!ok);
        println!("{} [{}] {name}: {detail}", if ok { "PASS" } else { "FAIL" }, k + 1);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
