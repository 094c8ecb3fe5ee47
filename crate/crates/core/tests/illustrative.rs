use tauc_core::aggregation::{cluster_adjacent, normalize_features, FeatureSelector};
use tauc_core::fixtures;
use tauc_core::simulation::{
    cost_delta, fix_from_plan, generation_shares, replay_plan, run_day_ahead, simulate_mode, Mode,
};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

#[test]
fn grouping_of_net_demand() {
    let s = fixtures::series();
    let f = normalize_features(&s, FeatureSelector::NetDemandOnly, Some(fixtures::system().capacity)).unwrap();
    let g = cluster_adjacent(&f, 3, s.step_minutes).unwrap();
    assert_eq!(g.bounds(), &[0..4, 4..5, 5..6]);
    assert_eq!(g.durations(), vec![2.0, 0.5, 0.5]);
}

#[test]
fn published_plans_replay_to_published_costs() {
    let sys = fixtures::system();
    let cfg = fixtures::config();
    let input = fixtures::input();
    let ch = replay_plan(&input, &sys, fixtures::published_ch_plan(), &cfg).unwrap();
    let ta = replay_plan(&input, &sys, fixtures::published_ta_plan(), &cfg).unwrap();
    assert!(rel(ch.cost(), 18_500.0) < 1e-9, "{}", ch.cost());
    assert!(rel(ta.cost(), 11_500.0) < 1e-9, "{}", ta.cost());

    let rt = &ch.real_time.schedule;
    assert_eq!(rt.solar_spill[4], 200.0);
    assert!((rt.dispatch[4][5] - 100.0).abs() < 1e-6);
    assert!((rt.dispatch[5][5] - 50.0).abs() < 1e-6);
    assert!((rt.shed[5] - 100.0).abs() < 1e-6);
    let base: f64 = (0..4).map(|g| rt.dispatch[g][5]).sum();
    assert!((base - 600.0).abs() < 1e-9);

    assert!(ta.real_time.shed_energy() < 1e-9);
    assert!(ta.real_time.spilled_energy() < 1e-9);
    let shares = generation_shares(&ta.real_time, &sys.units).unwrap();
    assert!((shares.base - 100.0 * 1000.0 / 1750.0).abs() < 1e-9);
    assert!((shares.medium - 100.0 * 50.0 / 1750.0).abs() < 1e-9);
    assert!((shares.solar - 40.0).abs() < 1e-9);
    assert_eq!(shares.wind, 0.0);
    assert!((cost_delta(ch.cost(), ta.cost()).unwrap() - 37.837_837_837_837_84).abs() < 1e-9);
}

#[test]
fn literal_portfolio_optima() {
    let sys = fixtures::system();
    let cfg = fixtures::config();
    let input = fixtures::input();
    let ch = simulate_mode(&input, &sys, Mode::Ch, &cfg).unwrap();
    let ta = simulate_mode(&input, &sys, Mode::Ta, &cfg).unwrap();
    // Base minimum output 150 MW lets the day-ahead models run base units
    // below 200 MW, which moves both optima away from the published plans.
    assert!(rel(ch.cost(), 19_250.0) < 1e-9, "{}", ch.cost());
    assert!(rel(ta.cost(), 11_000.0) < 1e-9, "{}", ta.cost());
    assert_eq!(ta.plan.bounds, vec![0..4, 4..5, 5..6]);
}

#[test]
fn base_pmin_200_recovers_published_costs() {
    let sys = fixtures::system_with_units(fixtures::units_with_base_pmin(200.0));
    let cfg = fixtures::config();
    let input = fixtures::input();
    let ch = simulate_mode(&input, &sys, Mode::Ch, &cfg).unwrap();
    let ta = simulate_mode(&input, &sys, Mode::Ta, &cfg).unwrap();
    assert!(rel(ch.cost(), 18_500.0) < 1e-9, "{}", ch.cost());
    assert!(rel(ta.cost(), 11_500.0) < 1e-9, "{}", ta.cost());
}

#[test]
fn day_ahead_blocks() {
    let sys = fixtures::system_with_units(fixtures::units_with_base_pmin(200.0));
    let cfg = fixtures::config();
    let input = fixtures::input();
    let total_base = |p: &tauc_core::simulation::DayAheadPlan, k: usize| -> f64 { (0..4).map(|g| p.dispatch[g][k]).sum() };
    let ch = run_day_ahead(&input, &sys, Mode::Ch, &cfg).unwrap();
    assert!((total_base(&ch, 2) - 600.0).abs() < 1e-6);
    assert!((ch.dispatch[4][2] - 50.0).abs() < 1e-6);
    let ta = run_day_ahead(&input, &sys, Mode::Ta, &cfg).unwrap();
    assert!((total_base(&ta, 1) - 400.0).abs() < 1e-6);
    assert!((total_base(&ta, 2) - 800.0).abs() < 1e-6);
}

#[test]
fn fixings_broadcast_over_members() {
    let sys = fixtures::system();
    let f = fix_from_plan(&fixtures::published_ta_plan(), &sys.units, 6).unwrap();
    for t in 1..=4 {
        assert_eq!(f[&format!("pg_base1_{t}")], 200.0);
    }
    assert_eq!(f["u_medium1_5"], 1.0);
    assert!(!f.contains_key("pg_medium1_5"));
    assert!(!f.keys().any(|k| k.contains("peak1")));
    assert!(fix_from_plan(&fixtures::published_ta_plan(), &sys.units, 7).is_err());
}
