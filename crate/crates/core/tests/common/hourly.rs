//! Conventional hourly unit commitment written directly from the textbook
//! formulation with integer minimum times and raw MW/h ramp rates, plus a
//! canonical form for comparing models term by term.

use std::collections::BTreeMap;

use tauc_core::aggregation::PeriodRecord;
use tauc_core::model::{FlexClass, Sense, SystemInstance, ThermalUnit, UcModel, UnitState, VarKind};

/// Fixed-point value used for exact comparison.
fn q(x: f64) -> i64 {
    (x * 1e6).round() as i64
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Row {
    pub terms: Vec<(String, i64)>,
    /// 'L' or 'E'; greater-or-equal rows are negated.
    pub sense: char,
    pub rhs: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Canon {
    pub vars: BTreeMap<String, (bool, i64, i64)>,
    pub objective: BTreeMap<String, i64>,
    pub offset: i64,
    pub rows: Vec<Row>,
}

fn canon_row(lhs: &BTreeMap<String, f64>, constant: f64, sense: char, rhs: f64) -> Row {
    // lhs + constant (sense) rhs
    let mut terms: Vec<(String, i64)> = lhs
        .iter()
        .map(|(k, v)| (k.clone(), q(*v)))
        .filter(|(_, v)| *v != 0)
        .collect();
    let mut rhs = q(rhs - constant);
    let mut sense = sense;
    if sense == 'G' {
        terms.iter_mut().for_each(|t| t.1 = -t.1);
        rhs = -rhs;
        sense = 'L';
    }
    if sense == 'E' && terms.first().is_some_and(|t| t.1 < 0) {
        terms.iter_mut().for_each(|t| t.1 = -t.1);
        rhs = -rhs;
    }
    Row { terms, sense, rhs }
}

pub fn canon(model: &UcModel) -> Canon {
    let vars = model
        .variables()
        .iter()
        .map(|v| {
            let hi = if v.upper.is_finite() { q(v.upper) } else { i64::MAX };
            (v.label.clone(), (v.kind == VarKind::Binary, q(v.lower), hi))
        })
        .collect();
    let label = |id: tauc_core::model::VarId| model.variable(id).label.clone();
    let objective = model
        .objective()
        .iter()
        .map(|(v, c)| (label(*v), q(*c)))
        .filter(|(_, c)| *c != 0)
        .collect();
    let mut rows: Vec<Row> = model
        .constraints()
        .iter()
        .map(|c| {
            let lhs = c.coeffs.iter().map(|(v, x)| (label(*v), *x)).collect();
            let sense = match c.sense {
                Sense::Le => 'L',
                Sense::Ge => 'G',
                Sense::Eq => 'E',
            };
            canon_row(&lhs, 0.0, sense, c.rhs)
        })
        .collect();
    rows.sort();
    Canon {
        vars,
        objective,
        offset: q(model.objective_offset()),
        rows,
    }
}

/// Linear expression over labels with a constant.
#[derive(Default)]
struct Expr {
    terms: BTreeMap<String, f64>,
    constant: f64,
}

impl Expr {
    fn var(&mut self, name: String, c: f64) -> &mut Self {
        *self.terms.entry(name).or_insert(0.0) += c;
        self
    }
    fn constant(&mut self, c: f64) -> &mut Self {
        self.constant += c;
        self
    }
}

/// The hourly model. Requires `d_t = 1`, integer minimum times and ramp
/// rates within `[pmin, pmax]`.
pub fn conventional_hourly(inst: &SystemInstance) -> Canon {
    let n = inst.periods.len();
    let u = |g: &str, t: usize| format!("u_{g}_{t}");
    let p = |g: &str, t: usize| format!("pg_{g}_{t}");
    let s = |g: &str, t: usize| format!("su_{g}_{t}");
    let mut vars = BTreeMap::new();
    let mut rows: Vec<Row> = Vec::new();
    let mut push = |e: Expr, sense: char, rhs: f64| rows.push(canon_row(&e.terms, e.constant, sense, rhs));
    let mut objective = BTreeMap::new();
    let mut offset = 0.0;

    for t in 1..=n {
        let per = &inst.periods[t - 1];
        vars.insert(format!("pw_{t}"), (false, 0, q(per.wind_cf * inst.wind_capacity)));
        vars.insert(format!("ps_{t}"), (false, 0, q(per.solar_cf * inst.solar_capacity)));
        vars.insert(format!("pd_{t}"), (false, 0, q(per.demand_mw)));
        objective.insert(format!("pd_{t}"), q(-inst.load_shed_cost));
        offset += inst.load_shed_cost * per.demand_mw;
        let mut e = Expr::default();
        for g in &inst.units {
            e.var(p(&g.id, t), 1.0);
        }
        e.var(format!("pw_{t}"), 1.0).var(format!("ps_{t}"), 1.0).var(format!("pd_{t}"), -1.0);
        push(e, 'E', 0.0);
    }

    for g in &inst.units {
        let id = g.id.as_str();
        let ru = g.ramp_up.unwrap();
        let rd = g.ramp_down.unwrap();
        let su = g.startup_ramp.unwrap();
        let sd = g.shutdown_ramp.unwrap();
        let v0 = g.initial.u0();
        let p0 = g.initial.output_mw;
        let ut = g.min_up as usize;
        let dt = g.min_down as usize;
        // Previous-period commitment/output as an expression term.
        let prev_u = |e: &mut Expr, t: usize, c: f64| {
            if t == 1 {
                e.constant(c * v0);
            } else {
                e.var(u(id, t - 1), c);
            }
        };
        for t in 1..=n {
            vars.insert(u(id, t), (true, 0, q(1.0)));
            vars.insert(p(id, t), (false, 0, q(g.pmax)));
            vars.insert(s(id, t), (false, 0, i64::MAX));
            objective.insert(p(id, t), q(g.marginal_cost));
            objective.insert(s(id, t), q(1.0));

            // pmin u <= p <= pmax u
            let mut e = Expr::default();
            e.var(p(id, t), 1.0).var(u(id, t), -g.pmin);
            push(e, 'G', 0.0);
            let mut e = Expr::default();
            e.var(p(id, t), 1.0).var(u(id, t), -g.pmax);
            push(e, 'L', 0.0);

            // s >= CSU (u_t - u_{t-1})
            let mut e = Expr::default();
            e.var(s(id, t), 1.0).var(u(id, t), -g.startup_cost);
            prev_u(&mut e, t, g.startup_cost);
            push(e, 'G', 0.0);

            // p_t - p_{t-1} - RU u_{t-1} - SU (u_t - u_{t-1}) - pmax (1 - u_t) <= 0
            let mut e = Expr::default();
            e.var(p(id, t), 1.0);
            if t == 1 {
                e.constant(-p0);
            } else {
                e.var(p(id, t - 1), -1.0);
            }
            prev_u(&mut e, t, -ru);
            e.var(u(id, t), -su);
            prev_u(&mut e, t, su);
            e.constant(-g.pmax).var(u(id, t), g.pmax);
            push(e, 'L', 0.0);

            // p_{t-1} - p_t - RD u_t - SD (u_{t-1} - u_t) - pmax (1 - u_{t-1}) <= 0
            let mut e = Expr::default();
            e.var(p(id, t), -1.0);
            if t == 1 {
                e.constant(p0);
            } else {
                e.var(p(id, t - 1), 1.0);
            }
            e.var(u(id, t), -rd);
            prev_u(&mut e, t, -sd);
            e.var(u(id, t), sd);
            e.constant(-g.pmax);
            prev_u(&mut e, t, g.pmax);
            push(e, 'L', 0.0);

            // p_t <= pmax u_{t+1} + SD (u_t - u_{t+1})
            if t < n {
                let mut e = Expr::default();
                e.var(p(id, t), 1.0)
                    .var(u(id, t + 1), -g.pmax)
                    .var(u(id, t), -sd)
                    .var(u(id, t + 1), sd);
                push(e, 'L', 0.0);
            }
        }

        // Minimum up time.
        if ut > 0 {
            let l = ((ut as f64 - g.initial.hours_on) * v0).clamp(0.0, n as f64) as usize;
            if l > 0 {
                let mut e = Expr::default();
                for t in 1..=l {
                    e.constant(1.0).var(u(id, t), -1.0);
                }
                push(e, 'E', 0.0);
            }
            for t in l + 1..=(n + 1).saturating_sub(ut) {
                let mut e = Expr::default();
                for tau in t..t + ut {
                    e.var(u(id, tau), 1.0);
                }
                e.var(u(id, t), -(ut as f64));
                prev_u(&mut e, t, ut as f64);
                push(e, 'G', 0.0);
            }
            for t in (n + 2).saturating_sub(ut).max(1)..=n {
                let mut e = Expr::default();
                for tau in t..=n {
                    e.var(u(id, tau), 1.0).var(u(id, t), -1.0);
                    prev_u(&mut e, t, 1.0);
                }
                push(e, 'G', 0.0);
            }
        }

        // Minimum down time.
        if dt > 0 {
            let f = ((dt as f64 - g.initial.hours_off) * (1.0 - v0)).clamp(0.0, n as f64) as usize;
            if f > 0 {
                let mut e = Expr::default();
                for t in 1..=f {
                    e.var(u(id, t), 1.0);
                }
                push(e, 'E', 0.0);
            }
            for t in f + 1..=(n + 1).saturating_sub(dt) {
                let mut e = Expr::default();
                for tau in t..t + dt {
                    e.constant(1.0).var(u(id, tau), -1.0);
                }
                prev_u(&mut e, t, -(dt as f64));
                e.var(u(id, t), dt as f64);
                push(e, 'G', 0.0);
            }
            for t in (n + 2).saturating_sub(dt).max(1)..=n {
                let mut e = Expr::default();
                for tau in t..=n {
                    e.constant(1.0).var(u(id, tau), -1.0);
                    prev_u(&mut e, t, -1.0);
                    e.var(u(id, t), 1.0);
                }
                push(e, 'G', 0.0);
            }
        }
    }
    rows.sort();
    Canon {
        vars,
        objective: objective.into_iter().filter(|(_, c)| *c != 0).collect(),
        offset: q(offset),
        rows,
    }
}

/// Human-readable differences between two canonical models.
pub fn diff(a: &Canon, b: &Canon) -> Vec<String> {
    let mut out = Vec::new();
    if a.vars != b.vars {
        for (k, v) in &a.vars {
            if b.vars.get(k) != Some(v) {
                out.push(format!("variable {k}: {v:?} vs {:?}", b.vars.get(k)));
            }
        }
        for k in b.vars.keys().filter(|k| !a.vars.contains_key(*k)) {
            out.push(format!("variable {k} only in second model"));
        }
    }
    if a.objective != b.objective {
        out.push("objective coefficients differ".into());
    }
    if a.offset != b.offset {
        out.push(format!("objective offset {} vs {}", a.offset, b.offset));
    }
    let (mut i, mut j) = (0, 0);
    while i < a.rows.len() || j < b.rows.len() {
        match (a.rows.get(i), b.rows.get(j)) {
            (Some(x), Some(y)) if x == y => {
                i += 1;
                j += 1;
            }
            (Some(x), Some(y)) if x < y => {
                out.push(format!("row only in first: {x:?}"));
                i += 1;
            }
            (Some(_), Some(y)) | (None, Some(y)) => {
                out.push(format!("row only in second: {y:?}"));
                j += 1;
            }
            (Some(x), None) => {
                out.push(format!("row only in first: {x:?}"));
                i += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

/// Two units over four hours with every ramp and minimum time active.
pub fn fixture() -> SystemInstance {
    let g1 = ThermalUnit {
        ramp_up: Some(60.0),
        ramp_down: Some(70.0),
        startup_ramp: Some(80.0),
        shutdown_ramp: Some(90.0),
        min_up: 2.0,
        min_down: 2.0,
        startup_cost: 300.0,
        initial: UnitState::online(1.0, 100.0),
        ..ThermalUnit::simple("g1", FlexClass::Base, 50.0, 150.0, 20.0)
    };
    let g2 = ThermalUnit {
        ramp_up: Some(40.0),
        ramp_down: Some(50.0),
        startup_ramp: Some(30.0),
        shutdown_ramp: Some(60.0),
        min_up: 3.0,
        min_down: 1.0,
        startup_cost: 100.0,
        initial: UnitState::offline(2.0),
        ..ThermalUnit::simple("g2", FlexClass::Peak, 20.0, 100.0, 40.0)
    };
    let period = |d, w, s| PeriodRecord {
        duration_h: 1.0,
        demand_mw: d,
        wind_cf: w,
        solar_cf: s,
    };
    SystemInstance {
        units: vec![g1, g2],
        wind_capacity: 40.0,
        solar_capacity: 30.0,
        load_shed_cost: 500.0,
        periods: vec![
            period(120.0, 0.5, 0.0),
            period(180.0, 0.25, 0.5),
            period(210.0, 0.0, 1.0),
            period(90.0, 1.0, 0.2),
        ],
    }
}
