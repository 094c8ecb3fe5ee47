//! Unit data, ex-ante parameters and the MILP formulation.

pub mod builder;
pub mod milp;
pub mod params;
pub mod schedule;
pub mod unit;

pub use builder::{build_uc_model, labels, Fixings, UcLayout};
pub use milp::{Coeffs, Constraint, LinExpr, Sense, UcModel, VarId, VarKind, Variable};
pub use params::{effective_min_times, effective_ramp_limits, EffectiveParams, MinTimeCounts, RampLimits};
pub use schedule::{extract_schedule, values_from_labels, CostBreakdown, Schedule};
pub use unit::{FlexClass, SystemInstance, ThermalUnit, UnitState};
