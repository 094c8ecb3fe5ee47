//! Solver-agnostic mixed-integer linear program.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for accepting a fixing value against a variable's bounds.
const FIX_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarKind {
    Binary,
    Continuous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub label: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

/// Sparse linear form, keyed by variable.
pub type Coeffs = BTreeMap<VarId, f64>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub label: String,
    pub coeffs: Coeffs,
    pub sense: Sense,
    pub rhs: f64,
}

impl Constraint {
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.coeffs.iter().map(|(v, c)| c * values[v.0]).sum()
    }

    /// Amount by which `values` violate the row (0 when satisfied).
    pub fn violation(&self, values: &[f64]) -> f64 {
        let a = self.activity(values);
        match self.sense {
            Sense::Le => (a - self.rhs).max(0.0),
            Sense::Ge => (self.rhs - a).max(0.0),
            Sense::Eq => (a - self.rhs).abs(),
        }
    }
}

/// Linear expression with a constant part, used while assembling rows.
#[derive(Debug, Clone, Default)]
pub struct LinExpr {
    terms: Coeffs,
    constant: f64,
}

impl LinExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, var: VarId, coeff: f64) -> &mut Self {
        *self.terms.entry(var).or_insert(0.0) += coeff;
        self
    }

    pub fn add_constant(&mut self, c: f64) -> &mut Self {
        self.constant += c;
        self
    }

    /// Terms with exactly zero coefficients removed, and the constant.
    pub fn into_parts(self) -> (Coeffs, f64) {
        let terms = self.terms.into_iter().filter(|(_, c)| *c != 0.0).collect();
        (terms, self.constant)
    }
}

/// A minimisation MILP with labelled variables and rows.
///
/// Fixings are kept apart from the declared bounds; [`UcModel::bounds`]
/// returns the effective bounds with fixings applied.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct UcModel {
    variables: Vec<Variable>,
    constraints: Vec<Constraint>,
    objective: Coeffs,
    objective_offset: f64,
    fixings: BTreeMap<VarId, f64>,
    #[serde(skip)]
    index: HashMap<String, VarId>,
    #[serde(skip)]
    row_labels: HashMap<String, usize>,
    pub(crate) layout: Option<super::builder::UcLayout>,
}

impl UcModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, label: impl Into<String>, kind: VarKind, lower: f64, upper: f64) -> Result<VarId> {
        let label = label.into();
        if self.index.contains_key(&label) {
            return Err(Error::invalid(format!("duplicate variable label `{label}`")));
        }
        if lower.is_nan() || upper.is_nan() || lower > upper {
            return Err(Error::invalid(format!("variable `{label}` has bounds [{lower}, {upper}]")));
        }
        let id = VarId(self.variables.len());
        self.index.insert(label.clone(), id);
        self.variables.push(Variable {
            label,
            kind,
            lower,
            upper,
        });
        Ok(id)
    }

    pub fn add_constraint(&mut self, label: impl Into<String>, coeffs: Coeffs, sense: Sense, rhs: f64) -> Result<()> {
        let label = label.into();
        if self.row_labels.contains_key(&label) {
            return Err(Error::invalid(format!("duplicate constraint label `{label}`")));
        }
        if let Some((v, _)) = coeffs.iter().find(|(v, _)| v.0 >= self.variables.len()) {
            return Err(Error::invalid(format!("constraint `{label}` references undeclared variable {}", v.0)));
        }
        self.row_labels.insert(label.clone(), self.constraints.len());
        self.constraints.push(Constraint {
            label,
            coeffs,
            sense,
            rhs,
        });
        Ok(())
    }

    /// Adds `expr sense rhs`, moving the expression constant to the right.
    pub fn add_expr_constraint(&mut self, label: impl Into<String>, expr: LinExpr, sense: Sense, rhs: f64) -> Result<()> {
        let (coeffs, constant) = expr.into_parts();
        self.add_constraint(label, coeffs, sense, rhs - constant)
    }

    pub fn set_objective(&mut self, expr: LinExpr) {
        let (coeffs, constant) = expr.into_parts();
        self.objective = coeffs;
        self.objective_offset = constant;
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, id: VarId) -> &Variable {
        &self.variables[id.0]
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn constraint(&self, label: &str) -> Option<&Constraint> {
        self.row_labels.get(label).map(|&i| &self.constraints[i])
    }

    pub fn objective(&self) -> &Coeffs {
        &self.objective
    }

    pub fn objective_offset(&self) -> f64 {
        self.objective_offset
    }

    pub fn n_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn var_by_label(&self, label: &str) -> Option<VarId> {
        self.index.get(label).copied()
    }

    pub fn binaries(&self) -> Vec<VarId> {
        self.variables
            .iter()
            .enumerate()
            .filter(|(_, v)| v.kind == VarKind::Binary)
            .map(|(i, _)| VarId(i))
            .collect()
    }

    pub fn fixings(&self) -> &BTreeMap<VarId, f64> {
        &self.fixings
    }

    /// Effective bounds, with any fixing applied.
    pub fn bounds(&self, id: VarId) -> (f64, f64) {
        match self.fixings.get(&id) {
            Some(&v) => (v, v),
            None => {
                let v = &self.variables[id.0];
                (v.lower, v.upper)
            }
        }
    }

    /// Fixes variables by label. Unknown labels and values outside the
    /// declared bounds are errors; binary fixings must be 0 or 1.
    pub fn apply_fixings<'a>(&mut self, fixings: impl IntoIterator<Item = (&'a String, &'a f64)>) -> Result<()> {
        for (label, &value) in fixings {
            let id = self
                .var_by_label(label)
                .ok_or_else(|| Error::UnknownVariable(label.clone()))?;
            let var = &self.variables[id.0];
            let out_of_bounds = !value.is_finite() || value < var.lower - FIX_TOL || value > var.upper + FIX_TOL;
            let fractional = var.kind == VarKind::Binary && (value - value.round()).abs() > FIX_TOL;
            if out_of_bounds || fractional {
                return Err(Error::FixingOutOfBounds {
                    label: label.clone(),
                    value,
                    lower: var.lower,
                    upper: var.upper,
                });
            }
            let value = match var.kind {
                VarKind::Binary => value.round(),
                VarKind::Continuous => value.clamp(var.lower, var.upper),
            };
            self.fixings.insert(id, value);
        }
        Ok(())
    }

    pub fn evaluate_objective(&self, values: &[f64]) -> f64 {
        self.objective_offset + self.objective.iter().map(|(v, c)| c * values[v.0]).sum::<f64>()
    }

    /// Removes rows whose variables are all fixed. Returns the labels of the
    /// removed rows that were violated by more than `tol`.
    pub fn drop_constant_rows(&mut self, tol: f64) -> Vec<String> {
        let mut violated = Vec::new();
        let mut kept = Vec::with_capacity(self.constraints.len());
        for row in std::mem::take(&mut self.constraints) {
            let fixed: Option<Vec<(f64, f64)>> = row
                .coeffs
                .iter()
                .map(|(v, c)| {
                    let (lo, hi) = self.bounds(*v);
                    (lo == hi).then_some((*c, lo))
                })
                .collect();
            match fixed {
                Some(terms) => {
                    let a: f64 = terms.iter().map(|(c, x)| c * x).sum();
                    let viol = match row.sense {
                        Sense::Le => a - row.rhs,
                        Sense::Ge => row.rhs - a,
                        Sense::Eq => (a - row.rhs).abs(),
                    };
                    if viol > tol {
                        violated.push(row.label.clone());
                    }
                }
                None => kept.push(row),
            }
        }
        self.constraints = kept;
        self.row_labels = self
            .constraints
            .iter()
            .enumerate()
            .map(|(i, c)| (c.label.clone(), i))
            .collect();
        violated
    }

    /// Values by label, in declaration order.
    pub fn label_values(&self, values: &[f64]) -> BTreeMap<String, f64> {
        self.variables
            .iter()
            .zip(values)
            .map(|(v, x)| (v.label.clone(), *x))
            .collect()
    }

    /// Rebuilds lookup tables after deserialisation.
    pub fn reindex(&mut self) {
        self.index = self
            .variables
            .iter()
            .enumerate()
            .map(|(i, v)| (v.label.clone(), VarId(i)))
            .collect();
        self.row_labels = self
            .constraints
            .iter()
            .enumerate()
            .map(|(i, c)| (c.label.clone(), i))
            .collect();
    }
}
