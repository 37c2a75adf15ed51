//! Sparse linear model with bounds, senses and integrality marks.

use std::collections::HashSet;

use crate::MilpError;

/// Handle to a variable in a [`MilpModel`]. Indexes are dense and stable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

/// Constraint sense.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub objective: f64,
    pub is_integer: bool,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub name: String,
    /// Sparse coefficient list; duplicate variable entries are summed on add.
    pub coeffs: Vec<(VarId, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// A minimization model: objective offset + coefficients over bounded variables,
/// with sparse linear constraints.
#[derive(Debug, Clone, Default)]
pub struct MilpModel {
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    /// Constant added to the objective after solving.
    pub objective_offset: f64,
}

impl MilpModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(
        &mut self,
        name: impl Into<String>,
        lower: f64,
        upper: f64,
        objective: f64,
        is_integer: bool,
    ) -> VarId {
        let id = VarId(self.variables.len());
        self.variables.push(Variable {
            name: name.into(),
            lower,
            upper,
            objective,
            is_integer,
        });
        id
    }

    pub fn add_continuous(
        &mut self,
        name: impl Into<String>,
        lower: f64,
        upper: f64,
        objective: f64,
    ) -> VarId {
        self.add_var(name, lower, upper, objective, false)
    }

    pub fn add_binary(&mut self, name: impl Into<String>, objective: f64) -> VarId {
        self.add_var(name, 0.0, 1.0, objective, true)
    }

    /// Adds a constraint, merging duplicate variable entries.
    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        coeffs: Vec<(VarId, f64)>,
        sense: Sense,
        rhs: f64,
    ) {
        let mut merged: Vec<(VarId, f64)> = Vec::with_capacity(coeffs.len());
        let mut sorted = coeffs;
        sorted.sort_by_key(|(v, _)| v.0);
        for (v, c) in sorted {
            match merged.last_mut() {
                Some((lv, lc)) if *lv == v => *lc += c,
                _ => merged.push((v, c)),
            }
        }
        merged.retain(|(_, c)| *c != 0.0);
        self.constraints.push(Constraint {
            name: name.into(),
            coeffs: merged,
            sense,
            rhs,
        });
    }

    pub fn set_objective(&mut self, var: VarId, coeff: f64) {
        self.variables[var.0].objective = coeff;
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn integer_vars(&self) -> Vec<VarId> {
        (0..self.variables.len())
            .filter(|&i| self.variables[i].is_integer)
            .map(VarId)
            .collect()
    }

    /// Checks the structural invariants: referenced variables exist, bounds are
    /// ordered, and names are unique.
    pub fn validate(&self) -> Result<(), MilpError> {
        let mut names = HashSet::with_capacity(self.variables.len() + self.constraints.len());
        for (i, v) in self.variables.iter().enumerate() {
            if v.lower > v.upper {
                return Err(MilpError::InvalidModel(format!(
                    "variable {} has lower bound {} above upper bound {}",
                    v.name, v.lower, v.upper
                )));
            }
            if v.lower.is_nan() || v.upper.is_nan() || v.objective.is_nan() {
                return Err(MilpError::InvalidModel(format!(
                    "variable {} has a NaN bound or objective",
                    v.name
                )));
            }
            if !names.insert(v.name.as_str()) {
                return Err(MilpError::InvalidModel(format!(
                    "duplicate variable name {} (index {})",
                    v.name, i
                )));
            }
        }
        for c in &self.constraints {
            if !names.insert(c.name.as_str()) {
                return Err(MilpError::InvalidModel(format!(
                    "duplicate constraint name {}",
                    c.name
                )));
            }
            for &(v, coef) in &c.coeffs {
                if v.0 >= self.variables.len() {
                    return Err(MilpError::InvalidModel(format!(
                        "constraint {} references missing variable index {}",
                        c.name, v.0
                    )));
                }
                if coef.is_nan() || coef.is_infinite() {
                    return Err(MilpError::InvalidModel(format!(
                        "constraint {} has a non-finite coefficient on {}",
                        c.name, self.variables[v.0].name
                    )));
                }
            }
            if c.rhs.is_nan() {
                return Err(MilpError::InvalidModel(format!(
                    "constraint {} has NaN right-hand side",
                    c.name
                )));
            }
        }
        Ok(())
    }

    /// Objective value of an assignment (including the constant offset).
    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective_offset
            + self
                .variables
                .iter()
                .zip(values)
                .map(|(v, x)| v.objective * x)
                .sum::<f64>()
    }

    /// Largest constraint violation of an assignment, for solution checking.
    pub fn max_violation(&self, values: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (v, x) in self.variables.iter().zip(values) {
            worst = worst.max(v.lower - x).max(x - v.upper);
        }
        for c in &self.constraints {
            let lhs: f64 = c.coeffs.iter().map(|&(v, co)| co * values[v.0]).sum();
            let viol = match c.sense {
                Sense::Le => lhs - c.rhs,
                Sense::Ge => c.rhs - lhs,
                Sense::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(viol);
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_coefficients_are_merged() {
        let mut m = MilpModel::new();
        let x = m.add_continuous("x", 0.0, 1.0, 1.0);
        m.add_constraint("c", vec![(x, 1.0), (x, 2.0)], Sense::Le, 4.0);
        assert_eq!(m.constraints[0].coeffs, vec![(x, 3.0)]);
    }

    #[test]
    fn validate_rejects_bad_bounds_and_dangling_refs() {
        let mut m = MilpModel::new();
        m.add_continuous("x", 1.0, 0.0, 0.0);
        assert!(m.validate().is_err());

        let mut m = MilpModel::new();
        m.add_continuous("x", 0.0, 1.0, 0.0);
        m.add_constraint("c", vec![(VarId(7), 1.0)], Sense::Le, 0.0);
        assert!(m.validate().is_err());
    }

    #[test]
    fn validate_rejects_duplicate_names() {
        let mut m = MilpModel::new();
        m.add_continuous("x", 0.0, 1.0, 0.0);
        m.add_continuous("x", 0.0, 1.0, 0.0);
        assert!(m.validate().is_err());
    }
}
