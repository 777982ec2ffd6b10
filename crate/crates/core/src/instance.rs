//! Constraints and instances.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::ComplexRat;
use crate::table::FuncTable;

pub type VarId = usize;

/// A function applied to a tuple of variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub func: Arc<FuncTable>,
    pub vars: Vec<VarId>,
    /// Repeated variables are only legal when this is set.
    pub linked: bool,
}

impl Constraint {
    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    /// Distinct variables in ascending order.
    pub fn var_set(&self) -> Vec<VarId> {
        let s: BTreeSet<VarId> = self.vars.iter().copied().collect();
        s.into_iter().collect()
    }

    pub fn has_repeats(&self) -> bool {
        self.var_set().len() != self.vars.len()
    }

    /// Value under a global assignment.
    pub fn eval_with(&self, value_of: impl Fn(VarId) -> bool) -> &ComplexRat {
        let idx = self
            .vars
            .iter()
            .fold(0usize, |acc, &v| (acc << 1) | value_of(v) as usize);
        self.func.value(idx)
    }
}

#[derive(Clone, Debug, Default)]
pub struct Instance {
    names: Vec<String>,
    index: HashMap<String, VarId>,
    constraints: Vec<Constraint>,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.constraints == other.constraints
    }
}

impl Eq for Instance {}

impl Instance {
    pub fn new() -> Self {
        Instance::default()
    }

    /// Instance over the given variable names, no constraints yet.
    pub fn with_vars<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let mut inst = Instance::new();
        for n in names {
            inst.add_var(n.as_ref())?;
        }
        Ok(inst)
    }

    pub fn add_var(&mut self, name: &str) -> Result<VarId> {
        if self.index.contains_key(name) {
            return Err(Error::DuplicateVariable(name.to_string()));
        }
        let id = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        Ok(id)
    }

    /// Existing id for `name`, or a new variable.
    pub fn var_or_add(&mut self, name: &str) -> VarId {
        match self.index.get(name) {
            Some(&id) => id,
            None => self.add_var(name).expect("name is fresh"),
        }
    }

    /// A variable whose name starts with `stem` and is not yet taken.
    pub fn fresh_var(&mut self, stem: &str) -> VarId {
        if !self.index.contains_key(stem) {
            return self.add_var(stem).expect("fresh");
        }
        let mut n = 1usize;
        loop {
            let name = format!("{stem}#{n}");
            if !self.index.contains_key(&name) {
                return self.add_var(&name).expect("fresh");
            }
            n += 1;
        }
    }

    pub fn var(&self, name: &str) -> Option<VarId> {
        self.index.get(name).copied()
    }

    pub fn var_name(&self, v: VarId) -> &str {
        &self.names[v]
    }

    pub fn var_names(&self) -> &[String] {
        &self.names
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    fn check(&self, func: &FuncTable, vars: &[VarId], linked: bool) -> Result<()> {
        if func.arity() != vars.len() {
            return Err(Error::ArityMismatch {
                arity: func.arity(),
                found: vars.len(),
            });
        }
        for &v in vars {
            if v >= self.names.len() {
                return Err(Error::VariableOutOfRange(v));
            }
        }
        if !linked {
            let mut seen = BTreeSet::new();
            for &v in vars {
                if !seen.insert(v) {
                    return Err(Error::RepeatedVariable {
                        constraint: self.constraints.len(),
                        var: self.names[v].clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Append a constraint with distinct variables.
    pub fn push(&mut self, func: impl Into<Arc<FuncTable>>, vars: &[VarId]) -> Result<usize> {
        self.push_constraint(func.into(), vars, false)
    }

    /// Append a constraint that may repeat variables.
    pub fn push_linked(
        &mut self,
        func: impl Into<Arc<FuncTable>>,
        vars: &[VarId],
    ) -> Result<usize> {
        self.push_constraint(func.into(), vars, true)
    }

    fn push_constraint(&mut self, func: Arc<FuncTable>, vars: &[VarId], linked: bool) -> Result<usize> {
        self.check(&func, vars, linked)?;
        self.constraints.push(Constraint {
            func,
            vars: vars.to_vec(),
            linked,
        });
        Ok(self.constraints.len() - 1)
    }

    /// Append a constraint by variable names, declaring new names on the fly.
    pub fn push_named<S: AsRef<str>>(
        &mut self,
        func: impl Into<Arc<FuncTable>>,
        names: &[S],
    ) -> Result<usize> {
        let vars: Vec<VarId> = names.iter().map(|n| self.var_or_add(n.as_ref())).collect();
        self.push(func, &vars)
    }

    pub(crate) fn push_unchecked(&mut self, c: Constraint) {
        self.constraints.push(c);
    }

    /// Variables that appear in no constraint.
    pub fn free_vars(&self) -> Vec<VarId> {
        let mut used = vec![false; self.names.len()];
        for c in &self.constraints {
            for &v in &c.vars {
                used[v] = true;
            }
        }
        (0..self.names.len()).filter(|&v| !used[v]).collect()
    }

    /// Product of all constraint values under `assignment` (indexed by
    /// variable id).
    pub fn weight(&self, assignment: &[bool]) -> ComplexRat {
        let mut acc = ComplexRat::one();
        for c in &self.constraints {
            let v = c.eval_with(|x| assignment[x]);
            if v.is_zero() {
                return ComplexRat::zero();
            }
            acc = &acc * v;
        }
        acc
    }

    /// Distinct functions used, in first-occurrence order.
    pub fn functions(&self) -> Vec<Arc<FuncTable>> {
        let mut out: Vec<Arc<FuncTable>> = Vec::new();
        for c in &self.constraints {
            if !out.iter().any(|f| f.same_values(&c.func)) {
                out.push(c.func.clone());
            }
        }
        out
    }
}
