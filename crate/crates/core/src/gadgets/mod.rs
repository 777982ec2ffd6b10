//! Gadgets: `f(x) = λ · Σ_y Π_g g(…)` over auxiliary variables `y`, with an
//! acyclic hypergraph.
//!
//! In a [`GadgetRealization`] the target's variables are `0..arity` and the
//! auxiliaries are `arity..arity + num_aux`.

mod catalog;
mod compose;
mod pin_search;

pub use catalog::{build as catalog_build, names as catalog_names, GadgetParams};
pub use catalog::*;
pub use compose::{rewrite_instance, substitute, transitive_compose, Rewrite};
pub use pin_search::{pin_search_binary, PinSearchResult};

use std::sync::Arc;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::hypergraph::{GyoPolicy, GyoResult, Hypergraph};
use crate::instance::{Constraint, Instance, VarId};
use crate::scalar::ComplexRat;
use crate::engine::count_join_tree;
use crate::table::std_fns::{delta0, delta1};
use crate::table::{bits_of, FuncTable};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetRealization {
    pub name: String,
    pub target: Arc<FuncTable>,
    pub num_aux: usize,
    pub base: Vec<Constraint>,
    pub lambda: ComplexRat,
}

impl GadgetRealization {
    pub fn arity(&self) -> usize {
        self.target.arity()
    }

    pub fn num_vars(&self) -> usize {
        self.arity() + self.num_aux
    }

    /// Base hyperedges over all `arity + num_aux` variables.
    pub fn hypergraph(&self) -> Hypergraph {
        Hypergraph::new(
            self.base.iter().map(|c| c.var_set()).collect(),
            0..self.num_vars(),
        )
    }

    pub fn gyo(&self) -> GyoResult {
        self.hypergraph().gyo(GyoPolicy::SmallestFirst)
    }

    /// Functions used by the base, first occurrence order.
    pub fn base_functions(&self) -> Vec<Arc<FuncTable>> {
        let mut out: Vec<Arc<FuncTable>> = Vec::new();
        for c in &self.base {
            if !out.iter().any(|f| f.same_values(&c.func)) {
                out.push(c.func.clone());
            }
        }
        out
    }

    /// `λ · Σ_y Π base` at one input of the target.
    pub fn evaluate(&self, x: &[bool]) -> ComplexRat {
        let k = self.arity();
        let n = self.num_vars();
        let mut ready: Vec<Vec<&Constraint>> = vec![Vec::new(); n.max(1)];
        let mut fixed = self.lambda.clone();
        for c in &self.base {
            match c.vars.iter().max() {
                Some(&m) if m >= k => ready[m].push(c),
                _ => fixed = &fixed * c.eval_with(|v| x[v]),
            }
        }
        if fixed.is_zero() || self.num_aux == 0 {
            return fixed;
        }
        let mut assignment = vec![false; n];
        assignment[..k].copy_from_slice(x);
        sum_aux(k, &fixed, &ready, &mut assignment)
    }

    /// The base as an instance over variables `x1..xk, y1..ym`.
    pub fn to_instance(&self) -> Instance {
        let mut names: Vec<String> = (1..=self.arity()).map(|i| format!("x{i}")).collect();
        names.extend((1..=self.num_aux).map(|j| format!("y{j}")));
        let mut inst = Instance::with_vars(&names).expect("names are distinct");
        for c in &self.base {
            inst.push_unchecked(c.clone());
        }
        inst
    }

    fn check_shape(&self) -> Result<()> {
        if self.lambda.is_zero() {
            return Err(Error::ZeroScalar);
        }
        for c in &self.base {
            if c.func.arity() != c.vars.len() {
                return Err(Error::ArityMismatch {
                    arity: c.func.arity(),
                    found: c.vars.len(),
                });
            }
            if let Some(&v) = c.vars.iter().find(|&&v| v >= self.num_vars()) {
                return Err(Error::VariableOutOfRange(v));
            }
        }
        Ok(())
    }
}

fn sum_aux(
    depth: usize,
    partial: &ComplexRat,
    ready: &[Vec<&Constraint>],
    assignment: &mut [bool],
) -> ComplexRat {
    let mut total = ComplexRat::zero();
    for b in [false, true] {
        assignment[depth] = b;
        let mut w = partial.clone();
        for c in &ready[depth] {
            if w.is_zero() {
                break;
            }
            w = &w * c.eval_with(|v| assignment[v]);
        }
        if w.is_zero() {
            continue;
        }
        if depth + 1 == assignment.len() {
            total += &w;
        } else {
            total += &sum_aux(depth + 1, &w, ready, assignment);
        }
    }
    total
}

#[derive(Serialize)]
struct GadgetOut<'a> {
    name: &'a str,
    target: &'a FuncTable,
    lambda: &'a ComplexRat,
    #[serde(flatten)]
    instance: Instance,
}

impl Serialize for GadgetRealization {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GadgetOut {
            name: &self.name,
            target: &self.target,
            lambda: &self.lambda,
            instance: self.to_instance(),
        }
        .serialize(s)
    }
}

#[derive(Deserialize)]
struct GadgetIn {
    #[serde(default)]
    name: Option<String>,
    target: FuncTable,
    #[serde(default = "ComplexRat::one")]
    lambda: ComplexRat,
    #[serde(flatten)]
    rest: serde_json::Map<String, serde_json::Value>,
}

/// Reads the JSON written by serializing a realization. The first
/// `target.arity` variables are the inputs, the rest are auxiliaries.
pub fn gadget_from_str(s: &str) -> Result<GadgetRealization> {
    let raw: GadgetIn = serde_json::from_str(s)?;
    let inst: Instance = serde_json::from_value(serde_json::Value::Object(raw.rest))?;
    let k = raw.target.arity();
    if inst.num_vars() < k {
        return Err(Error::Parse(format!(
            "gadget declares {} variables but its target has arity {k}",
            inst.num_vars()
        )));
    }
    let r = GadgetRealization {
        name: raw.name.unwrap_or_else(|| "gadget".into()),
        target: Arc::new(raw.target),
        num_aux: inst.num_vars() - k,
        base: inst.constraints().to_vec(),
        lambda: raw.lambda,
    };
    r.check_shape()?;
    Ok(r)
}

/// Incremental construction of a realization.
pub struct GadgetBuilder {
    name: String,
    target: Arc<FuncTable>,
    num_aux: usize,
    base: Vec<Constraint>,
    lambda: ComplexRat,
}

impl GadgetBuilder {
    pub fn new(name: impl Into<String>, target: FuncTable) -> Self {
        GadgetBuilder {
            name: name.into(),
            target: Arc::new(target),
            num_aux: 0,
            base: Vec::new(),
            lambda: ComplexRat::one(),
        }
    }

    /// Variable of the `i`-th target input (0-based).
    pub fn x(&self, i: usize) -> VarId {
        assert!(i < self.target.arity(), "input {i} out of range");
        i
    }

    pub fn aux(&mut self) -> VarId {
        self.num_aux += 1;
        self.target.arity() + self.num_aux - 1
    }

    pub fn add(&mut self, func: impl Into<Arc<FuncTable>>, vars: &[VarId]) -> &mut Self {
        let func = func.into();
        assert_eq!(func.arity(), vars.len(), "arity mismatch in gadget base");
        self.base.push(Constraint {
            func,
            vars: vars.to_vec(),
            linked: false,
        });
        self
    }

    pub fn lambda(&mut self, lambda: ComplexRat) -> &mut Self {
        self.lambda = lambda;
        self
    }

    pub fn build(self) -> GadgetRealization {
        GadgetRealization {
            name: self.name,
            target: self.target,
            num_aux: self.num_aux,
            base: self.base,
            lambda: self.lambda,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Largest `arity + num_aux` that will be enumerated.
    pub max_vars: usize,
    /// Accept tables that came out of linking.
    pub allow_linked: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            max_vars: 20,
            allow_linked: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    /// Target input, `x_1` first.
    pub input: String,
    pub expected: ComplexRat,
    pub actual: ComplexRat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verification {
    pub gadget: String,
    pub identity_holds: bool,
    pub acyclic: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
    pub assignments: u64,
    pub gyo: GyoResult,
}

impl Verification {
    pub fn ok(&self) -> bool {
        self.identity_holds && self.acyclic
    }
}

pub fn verify_realization(r: &GadgetRealization) -> Result<Verification> {
    verify_realization_with(r, VerifyOptions::default())
}

/// Checks the defining identity at every input by enumerating all
/// auxiliary assignments, and runs GYO on the base hyperedges.
pub fn verify_realization_with(r: &GadgetRealization, opts: VerifyOptions) -> Result<Verification> {
    r.check_shape()?;
    let n = r.num_vars();
    if n > opts.max_vars {
        return Err(Error::TooManyVariables {
            vars: n,
            limit: opts.max_vars,
        });
    }
    if !opts.allow_linked && r.base.iter().any(|c| c.linked || c.func.is_linked()) {
        return Err(Error::LinkedTable(r.name.clone()));
    }
    let k = r.arity();
    let mut counterexample = None;
    for idx in 0..1usize << k {
        let x = bits_of(idx, k);
        let actual = r.evaluate(&x);
        if actual != *r.target.value(idx) {
            counterexample = Some(Counterexample {
                input: x.iter().map(|&b| if b { '1' } else { '0' }).collect(),
                expected: r.target.value(idx).clone(),
                actual,
            });
            break;
        }
    }
    let gyo = r.gyo();
    Ok(Verification {
        gadget: r.name.clone(),
        identity_holds: counterexample.is_none(),
        acyclic: gyo.acyclic,
        counterexample,
        assignments: 1u64 << n,
        gyo,
    })
}

/// Same identity check, with each input pinned by unary constraints and the
/// auxiliaries summed out by join-tree counting. Needs an acyclic base but
/// no bound on the number of auxiliaries.
pub fn verify_by_counting(r: &GadgetRealization) -> Result<Verification> {
    r.check_shape()?;
    let gyo = r.gyo();
    if !gyo.acyclic {
        return Err(Error::NotAcyclic { trace: gyo.trace });
    }
    let k = r.arity();
    let base = r.to_instance();
    let mut counterexample = None;
    for idx in 0..1usize << k {
        let x = bits_of(idx, k);
        let mut inst = base.clone();
        for (i, &b) in x.iter().enumerate() {
            inst.push(if b { delta1() } else { delta0() }, &[i])?;
        }
        let actual = &r.lambda * &count_join_tree(&inst)?.count;
        if actual != *r.target.value(idx) {
            counterexample = Some(Counterexample {
                input: x.iter().map(|&b| if b { '1' } else { '0' }).collect(),
                expected: r.target.value(idx).clone(),
                actual,
            });
            break;
        }
    }
    Ok(Verification {
        gadget: r.name.clone(),
        identity_holds: counterexample.is_none(),
        acyclic: true,
        counterexample,
        assignments: 1u64 << k,
        gyo,
    })
}

/// Verification that fails loudly: a broken identity or a cyclic
/// hypergraph becomes an error.
pub fn require_verified(r: &GadgetRealization) -> Result<Verification> {
    let v = if r.num_vars() <= VerifyOptions::default().max_vars {
        verify_realization(r)?
    } else {
        match verify_by_counting(r) {
            Err(Error::NotAcyclic { .. }) => return Err(Error::CyclicGadget(r.name.clone())),
            other => other?,
        }
    };
    if let Some(ce) = &v.counterexample {
        return Err(Error::RealizationFailed {
            gadget: r.name.clone(),
            detail: format!(
                "at input {} expected {} but got {}",
                ce.input, ce.expected, ce.actual
            ),
        });
    }
    if !v.acyclic {
        return Err(Error::CyclicGadget(r.name.clone()));
    }
    Ok(v)
}
