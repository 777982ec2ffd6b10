use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypergraph::{GyoPolicy, Hypergraph};
use crate::instance::{Constraint, Instance, VarId};
use crate::scalar::ComplexRat;
use crate::table::FuncTable;

use super::{require_verified, GadgetRealization};

fn expand_occurrence(
    inner: &GadgetRealization,
    inputs: &[VarId],
    mut fresh: impl FnMut(usize) -> VarId,
) -> Vec<Constraint> {
    let aux: Vec<VarId> = (0..inner.num_aux).map(&mut fresh).collect();
    let k = inner.arity();
    inner
        .base
        .iter()
        .map(|g| {
            let vars: Vec<VarId> = g
                .vars
                .iter()
                .map(|&v| if v < k { inputs[v] } else { aux[v - k] })
                .collect();
            let linked = g.linked || has_repeats(&vars);
            Constraint {
                func: g.func.clone(),
                vars,
                linked,
            }
        })
        .collect()
}

fn has_repeats(vars: &[VarId]) -> bool {
    let mut s = vars.to_vec();
    s.sort_unstable();
    s.windows(2).any(|w| w[0] == w[1])
}

/// Replaces every use of `inner.target` in `outer`'s base by `inner`'s base
/// (fresh auxiliaries per use). The scalar becomes `λ_outer · λ_inner^t`.
/// The result is verified; failure is an error.
pub fn transitive_compose(
    outer: &GadgetRealization,
    inner: &GadgetRealization,
) -> Result<GadgetRealization> {
    let uses = outer
        .base
        .iter()
        .filter(|c| c.func.same_values(&inner.target))
        .count();
    if uses == 0 {
        return Err(Error::Precondition {
            gadget: outer.name.clone(),
            violated: format!("base does not use the target of {}", inner.name),
        });
    }
    let mut num_aux = outer.num_aux;
    let first_free = outer.num_vars();
    let mut base = Vec::new();
    let mut lambda = outer.lambda.clone();
    for c in &outer.base {
        if c.func.same_values(&inner.target) {
            let start = first_free + (num_aux - outer.num_aux);
            base.extend(expand_occurrence(inner, &c.vars, |j| start + j));
            num_aux += inner.num_aux;
            lambda = &lambda * &inner.lambda;
        } else {
            base.push(c.clone());
        }
    }
    let r = GadgetRealization {
        name: format!("{}+{}", outer.name, inner.name),
        target: outer.target.clone(),
        num_aux,
        base,
        lambda,
    };
    require_verified(&r)?;
    Ok(r)
}

/// Result of replacing a function in an instance by a gadget.
/// `count(original) = scalar · count(instance)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Rewrite {
    pub instance: Instance,
    pub scalar: ComplexRat,
    pub occurrences: usize,
}

/// Replaces each constraint whose table equals `f` by the gadget's base,
/// with fresh auxiliary variables per occurrence. No acyclicity check.
pub fn substitute(inst: &Instance, f: &FuncTable, r: &GadgetRealization) -> Result<Rewrite> {
    if !r.target.same_values(f) {
        return Err(Error::Precondition {
            gadget: r.name.clone(),
            violated: format!("target differs from {}", f.label()),
        });
    }
    let mut out = Instance::with_vars(inst.var_names())?;
    let mut occurrences = 0;
    for c in inst.constraints() {
        if !c.func.same_values(f) {
            out.push_unchecked(c.clone());
            continue;
        }
        occurrences += 1;
        let stem = format!("{}{}", r.name, occurrences);
        let aux: Vec<VarId> = (0..r.num_aux)
            .map(|j| out.fresh_var(&format!("{stem}.y{}", j + 1)))
            .collect();
        for g in expand_occurrence(r, &c.vars, |j| aux[j]) {
            out.push_unchecked(g);
        }
    }
    let scalar = r
        .lambda
        .pow(occurrences as i64)
        .expect("nonnegative exponent");
    Ok(Rewrite {
        instance: out,
        scalar,
        occurrences,
    })
}

/// [`substitute`] on an acyclic instance, rejecting results whose
/// hypergraph is cyclic.
pub fn rewrite_instance(inst: &Instance, f: &FuncTable, r: &GadgetRealization) -> Result<Rewrite> {
    let before = Hypergraph::from_instance(inst).gyo(GyoPolicy::SmallestFirst);
    if !before.acyclic {
        return Err(Error::NotAcyclic {
            trace: before.trace,
        });
    }
    let rw = substitute(inst, f, r)?;
    let after = Hypergraph::from_instance(&rw.instance).gyo(GyoPolicy::SmallestFirst);
    if !after.acyclic {
        return Err(Error::RewriteNotAcyclic {
            before: before.trace,
            after: after.trace,
        });
    }
    Ok(rw)
}
