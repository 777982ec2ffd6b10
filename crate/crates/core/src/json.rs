//! JSON forms of functions and instances.
//!
//! Functions are written as `{"arity": k, "table": [...]}` with exact
//! `["re","im"]` entries. On input, `{"arity": k, "sym": [...]}` and
//! `{"builtin": "OR", "arity": 3}` are accepted as well, and inside a
//! constraint a bare string such as `"OR"` names a builtin whose arity is
//! taken from the variable list.

use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::scalar::ComplexRat;
use crate::table::{builtin, Builtin, FuncTable, SymTable};

#[derive(Serialize)]
struct FuncOut<'a> {
    arity: usize,
    table: &'a [ComplexRat],
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<&'a str>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    linked: bool,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FuncIn {
    arity: Option<usize>,
    table: Option<Vec<ComplexRat>>,
    sym: Option<Vec<ComplexRat>>,
    builtin: Option<String>,
    name: Option<String>,
    #[serde(default)]
    linked: bool,
}

impl FuncIn {
    fn resolve(self, arity_hint: Option<usize>) -> Result<FuncTable> {
        let forms = [self.table.is_some(), self.sym.is_some(), self.builtin.is_some()];
        if forms.iter().filter(|&&b| b).count() != 1 {
            return Err(Error::Parse(
                "a function needs exactly one of \"table\", \"sym\" or \"builtin\"".into(),
            ));
        }
        let arity = self.arity.or(arity_hint);
        let t = if let Some(values) = self.table {
            let k = match arity {
                Some(k) => k,
                None => infer_arity(values.len())?,
            };
            FuncTable::new(k, values)?
        } else if let Some(values) = self.sym {
            let s = SymTable::new(values)?;
            if let Some(k) = arity {
                if k != s.arity() {
                    return Err(Error::Parse(format!(
                        "symmetric table has {} entries but arity {k}",
                        s.arity() + 1
                    )));
                }
            }
            s.to_table()?
        } else {
            let name = self.builtin.expect("checked above");
            let k = arity.ok_or_else(|| {
                Error::Parse(format!("builtin {name:?} needs an arity"))
            })?;
            builtin(&name, k)?
        };
        let t = match self.name {
            Some(n) => t.with_name(n),
            None => t,
        };
        Ok(t.with_linked(self.linked))
    }
}

fn infer_arity(len: usize) -> Result<usize> {
    if len.is_power_of_two() {
        Ok(len.trailing_zeros() as usize)
    } else {
        Err(Error::Parse(format!("table length {len} is not a power of two")))
    }
}

impl Serialize for FuncTable {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FuncOut {
            arity: self.arity(),
            table: self.values(),
            name: self.name(),
            linked: self.is_linked(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FuncTable {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        FuncIn::deserialize(d)?
            .resolve(None)
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum FuncRef {
    Name(String),
    Obj(Box<serde_json::Value>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstraintIn {
    function: FuncRef,
    vars: Vec<String>,
    #[serde(default)]
    linked: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceIn {
    variables: Option<Vec<String>>,
    #[serde(default)]
    constraints: Vec<ConstraintIn>,
    #[serde(default)]
    #[allow(dead_code)]
    name: Option<String>,
}

#[derive(Serialize)]
struct ConstraintOut<'a> {
    function: &'a FuncTable,
    vars: Vec<&'a str>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    linked: bool,
}

#[derive(Serialize)]
struct InstanceOut<'a> {
    variables: &'a [String],
    constraints: Vec<ConstraintOut<'a>>,
}

fn resolve_ref(r: FuncRef, arity_hint: usize) -> Result<FuncTable> {
    match r {
        FuncRef::Name(n) => builtin(&n, arity_hint),
        FuncRef::Obj(v) => {
            let raw: FuncIn = serde_json::from_value(*v)?;
            raw.resolve(Some(arity_hint))
        }
    }
}

impl Serialize for Instance {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let constraints = self
            .constraints()
            .iter()
            .map(|c| ConstraintOut {
                function: &c.func,
                vars: c.vars.iter().map(|&v| self.var_name(v)).collect(),
                linked: c.linked,
            })
            .collect();
        InstanceOut {
            variables: self.var_names(),
            constraints,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Instance {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = InstanceIn::deserialize(d)?;
        build_instance(raw).map_err(serde::de::Error::custom)
    }
}

fn build_instance(raw: InstanceIn) -> Result<Instance> {
    let declared = raw.variables.is_some();
    let mut inst = match &raw.variables {
        Some(names) => Instance::with_vars(names)?,
        None => Instance::new(),
    };
    for c in raw.constraints {
        let mut vars = Vec::with_capacity(c.vars.len());
        for n in &c.vars {
            let id = match inst.var(n) {
                Some(id) => id,
                None if declared => return Err(Error::UnknownVariable(n.clone())),
                None => inst.add_var(n)?,
            };
            vars.push(id);
        }
        let func = Arc::new(resolve_ref(c.function, vars.len())?);
        if c.linked {
            inst.push_linked(func, &vars)?;
        } else {
            inst.push(func, &vars)?;
        }
    }
    Ok(inst)
}

pub fn instance_from_str(s: &str) -> Result<Instance> {
    let raw: InstanceIn = serde_json::from_str(s)?;
    build_instance(raw)
}

pub fn instance_to_string(inst: &Instance) -> String {
    serde_json::to_string_pretty(inst).expect("instances always serialize")
}

pub fn function_from_str(s: &str) -> Result<FuncTable> {
    let raw: FuncIn = serde_json::from_str(s)?;
    raw.resolve(None)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum FunctionListIn {
    List(Vec<serde_json::Value>),
    Wrapped { functions: Vec<serde_json::Value> },
}

/// A list of functions, either a bare array or `{"functions": [...]}`.
/// A bare string names a builtin at its fixed arity, or at arity 2 for the
/// variadic ones.
pub fn function_list_from_str(s: &str) -> Result<Vec<FuncTable>> {
    let items = match serde_json::from_str::<FunctionListIn>(s)? {
        FunctionListIn::List(v) | FunctionListIn::Wrapped { functions: v } => v,
    };
    items
        .into_iter()
        .map(|v| match v {
            serde_json::Value::String(n) => {
                let b: Builtin = n.parse()?;
                b.table(b.fixed_arity().unwrap_or(2))
            }
            other => {
                let raw: FuncIn = serde_json::from_value(other)?;
                raw.resolve(None)
            }
        })
        .collect()
}
