//! Leveled, alternating, semi-unbounded circuits with fan-out 1, counted
//! by accepting subtrees, and their compilation to acyclic instances.

use std::collections::{BTreeMap, HashMap};
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gadgets::{eq3_via_xor, gate_or, gate_or_table, require_verified, rewrite_instance};
use crate::hypergraph::require_acyclic;
use crate::instance::{Instance, VarId};
use crate::scalar::ComplexRat;
use crate::table::std_fns::*;
use crate::table::FuncTable;

/// Largest OR fan-in whose gate relation is written as an explicit table.
pub const MAX_OR_FAN_IN: usize = 11;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GateKind {
    And([usize; 2]),
    Or(Vec<usize>),
    /// Reads bit `index` of the input (0-based), possibly negated.
    Input { index: usize, negated: bool },
}

/// Children are gate ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gate {
    pub id: usize,
    pub level: usize,
    pub kind: GateKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    inputs: usize,
    gates: Vec<Gate>,
    root: usize,
    pos: HashMap<usize, usize>,
}

impl Circuit {
    /// Checks leveling, alternation, AND fan-in 2 and fan-out 1.
    pub fn new(inputs: usize, gates: Vec<Gate>, root: usize) -> Result<Self> {
        let bad = |m: String| Err(Error::Circuit(m));
        let mut pos = HashMap::new();
        for (i, g) in gates.iter().enumerate() {
            if pos.insert(g.id, i).is_some() {
                return bad(format!("gate id {} used twice", g.id));
            }
        }
        if !pos.contains_key(&root) {
            return bad(format!("root {root} is not a gate"));
        }
        // Level -> is_and, for levels >= 1.
        let mut level_type: BTreeMap<usize, bool> = BTreeMap::new();
        let mut parents = vec![0usize; gates.len()];
        for g in &gates {
            let children: &[usize] = match &g.kind {
                GateKind::Input { index, .. } => {
                    if g.level != 0 {
                        return bad(format!("input gate {} is at level {}", g.id, g.level));
                    }
                    if *index >= inputs {
                        return bad(format!("gate {} reads input {index} of {inputs}", g.id));
                    }
                    &[]
                }
                GateKind::And(c) => c,
                GateKind::Or(c) => {
                    if c.is_empty() {
                        return bad(format!("OR gate {} has no children", g.id));
                    }
                    c
                }
            };
            if let GateKind::And(_) | GateKind::Or(_) = g.kind {
                if g.level == 0 {
                    return bad(format!("gate {} is at level 0 but is not an input", g.id));
                }
                let is_and = matches!(g.kind, GateKind::And(_));
                if let Some(&t) = level_type.get(&g.level) {
                    if t != is_and {
                        return bad(format!("level {} mixes AND and OR gates", g.level));
                    }
                }
                level_type.insert(g.level, is_and);
            }
            for c in children {
                let Some(&ci) = pos.get(c) else {
                    return bad(format!("gate {} refers to unknown gate {c}", g.id));
                };
                if gates[ci].level + 1 != g.level {
                    return bad(format!(
                        "gate {} at level {} reads gate {c} at level {}",
                        g.id, g.level, gates[ci].level
                    ));
                }
                parents[ci] += 1;
            }
        }
        for (&l, &t) in &level_type {
            if let Some(&u) = level_type.get(&(l + 1)) {
                if t == u {
                    return bad(format!("levels {l} and {} have the same gate type", l + 1));
                }
            }
        }
        for (i, g) in gates.iter().enumerate() {
            let want = usize::from(g.id != root);
            if parents[i] != want {
                return bad(format!(
                    "gate {} has fan-out {}, expected {want}",
                    g.id, parents[i]
                ));
            }
        }
        Ok(Circuit {
            inputs,
            gates,
            root,
            pos,
        })
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn gate(&self, id: usize) -> &Gate {
        &self.gates[self.pos[&id]]
    }

    pub fn depth(&self) -> usize {
        self.gate(self.root).level
    }

    fn check_input(&self, x: &[bool]) -> Result<()> {
        if x.len() != self.inputs {
            return Err(Error::Circuit(format!(
                "input has {} bits, circuit expects {}",
                x.len(),
                self.inputs
            )));
        }
        Ok(())
    }

    /// Whether an input gate's literal is true under `x`.
    pub fn literal(&self, g: &Gate, x: &[bool]) -> Option<bool> {
        match g.kind {
            GateKind::Input { index, negated } => Some(x[index] != negated),
            _ => None,
        }
    }

    /// Gate ids with every gate after its children.
    pub fn bottom_up(&self) -> Vec<usize> {
        let mut order: Vec<&Gate> = self.gates.iter().collect();
        order.sort_by_key(|g| (g.level, g.id));
        order.into_iter().map(|g| g.id).collect()
    }
}

/// Parses a bit string such as `1011`.
pub fn parse_bits(s: &str) -> Result<Vec<bool>> {
    s.trim()
        .chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Error::Parse(format!("input bit {c:?} is not 0 or 1"))),
        })
        .collect()
}

/// Number of accepting subtrees: inputs give their literal value, AND gates
/// multiply, OR gates add.
pub fn count_subtrees(c: &Circuit, x: &[bool]) -> Result<BigUint> {
    c.check_input(x)?;
    let mut val: HashMap<usize, BigUint> = HashMap::new();
    for id in c.bottom_up() {
        let g = c.gate(id);
        let v = match &g.kind {
            GateKind::Input { .. } => {
                if c.literal(g, x) == Some(true) {
                    BigUint::one()
                } else {
                    BigUint::zero()
                }
            }
            GateKind::And([a, b]) => &val[a] * &val[b],
            GateKind::Or(ch) => ch.iter().map(|k| &val[k]).sum(),
        };
        val.insert(id, v);
    }
    Ok(val.remove(&c.root).expect("root evaluated"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CompileMode {
    /// Gate relations as explicit tables.
    Direct,
    /// Only OR3, OR2, XOR, u0, Δ0 and Δ1.
    Strict,
}

impl FromStr for CompileMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "direct" => Ok(CompileMode::Direct),
            "strict" => Ok(CompileMode::Strict),
            _ => Err(Error::Parse(format!("unknown compile mode {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompiledCircuit {
    pub instance: Instance,
    /// `scalar · count(instance)` is the number of accepting subtrees.
    pub scalar: ComplexRat,
}

/// One variable `g<id>` per gate, true when the gate is in the subtree.
pub fn compile_circuit(c: &Circuit, x: &[bool], mode: CompileMode) -> Result<CompiledCircuit> {
    c.check_input(x)?;
    let names: Vec<String> = c.gates.iter().map(|g| format!("g{}", g.id)).collect();
    let mut inst = Instance::with_vars(&names)?;
    let var = |id: usize| -> VarId { c.pos[&id] };
    let mut fan_ins = Vec::new();
    inst.push(delta1(), &[var(c.root)])?;
    for g in &c.gates {
        match &g.kind {
            GateKind::Input { .. } => {
                if c.literal(g, x) == Some(false) {
                    inst.push(delta0(), &[var(g.id)])?;
                }
            }
            GateKind::And([a, b]) => {
                inst.push(eq(3), &[var(g.id), var(*a), var(*b)])?;
            }
            GateKind::Or(ch) => {
                if ch.len() > MAX_OR_FAN_IN {
                    return Err(Error::Circuit(format!(
                        "OR gate {} has fan-in {}, above the limit {MAX_OR_FAN_IN}",
                        g.id,
                        ch.len()
                    )));
                }
                let mut vars = vec![var(g.id)];
                vars.extend(ch.iter().map(|&k| var(k)));
                inst.push(gate_or_table(ch.len()), &vars)?;
                fan_ins.push(ch.len());
            }
        }
    }
    let internal = |e: Error| Error::Internal(format!("compiled circuit: {e}"));
    require_acyclic(&inst).map_err(internal)?;
    let mut scalar = ComplexRat::one();
    if mode == CompileMode::Strict {
        fan_ins.sort_unstable();
        fan_ins.dedup();
        let mut steps: Vec<(FuncTable, _)> = vec![(eq(3), eq3_via_xor())];
        for m in fan_ins {
            steps.push((gate_or_table(m), gate_or(m)?));
        }
        for (f, g) in steps {
            require_verified(&g)?;
            let rw = rewrite_instance(&inst, &f, &g).map_err(internal)?;
            scalar = &scalar * &rw.scalar;
            inst = rw.instance;
        }
        let allowed = [or(3), or2(), xor(), u0(), delta0(), delta1()];
        if let Some(f) = inst
            .functions()
            .into_iter()
            .find(|f| !allowed.iter().any(|a| a.same_values(f)))
        {
            return Err(Error::Internal(format!(
                "strict compilation left {}",
                f.label()
            )));
        }
    }
    Ok(CompiledCircuit {
        instance: inst,
        scalar,
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GateJson {
    id: usize,
    level: usize,
    #[serde(rename = "type")]
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    children: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    input: Option<usize>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    negated: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitJson {
    inputs: usize,
    gates: Vec<GateJson>,
    root: usize,
}

impl Serialize for Circuit {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let gates = self
            .gates
            .iter()
            .map(|g| {
                let (kind, children, input, negated) = match &g.kind {
                    GateKind::And(c) => ("AND", Some(c.to_vec()), None, false),
                    GateKind::Or(c) => ("OR", Some(c.clone()), None, false),
                    GateKind::Input { index, negated } => ("INPUT", None, Some(*index), *negated),
                };
                GateJson {
                    id: g.id,
                    level: g.level,
                    kind: kind.into(),
                    children,
                    input,
                    negated,
                }
            })
            .collect();
        CircuitJson {
            inputs: self.inputs,
            gates,
            root: self.root,
        }
        .serialize(s)
    }
}

fn gate_from_json(g: GateJson) -> Result<Gate> {
    let bad = |m: &str| Error::Circuit(format!("gate {}: {m}", g.id));
    let kind = match g.kind.to_ascii_uppercase().replace('-', "_").as_str() {
        "AND" => {
            let c = g.children.as_deref().ok_or_else(|| bad("AND needs children"))?;
            if g.input.is_some() {
                return Err(bad("AND gates do not read inputs"));
            }
            match c {
                [a, b] => GateKind::And([*a, *b]),
                _ => return Err(bad("AND gates have exactly two children")),
            }
        }
        "OR" => {
            if g.input.is_some() {
                return Err(bad("OR gates do not read inputs"));
            }
            GateKind::Or(g.children.clone().ok_or_else(|| bad("OR needs children"))?)
        }
        k @ ("INPUT" | "NOT_INPUT") => {
            if g.children.is_some() {
                return Err(bad("input gates have no children"));
            }
            GateKind::Input {
                index: g.input.ok_or_else(|| bad("input gate needs \"input\""))?,
                negated: g.negated || k == "NOT_INPUT",
            }
        }
        other => return Err(bad(&format!("unknown gate type {other:?}"))),
    };
    Ok(Gate {
        id: g.id,
        level: g.level,
        kind,
    })
}

impl<'de> Deserialize<'de> for Circuit {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = CircuitJson::deserialize(d)?;
        let build = || -> Result<Circuit> {
            let gates = raw
                .gates
                .into_iter()
                .map(gate_from_json)
                .collect::<Result<Vec<_>>>()?;
            Circuit::new(raw.inputs, gates, raw.root)
        };
        build().map_err(serde::de::Error::custom)
    }
}

pub fn circuit_from_str(s: &str) -> Result<Circuit> {
    let raw: CircuitJson = serde_json::from_str(s)?;
    let gates = raw
        .gates
        .into_iter()
        .map(gate_from_json)
        .collect::<Result<Vec<_>>>()?;
    Circuit::new(raw.inputs, gates, raw.root)
}
