//! Exact evaluation of `count(I) = Σ_σ Π_i f_i(σ(var(C_i)))`.
//!
//! Three counters share one contract: brute-force enumeration, dynamic
//! programming over a join forest, and parity propagation for instances
//! built only from `EQ2`, `XOR`, unaries and scalars.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::classify::ed_decompose;
use crate::error::{Error, Result};
use crate::hypergraph::{join_forest, JoinForest};
use crate::instance::{Constraint, Instance, VarId};
use crate::scalar::ComplexRat;
use crate::table::{std_fns, FuncTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Brute,
    JoinTree,
    EdPath,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Brute => "brute",
            Method::JoinTree => "jointree",
            Method::EdPath => "edpath",
        })
    }
}

/// What the caller asks for; `Auto` picks the ED path when every function is
/// in ED and the join tree otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MethodChoice {
    #[default]
    Auto,
    Brute,
    JoinTree,
    Ed,
}

impl FromStr for MethodChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(MethodChoice::Auto),
            "brute" => Ok(MethodChoice::Brute),
            "jointree" => Ok(MethodChoice::JoinTree),
            "ed" => Ok(MethodChoice::Ed),
            _ => Err(Error::Parse(format!("unknown method {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CountStats {
    /// Assignments (brute), forest nodes (join tree) or variables (ED path)
    /// touched.
    pub nodes_visited: u64,
    /// Largest per-node table.
    pub max_table: usize,
    /// Sum of all per-node table sizes.
    pub table_entries: usize,
    /// Variables in no constraint.
    pub free_vars: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountResult {
    pub count: ComplexRat,
    pub method: Method,
    pub stats: CountStats,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest instance `count_brute` will enumerate.
    pub brute_max_vars: usize,
    /// Largest number of distinct variables in one constraint for the DP.
    pub dp_max_arity: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            brute_max_vars: 24,
            dp_max_arity: 16,
        }
    }
}

fn pow2(k: usize) -> ComplexRat {
    ComplexRat::from(num_bigint::BigInt::from(1u8) << k)
}

pub fn count(inst: &Instance, choice: MethodChoice) -> Result<CountResult> {
    let limits = Limits::default();
    match choice {
        MethodChoice::Brute => count_brute_with(inst, limits.brute_max_vars),
        MethodChoice::JoinTree => count_join_tree_with(inst, limits.dp_max_arity),
        MethodChoice::Ed => match ed_factor(inst) {
            Some(factored) => count_ed_path(&factored),
            None => {
                let bad = inst
                    .constraints()
                    .iter()
                    .position(|c| !crate::classify::is_ed(&c.func))
                    .expect("ed_factor only fails on a non-ED function");
                Err(Error::NotEdConstraint(bad))
            }
        },
        MethodChoice::Auto => {
            if let Some(factored) = ed_factor(inst) {
                crate::hypergraph::require_acyclic(inst)?;
                count_ed_path(&factored)
            } else {
                count_join_tree_with(inst, limits.dp_max_arity)
            }
        }
    }
}

pub fn count_brute(inst: &Instance) -> Result<CountResult> {
    count_brute_with(inst, Limits::default().brute_max_vars)
}

/// Enumerates every assignment, skipping subtrees whose partial product is
/// already zero.
pub fn count_brute_with(inst: &Instance, limit: usize) -> Result<CountResult> {
    let n = inst.num_vars();
    if n > limit {
        return Err(Error::TooManyVariables { vars: n, limit });
    }
    // constraints become evaluable once their highest variable is set
    let mut ready: Vec<Vec<&Constraint>> = vec![Vec::new(); n];
    let mut base = ComplexRat::one();
    for c in inst.constraints() {
        match c.vars.iter().max() {
            Some(&m) => ready[m].push(c),
            None => base = &base * c.func.value(0),
        }
    }
    let mut stats = CountStats {
        free_vars: inst.free_vars().len(),
        ..CountStats::default()
    };
    if base.is_zero() || n == 0 {
        stats.nodes_visited = 1;
        return Ok(CountResult {
            count: base,
            method: Method::Brute,
            stats,
        });
    }
    let mut assignment = vec![false; n];
    let total = brute_rec(0, &base, &ready, &mut assignment, &mut stats.nodes_visited);
    Ok(CountResult {
        count: total,
        method: Method::Brute,
        stats,
    })
}

fn brute_rec(
    depth: usize,
    partial: &ComplexRat,
    ready: &[Vec<&Constraint>],
    assignment: &mut [bool],
    visited: &mut u64,
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
            *visited += 1;
            total += &w;
        } else {
            total += &brute_rec(depth + 1, &w, ready, assignment, visited);
        }
    }
    total
}

/// Per-node view used by the DP: distinct variables and how each position
/// of the constraint maps into them.
struct NodeShape {
    vars: Vec<VarId>,
    positions: Vec<usize>,
}

impl NodeShape {
    fn new(c: &Constraint) -> Self {
        let vars = c.var_set();
        let positions = c
            .vars
            .iter()
            .map(|v| vars.binary_search(v).expect("var_set contains every var"))
            .collect();
        NodeShape { vars, positions }
    }

    /// Table index of the constraint for a local assignment `local`
    /// (bit `p` of `local`, counted from the most significant end, is
    /// `vars[p]`).
    fn func_index(&self, local: usize) -> usize {
        let m = self.vars.len();
        self.positions
            .iter()
            .fold(0usize, |acc, &p| (acc << 1) | ((local >> (m - 1 - p)) & 1))
    }
}

/// Shared variables of `child` and `parent`, as positions on both sides.
fn shared_positions(child: &NodeShape, parent: &NodeShape) -> Vec<(usize, usize)> {
    child
        .vars
        .iter()
        .enumerate()
        .filter_map(|(ci, v)| parent.vars.binary_search(v).ok().map(|pi| (ci, pi)))
        .collect()
}

fn project_bits(local: usize, width: usize, pos: impl Iterator<Item = usize>) -> usize {
    pos.fold(0usize, |acc, p| (acc << 1) | ((local >> (width - 1 - p)) & 1))
}

pub fn count_join_tree(inst: &Instance) -> Result<CountResult> {
    count_join_tree_with(inst, Limits::default().dp_max_arity)
}

/// Post-order DP over the join forest. Child tables are summed onto the
/// variables shared with the parent and multiplied in.
pub fn count_join_tree_with(inst: &Instance, max_arity: usize) -> Result<CountResult> {
    let forest = join_forest(inst)?;
    let (tables, stats) = dp_tables(inst, &forest, max_arity)?;
    let mut total = pow2(stats.free_vars);
    for &r in &forest.roots {
        let s: ComplexRat = tables[r].iter().cloned().sum();
        total = &total * &s;
        if total.is_zero() {
            break;
        }
    }
    Ok(CountResult {
        count: total,
        method: Method::JoinTree,
        stats,
    })
}

type DpOutput = (Vec<Vec<ComplexRat>>, CountStats);

fn dp_tables(inst: &Instance, forest: &JoinForest, max_arity: usize) -> Result<DpOutput> {
    let cs = inst.constraints();
    let shapes: Vec<NodeShape> = cs.iter().map(NodeShape::new).collect();
    for (i, s) in shapes.iter().enumerate() {
        if s.vars.len() > max_arity {
            return Err(Error::TableTooLarge {
                constraint: i,
                arity: s.vars.len(),
                limit: max_arity,
            });
        }
    }
    let mut stats = CountStats {
        free_vars: inst.free_vars().len(),
        ..CountStats::default()
    };
    let mut tables: Vec<Vec<ComplexRat>> = vec![Vec::new(); cs.len()];
    for n in forest.post_order() {
        let shape = &shapes[n];
        let m = shape.vars.len();
        let mut table: Vec<ComplexRat> = (0..1usize << m)
            .map(|local| cs[n].func.value(shape.func_index(local)).clone())
            .collect();
        for &c in &forest.children[n] {
            let child = &shapes[c];
            let shared = shared_positions(child, shape);
            let cw = child.vars.len();
            let mut msg = vec![ComplexRat::zero(); 1usize << shared.len()];
            for (local, v) in tables[c].iter().enumerate() {
                if v.is_zero() {
                    continue;
                }
                let key = project_bits(local, cw, shared.iter().map(|&(ci, _)| ci));
                msg[key] += v;
            }
            tables[c] = Vec::new();
            for (local, entry) in table.iter_mut().enumerate() {
                if entry.is_zero() {
                    continue;
                }
                let key = project_bits(local, m, shared.iter().map(|&(_, pi)| pi));
                *entry = &*entry * &msg[key];
            }
        }
        stats.nodes_visited += 1;
        stats.max_table = stats.max_table.max(table.len());
        stats.table_entries += table.len();
        tables[n] = table;
    }
    Ok((tables, stats))
}

/// Local assignment of one constraint: its distinct variables and their
/// values.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalAssignment {
    pub constraint: usize,
    pub vars: Vec<VarId>,
    pub bits: Vec<bool>,
}

impl LocalAssignment {
    pub fn value_of(&self, v: VarId) -> Option<bool> {
        self.vars.binary_search(&v).ok().map(|p| self.bits[p])
    }

    /// Same values on every shared variable.
    pub fn agrees(&self, other: &LocalAssignment) -> bool {
        self.vars
            .iter()
            .zip(&self.bits)
            .all(|(&v, &b)| other.value_of(v).is_none_or(|o| o == b))
    }
}

/// Pairwise agreeing nonzero local assignments along the join forest, one
/// per constraint, or `None` when no global assignment has nonzero weight.
pub fn witness_chain(inst: &Instance) -> Result<Option<Vec<LocalAssignment>>> {
    let forest = join_forest(inst)?;
    let cs = inst.constraints();
    let shapes: Vec<NodeShape> = cs.iter().map(NodeShape::new).collect();
    // feasible[n][local]: local is nonzero and every child has an agreeing
    // feasible entry
    let mut feasible: Vec<Vec<bool>> = vec![Vec::new(); cs.len()];
    for n in forest.post_order() {
        let shape = &shapes[n];
        let m = shape.vars.len();
        let mut row: Vec<bool> = (0..1usize << m)
            .map(|l| !cs[n].func.value(shape.func_index(l)).is_zero())
            .collect();
        for &c in &forest.children[n] {
            let shared = shared_positions(&shapes[c], shape);
            let cw = shapes[c].vars.len();
            let mut ok = vec![false; 1usize << shared.len()];
            for (l, &f) in feasible[c].iter().enumerate() {
                if f {
                    ok[project_bits(l, cw, shared.iter().map(|&(ci, _)| ci))] = true;
                }
            }
            for (l, r) in row.iter_mut().enumerate() {
                *r = *r && ok[project_bits(l, m, shared.iter().map(|&(_, pi)| pi))];
            }
        }
        feasible[n] = row;
    }
    let mut chosen: Vec<Option<usize>> = vec![None; cs.len()];
    for &r in &forest.roots {
        let Some(l) = feasible[r].iter().position(|&f| f) else {
            return Ok(None);
        };
        chosen[r] = Some(l);
    }
    // top-down: pick a feasible child entry agreeing with the parent
    let mut order = forest.post_order();
    order.reverse();
    for n in order {
        let Some(p) = forest.parent[n] else { continue };
        let pl = chosen[p].expect("parents are chosen first");
        let shared = shared_positions(&shapes[n], &shapes[p]);
        let (cw, pw) = (shapes[n].vars.len(), shapes[p].vars.len());
        let want = project_bits(pl, pw, shared.iter().map(|&(_, pi)| pi));
        let l = (0..feasible[n].len())
            .find(|&l| {
                feasible[n][l] && project_bits(l, cw, shared.iter().map(|&(ci, _)| ci)) == want
            })
            .ok_or_else(|| Error::Internal("feasibility table lost an agreeing child".into()))?;
        chosen[n] = Some(l);
    }
    Ok(Some(
        chosen
            .into_iter()
            .enumerate()
            .map(|(i, l)| {
                let l = l.expect("every node is chosen");
                let m = shapes[i].vars.len();
                LocalAssignment {
                    constraint: i,
                    vars: shapes[i].vars.clone(),
                    bits: (0..m).map(|p| (l >> (m - 1 - p)) & 1 == 1).collect(),
                }
            })
            .collect(),
    ))
}

fn is_eq2(f: &FuncTable) -> bool {
    f.arity() == 2 && f.same_values(&std_fns::eq2())
}

fn is_xor(f: &FuncTable) -> bool {
    f.arity() == 2 && f.same_values(&std_fns::xor())
}

/// Counts instances made of `EQ2`, `XOR`, unary and arity-0 constraints by
/// fixing one root value per connected component and propagating parities.
/// Cycles are allowed; inconsistent parities give a zero component.
pub fn count_ed_path(inst: &Instance) -> Result<CountResult> {
    let n = inst.num_vars();
    let mut unary: Vec<[ComplexRat; 2]> = vec![[ComplexRat::one(), ComplexRat::one()]; n];
    let mut scalar = ComplexRat::one();
    let mut adj: Vec<Vec<(VarId, bool)>> = vec![Vec::new(); n];
    let mut self_loops: Vec<(VarId, bool)> = Vec::new();
    for (i, c) in inst.constraints().iter().enumerate() {
        let f = &c.func;
        match c.vars.len() {
            0 => scalar = &scalar * f.value(0),
            1 => {
                let u = &mut unary[c.vars[0]];
                u[0] = &u[0] * f.value(0);
                u[1] = &u[1] * f.value(1);
            }
            2 if is_eq2(f) || is_xor(f) => {
                let (a, b, x) = (c.vars[0], c.vars[1], is_xor(f));
                if a == b {
                    self_loops.push((a, x));
                } else {
                    adj[a].push((b, x));
                    adj[b].push((a, x));
                }
            }
            _ => return Err(Error::NotEdConstraint(i)),
        }
    }
    let mut stats = CountStats {
        free_vars: inst.free_vars().len(),
        ..CountStats::default()
    };
    let mut total = scalar;
    let mut parity: Vec<Option<bool>> = vec![None; n];
    for root in 0..n {
        if parity[root].is_some() {
            continue;
        }
        parity[root] = Some(false);
        let mut comp = vec![root];
        let mut consistent = true;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            stats.nodes_visited += 1;
            let pu = parity[u].expect("queued vertices have a parity");
            for &(w, x) in &adj[u] {
                match parity[w] {
                    None => {
                        parity[w] = Some(pu ^ x);
                        comp.push(w);
                        queue.push_back(w);
                    }
                    Some(pw) => consistent &= pw == pu ^ x,
                }
            }
        }
        let comp_total = if !consistent {
            ComplexRat::zero()
        } else {
            [false, true]
                .iter()
                .map(|&r| {
                    comp.iter()
                        .map(|&v| unary[v][(r ^ parity[v].expect("set")) as usize].clone())
                        .product::<ComplexRat>()
                })
                .sum()
        };
        total = &total * &comp_total;
    }
    // EQ2(v,v) is 1, XOR(v,v) is 0
    if self_loops.iter().any(|&(_, x)| x) {
        total = ComplexRat::zero();
    }
    Ok(CountResult {
        count: total,
        method: Method::EdPath,
        stats,
    })
}

/// Rewrites every constraint into `EQ2`, `XOR`, unaries and scalars when
/// all functions are in ED; `None` otherwise. The variable set is unchanged.
pub fn ed_factor(inst: &Instance) -> Option<Instance> {
    let mut out = Instance::with_vars(inst.var_names()).expect("names are distinct");
    let eq2 = Arc::new(std_fns::eq2());
    let xor = Arc::new(std_fns::xor());
    for c in inst.constraints() {
        let f = &c.func;
        if c.vars.len() <= 1 || is_eq2(f) || is_xor(f) {
            out.push_unchecked(c.clone());
            continue;
        }
        let d = ed_decompose(f)?;
        out.push_unchecked(Constraint {
            func: Arc::new(FuncTable::scalar(d.scalar.clone())),
            vars: Vec::new(),
            linked: false,
        });
        for &(r, i, x) in &d.links {
            let func = if x { xor.clone() } else { eq2.clone() };
            out.push_unchecked(Constraint {
                func,
                vars: vec![c.vars[r], c.vars[i]],
                linked: c.vars[r] == c.vars[i],
            });
        }
        for (r, u) in &d.unaries {
            out.push_unchecked(Constraint {
                func: Arc::new(FuncTable::unary(u[0].clone(), u[1].clone())),
                vars: vec![c.vars[*r]],
                linked: false,
            });
        }
    }
    Some(out)
}
