//! Generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashSet;

use acsp_core::frontends::{Circuit, Cnf2, Gate, GateKind, Lit};
use acsp_core::table::{bits_of, index_of};
use acsp_core::{ComplexRat, FuncTable, Instance};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// {0, ±1, ±1/2, i, 2}
pub fn weight_pool() -> Vec<ComplexRat> {
    vec![
        ComplexRat::zero(),
        ComplexRat::from(1),
        ComplexRat::from(-1),
        ComplexRat::ratio(1, 2),
        ComplexRat::ratio(-1, 2),
        ComplexRat::i(),
        ComplexRat::from(2),
    ]
}

pub fn random_table(rng: &mut impl Rng, arity: usize, pool: &[ComplexRat]) -> FuncTable {
    let values = (0..1usize << arity)
        .map(|_| pool.choose(rng).unwrap().clone())
        .collect();
    FuncTable::new(arity, values).unwrap()
}

/// Random product of unaries; its support is a product set.
pub fn random_dg_table(rng: &mut impl Rng, arity: usize, pool: &[ComplexRat]) -> FuncTable {
    let us: Vec<[ComplexRat; 2]> = (0..arity)
        .map(|_| [pool.choose(rng).unwrap().clone(), pool.choose(rng).unwrap().clone()])
        .collect();
    let c = pool.choose(rng).unwrap().clone();
    FuncTable::from_fn(arity, |x| {
        x.iter()
            .zip(&us)
            .fold(c.clone(), |acc, (&b, u)| &acc * &u[usize::from(b)])
    })
}

pub struct InstanceShape {
    pub max_vars: usize,
    pub max_constraints: usize,
    pub max_arity: usize,
}

/// Acyclic by construction: each new edge meets the earlier ones only
/// inside one earlier edge. Edges, positions and variable ids are shuffled
/// afterwards, and a few isolated variables may be added.
pub fn random_acyclic_instance<R: Rng>(
    rng: &mut R,
    shape: &InstanceShape,
    mut table: impl FnMut(&mut R, usize) -> FuncTable,
) -> Instance {
    let m = rng.gen_range(1..=shape.max_constraints);
    let mut edges: Vec<Vec<usize>> = Vec::new();
    let mut next = 0usize;
    for _ in 0..m {
        let arity = rng.gen_range(1..=shape.max_arity);
        let mut e: Vec<usize> = Vec::new();
        if let Some(parent) = edges.choose(rng).cloned() {
            let take = rng.gen_range(0..=arity.min(parent.len()));
            e.extend(parent.choose_multiple(rng, take).copied());
        }
        while e.len() < arity && next < shape.max_vars {
            e.push(next);
            next += 1;
        }
        if e.is_empty() {
            let parent = edges.choose(rng).unwrap();
            e.push(*parent.choose(rng).unwrap());
        }
        e.shuffle(rng);
        edges.push(e);
    }
    if next < shape.max_vars && rng.gen_bool(0.2) {
        next += rng.gen_range(1..=(shape.max_vars - next).min(2));
    }
    edges.shuffle(rng);
    let mut relabel: Vec<usize> = (0..next).collect();
    relabel.shuffle(rng);
    let names: Vec<String> = (0..next).map(|i| format!("v{i}")).collect();
    let mut inst = Instance::with_vars(&names).unwrap();
    for e in edges {
        let vars: Vec<usize> = e.iter().map(|&v| relabel[v]).collect();
        let f = table(rng, vars.len());
        inst.push(f, &vars).unwrap();
    }
    inst
}

/// Plain sum over all assignments.
pub fn brute_count(inst: &Instance) -> ComplexRat {
    let n = inst.num_vars();
    assert!(n <= 22, "oracle limited to 22 variables");
    let mut total = ComplexRat::zero();
    for a in 0..1usize << n {
        let bits = bits_of(a, n);
        let mut w = ComplexRat::one();
        for c in inst.constraints() {
            let local: Vec<bool> = c.vars.iter().map(|&v| bits[v]).collect();
            w = &w * c.func.eval(&local);
            if w.is_zero() {
                break;
            }
        }
        total += &w;
    }
    total
}

pub fn random_hypergraph(rng: &mut impl Rng, max_vertices: usize, max_edges: usize) -> Vec<Vec<usize>> {
    let nv = rng.gen_range(1..=max_vertices);
    let ne = rng.gen_range(1..=max_edges);
    (0..ne)
        .map(|_| {
            let size = rng.gen_range(0..=nv.min(4));
            let mut e: Vec<usize> = (0..nv).collect::<Vec<_>>().choose_multiple(rng, size).copied().collect();
            e.sort_unstable();
            e
        })
        .collect()
}

/// Acyclicity by trying every GYO reduction order.
pub fn acyclic_all_orders(edges: &[Vec<usize>]) -> bool {
    let state: Vec<u32> = edges
        .iter()
        .map(|e| e.iter().fold(0u32, |m, &v| m | 1 << v))
        .collect();
    let mut seen = HashSet::new();
    search(state, &mut seen)
}

fn search(state: Vec<u32>, seen: &mut HashSet<Vec<u32>>) -> bool {
    if state.is_empty() {
        return true;
    }
    let mut key = state.clone();
    key.sort_unstable();
    if !seen.insert(key) {
        return false;
    }
    let mut moves: Vec<Vec<u32>> = Vec::new();
    for (i, &e) in state.iter().enumerate() {
        if e == 0 {
            let mut s = state.clone();
            s.remove(i);
            moves.push(s);
            continue;
        }
        for v in 0..32 {
            if e & (1 << v) != 0 && state.iter().filter(|&&f| f & (1 << v) != 0).count() == 1 {
                let mut s = state.clone();
                s[i] &= !(1 << v);
                moves.push(s);
            }
        }
        for (j, &f) in state.iter().enumerate() {
            if i != j && e & f == e {
                let mut s = state.clone();
                s.remove(i);
                moves.push(s);
            }
        }
    }
    moves.into_iter().any(|s| search(s, seen))
}

/// Integer left kernel of `a` (rows x cols), by unimodular row reduction.
fn integer_left_kernel(a: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<i64>> = a.to_vec();
    let mut u: Vec<Vec<i64>> = (0..rows)
        .map(|r| (0..rows).map(|c| i64::from(r == c)).collect())
        .collect();
    let mut pivot = 0;
    for col in 0..cols {
        if pivot == rows {
            break;
        }
        loop {
            let best = (pivot..rows)
                .filter(|&r| m[r][col] != 0)
                .min_by_key(|&r| m[r][col].abs());
            let Some(best) = best else { break };
            m.swap(pivot, best);
            u.swap(pivot, best);
            let mut done = true;
            for r in pivot + 1..rows {
                if m[r][col] != 0 {
                    let q = m[r][col] / m[pivot][col];
                    let (top, bottom) = m.split_at_mut(r);
                    for (x, y) in bottom[0].iter_mut().zip(&top[pivot]) {
                        *x -= q * y;
                    }
                    let (top, bottom) = u.split_at_mut(r);
                    for (x, y) in bottom[0].iter_mut().zip(&top[pivot]) {
                        *x -= q * y;
                    }
                    if m[r][col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                pivot += 1;
                break;
            }
        }
    }
    u.split_off(pivot)
}

/// Whether a constant and some unary weights `u_i` give
/// `f(x) = c Π_i u_i(x_i)` for every `x` in `points`.
pub fn product_on(f: &FuncTable, points: &[usize]) -> bool {
    let k = f.arity();
    let support: Vec<usize> = points.iter().copied().filter(|&p| !f.value(p).is_zero()).collect();
    if support.is_empty() {
        return true;
    }
    let feature = |p: usize, i: usize| 2 * i + usize::from(bits_of(p, k)[i]);
    let mut used = vec![false; 2 * k];
    for &p in &support {
        for i in 0..k {
            used[feature(p, i)] = true;
        }
    }
    // Zeros inside `points` need a zero unary entry that no support point uses.
    for &p in points {
        if f.value(p).is_zero() && (0..k).all(|i| used[feature(p, i)]) {
            return false;
        }
    }
    let a: Vec<Vec<i64>> = support
        .iter()
        .map(|&p| {
            let mut row = vec![0i64; 2 * k + 1];
            row[2 * k] = 1;
            for i in 0..k {
                row[feature(p, i)] = 1;
            }
            row
        })
        .collect();
    integer_left_kernel(&a).iter().all(|c| {
        let mut acc = ComplexRat::one();
        for (n, &e) in c.iter().enumerate() {
            acc = &acc * &f.value(support[n]).pow(e).unwrap();
        }
        acc.is_one()
    })
}

/// `f` is a product of pairwise relations from `shapes` (on `(x_i, x_j)`,
/// as a 4-entry 0/1 table) and unaries.
fn product_of_pairs(f: &FuncTable, shapes: &[[bool; 4]]) -> bool {
    let k = f.arity();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    let combos = (shapes.len() + 1).pow(pairs.len() as u32);
    (0..combos).any(|mut code| {
        let mut chosen = Vec::new();
        for &(i, j) in &pairs {
            let s = code % (shapes.len() + 1);
            code /= shapes.len() + 1;
            if s > 0 {
                chosen.push((i, j, shapes[s - 1]));
            }
        }
        let inside = |p: usize| {
            let x = bits_of(p, k);
            chosen
                .iter()
                .all(|&(i, j, t)| t[2 * usize::from(x[i]) + usize::from(x[j])])
        };
        let all: Vec<usize> = (0..1usize << k).collect();
        if all.iter().any(|&p| !inside(p) && !f.value(p).is_zero()) {
            return false;
        }
        let s: Vec<usize> = all.into_iter().filter(|&p| inside(p)).collect();
        product_on(f, &s)
    })
}

pub fn oracle_dg(f: &FuncTable) -> bool {
    product_of_pairs(f, &[])
}

pub fn oracle_ed(f: &FuncTable) -> bool {
    product_of_pairs(f, &[[true, false, false, true], [false, true, true, false]])
}

pub fn oracle_im(f: &FuncTable) -> bool {
    product_of_pairs(
        f,
        &[
            [true, true, false, true],
            [true, false, true, true],
            [true, false, false, true],
        ],
    )
}

pub fn oracle_nz(f: &FuncTable) -> bool {
    f.values().iter().all(|v| !v.is_zero())
}

/// Smallest number of gates below and including a gate at `level`.
fn min_size(level: usize, is_and: bool) -> usize {
    match level {
        0 => 1,
        _ if is_and => 1 + 2 * min_size(level - 1, false),
        _ => 1 + min_size(level - 1, true),
    }
}

/// Random leveled, alternating, semi-unbounded tree circuit.
pub fn random_circuit(rng: &mut impl Rng, max_gates: usize, max_depth: usize) -> Circuit {
    let inputs = rng.gen_range(1..=4);
    let (depth, root_and) = loop {
        let d = rng.gen_range(1..=max_depth);
        let t = rng.gen_bool(0.5);
        if min_size(d, t) <= max_gates {
            break (d, t);
        }
    };
    let mut gates = Vec::new();
    let budget = rng.gen_range(min_size(depth, root_and)..=max_gates);
    let (root, _) = grow(rng, depth, root_and, budget, inputs, &mut gates);
    gates.shuffle(rng);
    Circuit::new(inputs, gates, root).unwrap()
}

fn grow(
    rng: &mut impl Rng,
    level: usize,
    is_and: bool,
    budget: usize,
    inputs: usize,
    gates: &mut Vec<Gate>,
) -> (usize, usize) {
    let id = gates.len() + 100;
    gates.push(Gate {
        id,
        level,
        kind: GateKind::Input {
            index: rng.gen_range(0..inputs),
            negated: rng.gen_bool(0.3),
        },
    });
    let slot = gates.len() - 1;
    if level == 0 {
        return (id, 1);
    }
    let child_min = min_size(level - 1, !is_and);
    let m = if is_and {
        2
    } else {
        let mut m = rng.gen_range(1..=4);
        while m > 1 && 1 + m * child_min > budget {
            m -= 1;
        }
        m
    };
    let mut left = budget - 1;
    let mut children = Vec::new();
    let mut size = 1;
    for j in 0..m {
        let reserve = (m - j - 1) * child_min;
        let hi = left - reserve;
        let b = rng.gen_range(child_min..=hi.max(child_min));
        let (c, s) = grow(rng, level - 1, !is_and, b, inputs, gates);
        children.push(c);
        left -= s;
        size += s;
    }
    gates[slot].kind = if is_and {
        GateKind::And([children[0], children[1]])
    } else {
        GateKind::Or(children)
    };
    (id, size)
}

/// Accepting subtrees by checking every set of gates.
pub fn enumerate_subtrees(c: &Circuit, x: &[bool]) -> u64 {
    let gates = c.gates();
    let n = gates.len();
    assert!(n <= 16);
    let pos = |id: usize| gates.iter().position(|g| g.id == id).unwrap();
    let mut parent = vec![None; n];
    for (i, g) in gates.iter().enumerate() {
        let ch: Vec<usize> = match &g.kind {
            GateKind::And(c) => c.to_vec(),
            GateKind::Or(c) => c.clone(),
            GateKind::Input { .. } => vec![],
        };
        for k in ch {
            parent[pos(k)] = Some(i);
        }
    }
    let root = pos(c.root());
    let mut total = 0;
    for mask in 0..1u32 << n {
        let inn = |i: usize| mask & (1 << i) != 0;
        if !inn(root) {
            continue;
        }
        let ok = gates.iter().enumerate().all(|(i, g)| {
            if !inn(i) {
                return true;
            }
            if i != root && !parent[i].is_some_and(inn) {
                return false;
            }
            match &g.kind {
                GateKind::And(ch) => ch.iter().all(|&k| inn(pos(k))),
                GateKind::Or(ch) => ch.iter().filter(|&&k| inn(pos(k))).count() == 1,
                GateKind::Input { index, negated } => x[*index] != *negated,
            }
        });
        if ok {
            total += 1;
        }
    }
    total
}

/// Random acyclic 2CNF: clauses follow a random forest, possibly with
/// parallel clauses, unit clauses and tautologies.
pub fn random_acyclic_cnf(rng: &mut impl Rng, max_vars: usize) -> Cnf2 {
    let n = rng.gen_range(1..=max_vars);
    let mut cnf = Cnf2::new(n);
    let lit = |rng: &mut dyn rand::RngCore, v: usize| Lit {
        var: v,
        positive: rng.gen_bool(0.5),
    };
    for v in 1..n {
        if rng.gen_bool(0.75) {
            let u = rng.gen_range(0..v);
            for _ in 0..rng.gen_range(1..=2) {
                let (a, b) = (lit(rng, u), lit(rng, v));
                let (a, b) = if rng.gen_bool(0.5) { (a, b) } else { (b, a) };
                cnf.add(a, b).unwrap();
            }
        }
    }
    for v in 0..n {
        if rng.gen_bool(0.1) {
            let a = lit(rng, v);
            cnf.add(a, a).unwrap();
        }
        if rng.gen_bool(0.05) {
            cnf.add(Lit::pos(v), Lit::neg(v)).unwrap();
        }
    }
    cnf.clauses.shuffle(rng);
    cnf
}

pub fn brute_models(cnf: &Cnf2) -> u64 {
    let n = cnf.num_vars;
    (0..1usize << n)
        .filter(|&a| {
            let x = bits_of(a, n);
            cnf.clauses
                .iter()
                .all(|[p, q]| x[p.var] == p.positive || x[q.var] == q.positive)
        })
        .count() as u64
}

/// `f` restricted by `pins`, with the two kept positions in order.
pub fn restrict(f: &FuncTable, kept: (usize, usize), pins: &[(usize, bool)]) -> Vec<ComplexRat> {
    let k = f.arity();
    let mut out = Vec::new();
    for a in [false, true] {
        for b in [false, true] {
            let mut x = vec![false; k];
            x[kept.0] = a;
            x[kept.1] = b;
            for &(p, v) in pins {
                x[p] = v;
            }
            out.push(f.value(index_of(&x)).clone());
        }
    }
    out
}
