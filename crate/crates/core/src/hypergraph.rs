//! Constraint hypergraphs, GYO reduction and join forests.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Instance, VarId};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypergraph {
    pub vertices: Vec<VarId>,
    /// `edges[i]` is the variable set of constraint `i`, sorted.
    pub edges: Vec<Vec<VarId>>,
}

impl Hypergraph {
    /// Vertices are the union of `extra` and everything the edges mention.
    pub fn new(edges: Vec<Vec<VarId>>, extra: impl IntoIterator<Item = VarId>) -> Self {
        let mut vs: BTreeSet<VarId> = extra.into_iter().collect();
        let edges = edges
            .into_iter()
            .map(|e| {
                let s: BTreeSet<VarId> = e.into_iter().collect();
                vs.extend(&s);
                s.into_iter().collect()
            })
            .collect();
        Hypergraph {
            vertices: vs.into_iter().collect(),
            edges,
        }
    }

    pub fn from_instance(inst: &Instance) -> Self {
        let edges = inst.constraints().iter().map(|c| c.var_set()).collect();
        Hypergraph::new(edges, 0..inst.num_vars())
    }

    pub fn is_acyclic(&self) -> bool {
        self.gyo(GyoPolicy::SmallestFirst).acyclic
    }

    pub fn gyo(&self, policy: GyoPolicy) -> GyoResult {
        gyo(self, policy)
    }
}

/// One GYO action.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum GyoStep {
    /// Vertex in at most one remaining edge.
    RemoveVertex { vertex: VarId },
    /// Edge that became empty.
    RemoveEmptyEdge { edge: usize },
    /// Edge contained in another remaining edge.
    RemoveContainedEdge { edge: usize, within: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GyoResult {
    pub acyclic: bool,
    pub trace: Vec<GyoStep>,
    /// Edges left when the reduction got stuck, as their current vertex sets.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub residue: Vec<(usize, Vec<VarId>)>,
}

/// Order in which candidate actions are tried. The answer does not depend
/// on it; the trace does.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GyoPolicy {
    /// Vertex removals first, lowest ids first.
    SmallestFirst,
    /// Edge removals first, highest ids first.
    LargestEdgesFirst,
}

struct GyoState {
    edges: Vec<Option<BTreeSet<VarId>>>,
    occ: std::collections::BTreeMap<VarId, BTreeSet<usize>>,
}

impl GyoState {
    fn remove_vertex(&mut self, v: VarId) {
        if let Some(es) = self.occ.remove(&v) {
            for e in es {
                if let Some(set) = self.edges[e].as_mut() {
                    set.remove(&v);
                }
            }
        }
    }

    fn remove_edge(&mut self, e: usize) {
        if let Some(set) = self.edges[e].take() {
            for v in set {
                if let Some(es) = self.occ.get_mut(&v) {
                    es.remove(&e);
                }
            }
        }
    }

    fn vertex_candidate(&self, rev: bool) -> Option<VarId> {
        let pick = |(&v, es): (&VarId, &BTreeSet<usize>)| (es.len() <= 1).then_some(v);
        if rev {
            self.occ.iter().rev().find_map(pick)
        } else {
            self.occ.iter().find_map(pick)
        }
    }

    /// `(edge, Some(within))` for a contained edge, `(edge, None)` for an
    /// empty one.
    fn edge_candidate(&self, rev: bool) -> Option<(usize, Option<usize>)> {
        let n = self.edges.len();
        let order: Box<dyn Iterator<Item = usize>> = if rev {
            Box::new((0..n).rev())
        } else {
            Box::new(0..n)
        };
        for e in order {
            let Some(set) = &self.edges[e] else { continue };
            let Some(&first) = set.iter().min_by_key(|v| self.occ[v].len()) else {
                return Some((e, None));
            };
            for &f in &self.occ[&first] {
                if f == e {
                    continue;
                }
                let other = self.edges[f].as_ref().expect("occurrence lists track live edges");
                if set.is_subset(other) {
                    return Some((e, Some(f)));
                }
            }
        }
        None
    }
}

fn gyo(h: &Hypergraph, policy: GyoPolicy) -> GyoResult {
    let mut st = GyoState {
        edges: h
            .edges
            .iter()
            .map(|e| Some(e.iter().copied().collect()))
            .collect(),
        occ: h.vertices.iter().map(|&v| (v, BTreeSet::new())).collect(),
    };
    for (i, e) in h.edges.iter().enumerate() {
        for &v in e {
            st.occ.entry(v).or_default().insert(i);
        }
    }
    let mut trace = Vec::new();
    let rev = policy == GyoPolicy::LargestEdgesFirst;
    loop {
        let vertex_step = |st: &GyoState| st.vertex_candidate(rev).map(|v| GyoStep::RemoveVertex { vertex: v });
        let edge_step = |st: &GyoState| {
            st.edge_candidate(rev).map(|(e, within)| match within {
                Some(w) => GyoStep::RemoveContainedEdge { edge: e, within: w },
                None => GyoStep::RemoveEmptyEdge { edge: e },
            })
        };
        let step = if rev {
            edge_step(&st).or_else(|| vertex_step(&st))
        } else {
            vertex_step(&st).or_else(|| edge_step(&st))
        };
        let Some(step) = step else { break };
        match step {
            GyoStep::RemoveVertex { vertex } => st.remove_vertex(vertex),
            GyoStep::RemoveEmptyEdge { edge } | GyoStep::RemoveContainedEdge { edge, .. } => {
                st.remove_edge(edge)
            }
        }
        trace.push(step);
    }
    let residue: Vec<(usize, Vec<VarId>)> = st
        .edges
        .iter()
        .enumerate()
        .filter_map(|(i, e)| e.as_ref().map(|s| (i, s.iter().copied().collect())))
        .collect();
    GyoResult {
        acyclic: residue.is_empty() && st.occ.is_empty(),
        trace,
        residue,
    }
}

/// GYO on an instance's hypergraph; `Err(NotAcyclic)` carries the trace.
pub fn require_acyclic(inst: &Instance) -> Result<GyoResult> {
    let r = Hypergraph::from_instance(inst).gyo(GyoPolicy::SmallestFirst);
    if r.acyclic {
        Ok(r)
    } else {
        Err(Error::NotAcyclic { trace: r.trace })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedEdge {
    pub a: usize,
    pub b: usize,
    pub weight: usize,
}

/// Constraints as nodes, weighted by the number of shared variables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationalGraph {
    pub nodes: usize,
    /// Sorted by `(a, b)` with `a < b`.
    pub edges: Vec<WeightedEdge>,
}

pub fn relational_graph(inst: &Instance) -> RelationalGraph {
    let sets: Vec<Vec<VarId>> = inst.constraints().iter().map(|c| c.var_set()).collect();
    let mut by_var: Vec<Vec<usize>> = vec![Vec::new(); inst.num_vars()];
    for (i, s) in sets.iter().enumerate() {
        for &v in s {
            by_var[v].push(i);
        }
    }
    let mut weights = std::collections::BTreeMap::<(usize, usize), usize>::new();
    for cs in &by_var {
        for (p, &a) in cs.iter().enumerate() {
            for &b in &cs[p + 1..] {
                *weights.entry((a, b)).or_default() += 1;
            }
        }
    }
    RelationalGraph {
        nodes: sets.len(),
        edges: weights
            .into_iter()
            .map(|((a, b), weight)| WeightedEdge { a, b, weight })
            .collect(),
    }
}

/// Union-find with path halving.
pub(crate) struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// False if already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

/// A join forest over constraint indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JoinForest {
    pub parent: Vec<Option<usize>>,
    /// Smallest constraint index of each tree, ascending.
    pub roots: Vec<usize>,
    pub children: Vec<Vec<usize>>,
    /// Chosen relational edges.
    pub edges: Vec<WeightedEdge>,
    pub total_weight: usize,
}

impl JoinForest {
    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Children before parents, tree by tree.
    pub fn post_order(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len());
        for &r in &self.roots {
            let mut stack = vec![(r, false)];
            while let Some((n, expanded)) = stack.pop() {
                if expanded {
                    out.push(n);
                } else {
                    stack.push((n, true));
                    for &c in self.children[n].iter().rev() {
                        stack.push((c, false));
                    }
                }
            }
        }
        out
    }

    /// Nodes of the tree rooted at `root`.
    pub fn tree_nodes(&self, root: usize) -> Vec<usize> {
        let mut out = vec![root];
        let mut i = 0;
        while i < out.len() {
            out.extend(self.children[out[i]].iter().copied());
            i += 1;
        }
        out
    }
}

/// Maximum-weight spanning forest of the relational graph, checked for the
/// join property. Kruskal with ties broken by `(a, b)`.
pub fn join_forest(inst: &Instance) -> Result<JoinForest> {
    require_acyclic(inst)?;
    let forest = max_spanning_forest(inst);
    if let Some(v) = connectivity_violation(inst, &forest) {
        return Err(Error::Internal(format!(
            "join forest breaks connectivity of variable {:?}",
            inst.var_name(v)
        )));
    }
    Ok(forest)
}

pub(crate) fn max_spanning_forest(inst: &Instance) -> JoinForest {
    let g = relational_graph(inst);
    let n = g.nodes;
    let mut edges = g.edges;
    edges.sort_by(|x, y| y.weight.cmp(&x.weight).then((x.a, x.b).cmp(&(y.a, y.b))));
    let mut dsu = Dsu::new(n);
    let mut chosen = Vec::new();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in edges {
        if dsu.union(e.a, e.b) {
            adj[e.a].push(e.b);
            adj[e.b].push(e.a);
            chosen.push(e);
        }
    }
    let mut parent = vec![None; n];
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut seen = vec![false; n];
    let mut roots = Vec::new();
    for r in 0..n {
        if seen[r] {
            continue;
        }
        roots.push(r);
        seen[r] = true;
        let mut queue = std::collections::VecDeque::from([r]);
        while let Some(u) = queue.pop_front() {
            let mut nbrs = adj[u].clone();
            nbrs.sort_unstable();
            for w in nbrs {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(u);
                    children[u].push(w);
                    queue.push_back(w);
                }
            }
        }
    }
    chosen.sort_by_key(|e| (e.a, e.b));
    let total_weight = chosen.iter().map(|e| e.weight).sum();
    JoinForest {
        parent,
        roots,
        children,
        edges: chosen,
        total_weight,
    }
}

/// First variable whose constraints do not form a connected subtree.
pub fn connectivity_violation(inst: &Instance, forest: &JoinForest) -> Option<VarId> {
    let mut holders: Vec<Vec<usize>> = vec![Vec::new(); inst.num_vars()];
    for (i, c) in inst.constraints().iter().enumerate() {
        for v in c.var_set() {
            holders[v].push(i);
        }
    }
    for (v, hs) in holders.iter().enumerate() {
        if hs.len() <= 1 {
            continue;
        }
        // inside a forest, a node set is connected iff it spans |set|-1 edges
        let inside = forest
            .edges
            .iter()
            .filter(|e| hs.binary_search(&e.a).is_ok() && hs.binary_search(&e.b).is_ok())
            .count();
        if inside != hs.len() - 1 {
            return Some(v);
        }
    }
    None
}
