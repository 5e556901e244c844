//! Two-layer graph model: nodes `1..=n`, undirected edges in canonical
//! `i < j` form, connectivity and articulation queries.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// An undirected edge `{i, j}` stored with `i < j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "[usize; 2]", try_from = "[usize; 2]")]
pub struct Edge {
    lo: usize,
    hi: usize,
}

impl Edge {
    /// Canonicalizes `{a, b}`. Returns `None` for self-loops.
    pub fn new(a: usize, b: usize) -> Option<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Some(Edge { lo: a, hi: b }),
            std::cmp::Ordering::Greater => Some(Edge { lo: b, hi: a }),
            std::cmp::Ordering::Equal => None,
        }
    }

    pub fn lo(self) -> usize {
        self.lo
    }

    pub fn hi(self) -> usize {
        self.hi
    }

    pub fn touches(self, v: usize) -> bool {
        self.lo == v || self.hi == v
    }
}

impl From<Edge> for [usize; 2] {
    fn from(e: Edge) -> Self {
        [e.lo, e.hi]
    }
}

impl TryFrom<[usize; 2]> for Edge {
    type Error = String;

    fn try_from([a, b]: [usize; 2]) -> std::result::Result<Self, String> {
        Edge::new(a, b).ok_or_else(|| format!("self-loop on node {a}"))
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.lo, self.hi)
    }
}

/// All unordered pairs `{i, j}`, `1 <= i < j <= n`, in lexicographic order.
pub fn all_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..=n).flat_map(move |i| (i + 1..=n).map(move |j| (i, j)))
}

/// Number of unordered pairs over `n` nodes.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UndirectedGraph {
    n: usize,
    edges: BTreeSet<Edge>,
}

impl UndirectedGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == 0 || b == 0 || a > n || b > n {
                return Err(invalid(format!("edge ({a},{b}) outside node range 1..={n}")));
            }
            let e = Edge::new(a, b).ok_or_else(|| invalid(format!("self-loop on node {a}")))?;
            if !set.insert(e) {
                return Err(invalid(format!("duplicate edge {e}")));
            }
        }
        Ok(UndirectedGraph { n, edges: set })
    }

    pub fn empty(n: usize) -> Self {
        UndirectedGraph {
            n,
            edges: BTreeSet::new(),
        }
    }

    pub fn complete(n: usize) -> Self {
        UndirectedGraph {
            n,
            edges: all_pairs(n).map(|(i, j)| Edge { lo: i, hi: j }).collect(),
        }
    }

    /// Star `K_{1,n-1}` centered at `center`.
    pub fn star(n: usize, center: usize) -> Result<Self> {
        Self::new(n, (1..=n).filter(|&v| v != center).map(|v| (center, v)))
    }

    pub(crate) fn from_edge_set(n: usize, edges: BTreeSet<Edge>) -> Self {
        debug_assert!(edges.iter().all(|e| e.hi <= n));
        UndirectedGraph { n, edges }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_set(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        Edge::new(a, b).is_some_and(|e| self.edges.contains(&e))
    }

    pub fn contains_node(&self, v: usize) -> bool {
        (1..=self.n).contains(&v)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.touches(v)).count()
    }

    /// 1-indexed adjacency lists; index 0 is unused.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n + 1];
        for e in &self.edges {
            adj[e.lo].push(e.hi);
            adj[e.hi].push(e.lo);
        }
        adj
    }

    /// Copy with every edge incident to `v` removed. The node itself stays.
    pub fn without_node(&self, v: usize) -> Self {
        UndirectedGraph {
            n: self.n,
            edges: self.edges.iter().copied().filter(|e| !e.touches(v)).collect(),
        }
    }

    /// Component label per node (index 0 unused). Labels are the smallest
    /// node id of each component.
    pub fn component_labels(&self) -> Vec<usize> {
        let mut dsu = DisjointSet::new(self.n + 1);
        for e in &self.edges {
            dsu.union(e.lo, e.hi);
        }
        let mut label = vec![0; self.n + 1];
        let mut root_label = vec![0; self.n + 1];
        for (v, slot) in label.iter_mut().enumerate().skip(1) {
            let r = dsu.find(v);
            if root_label[r] == 0 {
                root_label[r] = v;
            }
            *slot = root_label[r];
        }
        label
    }

    /// Connectivity relation over all node pairs.
    pub fn connectivity_closure(&self) -> Closure {
        let labels = self.component_labels();
        let mut c = Closure::identity(self.n);
        for (i, j) in all_pairs(self.n) {
            if labels[i] == labels[j] {
                c.set(i, j);
            }
        }
        c
    }

    /// Literal undirected Warshall recurrence, `O(n^3)`.
    pub fn warshall_closure(&self) -> Closure {
        let mut c = Closure::identity(self.n);
        for e in &self.edges {
            c.set(e.lo, e.hi);
        }
        for k in 1..=self.n {
            let prev = c.clone();
            for (i, j) in all_pairs(self.n) {
                if prev.get(i, k) && prev.get(k, j) {
                    c.set(i, j);
                }
            }
        }
        c
    }

    /// Connected components, each sorted ascending, ordered by smallest member.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let labels = self.component_labels();
        let mut comps: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; self.n + 1];
        for (v, &l) in labels.iter().enumerate().skip(1) {
            if slot[l] == usize::MAX {
                slot[l] = comps.len();
                comps.push(Vec::new());
            }
            comps[slot[l]].push(v);
        }
        comps
    }

    pub fn component_count(&self) -> usize {
        self.connected_components().len()
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() <= 1
    }

    /// Nodes whose removal (with incident edges) splits their component.
    pub fn articulation_nodes(&self) -> BTreeSet<usize> {
        let adj = self.adjacency();
        let n = self.n;
        let mut disc = vec![0usize; n + 1];
        let mut low = vec![0usize; n + 1];
        let mut result = BTreeSet::new();
        let mut timer = 0;

        for root in 1..=n {
            if disc[root] != 0 {
                continue;
            }
            timer += 1;
            disc[root] = timer;
            low[root] = timer;
            let mut root_children = 0;
            // (node, parent, next neighbor index)
            let mut stack = vec![(root, 0usize, 0usize)];
            while let Some(&mut (v, parent, ref mut idx)) = stack.last_mut() {
                if *idx < adj[v].len() {
                    let w = adj[v][*idx];
                    *idx += 1;
                    if disc[w] == 0 {
                        timer += 1;
                        disc[w] = timer;
                        low[w] = timer;
                        if v == root {
                            root_children += 1;
                        }
                        stack.push((w, v, 0));
                    } else if w != parent {
                        low[v] = low[v].min(disc[w]);
                    }
                } else {
                    stack.pop();
                    if parent != 0 {
                        low[parent] = low[parent].min(low[v]);
                        if parent != root && low[v] >= disc[parent] {
                            result.insert(parent);
                        }
                    }
                }
            }
            if root_children >= 2 {
                result.insert(root);
            }
        }
        result
    }
}

/// Symmetric, reflexive boolean relation over `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Closure {
    n: usize,
    bits: Vec<bool>,
}

impl Closure {
    fn identity(n: usize) -> Self {
        let mut bits = vec![false; (n + 1) * (n + 1)];
        for v in 1..=n {
            bits[v * (n + 1) + v] = true;
        }
        Closure { n, bits }
    }

    fn set(&mut self, i: usize, j: usize) {
        let w = self.n + 1;
        self.bits[i * w + j] = true;
        self.bits[j * w + i] = true;
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * (self.n + 1) + j]
    }

    pub fn node_count(&self) -> usize {
        self.n
    }
}

/// Union-find with path halving and union by size.
#[derive(Clone, Debug)]
pub(crate) struct DisjointSet {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSet {
    pub fn new(len: usize) -> Self {
        DisjointSet {
            parent: (0..len).collect(),
            size: vec![1; len],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}

/// Two layers over the same node set: layer A (e.g. power) and layer B
/// (e.g. communication).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterdependentSystem {
    graph_a: UndirectedGraph,
    graph_b: UndirectedGraph,
}

impl InterdependentSystem {
    pub fn new(graph_a: UndirectedGraph, graph_b: UndirectedGraph) -> Result<Self> {
        if graph_a.n != graph_b.n {
            return Err(invalid(format!(
                "layer node counts differ: {} vs {}",
                graph_a.n, graph_b.n
            )));
        }
        if graph_a.n == 0 {
            return Err(invalid("system has no nodes"));
        }
        Ok(InterdependentSystem { graph_a, graph_b })
    }

    pub fn from_edges(
        n: usize,
        edges_a: impl IntoIterator<Item = (usize, usize)>,
        edges_b: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        Self::new(UndirectedGraph::new(n, edges_a)?, UndirectedGraph::new(n, edges_b)?)
    }

    pub fn node_count(&self) -> usize {
        self.graph_a.n
    }

    pub fn graph_a(&self) -> &UndirectedGraph {
        &self.graph_a
    }

    pub fn graph_b(&self) -> &UndirectedGraph {
        &self.graph_b
    }

    pub fn total_edges(&self) -> usize {
        self.graph_a.edge_count() + self.graph_b.edge_count()
    }

    pub fn to_json(&self) -> String {
        let file = InstanceFile::from(self);
        serde_json::to_string(&file).expect("instance serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text)?;
        file.try_into()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// On-disk form: `{"n": .., "edges_a": [[i,j],..], "edges_b": [[i,j],..]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub n: usize,
    pub edges_a: Vec<[usize; 2]>,
    pub edges_b: Vec<[usize; 2]>,
}

impl From<&InterdependentSystem> for InstanceFile {
    fn from(sys: &InterdependentSystem) -> Self {
        InstanceFile {
            n: sys.node_count(),
            edges_a: sys.graph_a.edges().map(Into::into).collect(),
            edges_b: sys.graph_b.edges().map(Into::into).collect(),
        }
    }
}

impl TryFrom<InstanceFile> for InterdependentSystem {
    type Error = crate::Error;

    fn try_from(f: InstanceFile) -> Result<Self> {
        InterdependentSystem::from_edges(
            f.n,
            f.edges_a.into_iter().map(|[a, b]| (a, b)),
            f.edges_b.into_iter().map(|[a, b]| (a, b)),
        )
    }
}

/// Set of initially failed nodes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AttackSet {
    nodes: BTreeSet<usize>,
}

impl AttackSet {
    pub fn new(n: usize, nodes: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for v in nodes {
            if v == 0 || v > n {
                return Err(invalid(format!("attack node {v} outside 1..={n}")));
            }
            if !set.insert(v) {
                return Err(invalid(format!("attack node {v} listed twice")));
            }
        }
        if set.is_empty() {
            return Err(invalid("attack set is empty"));
        }
        Ok(AttackSet { nodes: set })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.nodes.contains(&v)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes.iter().copied()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.nodes.iter().copied().collect()
    }

    /// Indicator vector, index 0 unused.
    pub fn indicator(&self, n: usize) -> Vec<bool> {
        let mut z = vec![false; n + 1];
        for &v in &self.nodes {
            z[v] = true;
        }
        z
    }
}

impl fmt::Display for AttackSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (idx, v) in self.nodes.iter().enumerate() {
            if idx > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for AttackSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.nodes.serialize(s)
    }
}
