//! Directed weighted graphs, deterministic shortest-path trees, tree paths and
//! random generators.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

pub type Vertex = usize;
pub type EdgeId = usize;
pub type Weight = u64;
pub type Dist = u64;

/// Distance sentinel for "unreachable". Strictly larger than any finite
/// distance `n · W`; additions saturate at it.
pub const INF: Dist = u64::MAX;

/// Largest accepted edge weight. Keeps every finite path weight far below
/// [`INF`] for any graph that fits in memory.
pub const MAX_WEIGHT: Weight = 1 << 40;

#[inline]
pub fn sat_add(a: Dist, b: Dist) -> Dist {
    if a == INF || b == INF {
        INF
    } else {
        a.saturating_add(b).min(INF - 1)
    }
}

/// Shortest-path key: weight first, then hop count. Minimising this pair
/// gives the shortest path with the fewest edges, which makes the tree built
/// from it acyclic even with zero-weight edges. A key fits in one
/// `O(log n)`-bit word since the hop count is below `n`.
pub type Key = (Dist, u32);

pub const INF_KEY: Key = (INF, u32::MAX);

#[inline]
pub fn key_extend(k: Key, w: Weight) -> Key {
    if k.0 == INF {
        INF_KEY
    } else {
        (sat_add(k.0, w), k.1 + 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub from: Vertex,
    pub to: Vertex,
    pub weight: Weight,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    out_adj: Vec<Vec<EdgeId>>,
    in_adj: Vec<Vec<EdgeId>>,
    index: HashMap<(Vertex, Vertex), EdgeId>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph { n, edges: Vec::new(), out_adj: vec![Vec::new(); n], in_adj: vec![Vec::new(); n], index: HashMap::new() }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (Vertex, Vertex, Weight)>) -> Result<Self> {
        let mut g = Graph::new(n);
        for (u, v, w) in edges {
            g.add_edge(u, v, w)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: Vertex, v: Vertex, w: Weight) -> Result<EdgeId> {
        if u >= self.n {
            return Err(Error::VertexOutOfRange(u));
        }
        if v >= self.n {
            return Err(Error::VertexOutOfRange(v));
        }
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        if w > MAX_WEIGHT {
            return Err(Error::WeightTooLarge(w));
        }
        if self.index.contains_key(&(u, v)) {
            return Err(Error::DuplicateEdge(u, v));
        }
        let id = self.edges.len();
        self.edges.push(Edge { from: u, to: v, weight: w });
        self.out_adj[u].push(id);
        self.in_adj[v].push(id);
        self.index.insert((u, v), id);
        Ok(id)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, id: EdgeId) -> Edge {
        self.edges[id]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn out_edges(&self, v: Vertex) -> &[EdgeId] {
        &self.out_adj[v]
    }

    pub fn in_edges(&self, v: Vertex) -> &[EdgeId] {
        &self.in_adj[v]
    }

    pub fn edge_id(&self, u: Vertex, v: Vertex) -> Option<EdgeId> {
        self.index.get(&(u, v)).copied()
    }

    pub fn require_edge(&self, u: Vertex, v: Vertex) -> Result<EdgeId> {
        self.edge_id(u, v).ok_or(Error::NoSuchEdge(u, v))
    }

    pub fn check_vertex(&self, v: Vertex) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange(v))
        }
    }

    /// The reversed graph. Edge `i` of the result is edge `i` of `self` with
    /// its endpoints swapped, so edge ids are shared between the two.
    pub fn reversed(&self) -> Graph {
        let mut g = Graph::new(self.n);
        for e in &self.edges {
            g.add_edge(e.to, e.from, e.weight).expect("reversal of a valid graph is valid");
        }
        g
    }

    /// True iff every edge has weight 1.
    pub fn is_unit_weight(&self) -> bool {
        self.edges.iter().all(|e| e.weight == 1)
    }

    pub fn max_weight(&self) -> Weight {
        self.edges.iter().map(|e| e.weight).max().unwrap_or(0)
    }
}

/// Lexicographic (weight, hops) Dijkstra from a set of seeded vertices,
/// restricted to the edges accepted by `allowed`. Seeds model both real
/// sources (key `(0, 0)`) and virtual edges from an implicit source.
pub(crate) fn shortest_keys(g: &Graph, seeds: &[(Vertex, Key)], allowed: impl Fn(EdgeId) -> bool) -> Vec<Key> {
    let mut key = vec![INF_KEY; g.n()];
    let mut heap = BinaryHeap::new();
    for &(v, k) in seeds {
        if k < key[v] {
            key[v] = k;
            heap.push(Reverse((k, v)));
        }
    }
    while let Some(Reverse((k, u))) = heap.pop() {
        if k > key[u] {
            continue;
        }
        for &id in g.out_edges(u) {
            if !allowed(id) {
                continue;
            }
            let e = g.edge(id);
            let nk = key_extend(k, e.weight);
            if nk < key[e.to] {
                key[e.to] = nk;
                heap.push(Reverse((nk, e.to)));
            }
        }
    }
    key
}

/// Deterministic out-shortest-path tree.
///
/// Among the in-neighbours `u` of `v` with `key(u) ⊕ (w(u,v), 1) = key(v)`,
/// the parent is the one with the smallest id. Restricting ties to
/// minimum-hop predecessors keeps the tree acyclic under zero weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShortestPathTree {
    pub root: Vertex,
    pub parent: Vec<Option<Vertex>>,
    pub dist: Vec<Dist>,
    /// Hop depth; `usize::MAX` for unreachable vertices.
    pub depth: Vec<usize>,
    /// Number of vertices in the subtree (0 for unreachable vertices).
    pub subtree_size: Vec<usize>,
    pub children: Vec<Vec<Vertex>>,
    /// Pre-order index; the subtree of `v` is `pre[v]..pre[v] + subtree_size[v]`.
    pub pre: Vec<usize>,
}

pub const UNREACHED: usize = usize::MAX;

impl ShortestPathTree {
    /// Builds the tree from keys produced by a (weight, hops) shortest-path
    /// computation rooted at `root`.
    pub(crate) fn from_keys(g: &Graph, root: Vertex, keys: &[Key], allowed: impl Fn(EdgeId) -> bool) -> Self {
        let n = g.n();
        let mut parent = vec![None; n];
        for v in 0..n {
            if v == root || keys[v].0 == INF {
                continue;
            }
            parent[v] = g
                .in_edges(v)
                .iter()
                .filter(|&&id| allowed(id))
                .map(|&id| g.edge(id))
                .filter(|e| keys[e.from].0 != INF && key_extend(keys[e.from], e.weight) == keys[v])
                .map(|e| e.from)
                .min();
            debug_assert!(parent[v].is_some(), "reachable vertex {v} without predecessor");
        }
        Self::from_parents(root, parent, keys.iter().map(|k| k.0).collect())
    }

    pub(crate) fn from_parents(root: Vertex, parent: Vec<Option<Vertex>>, dist: Vec<Dist>) -> Self {
        let n = parent.len();
        let mut children = vec![Vec::new(); n];
        for (v, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                children[p].push(v);
            }
        }
        let mut depth = vec![UNREACHED; n];
        let mut pre = vec![UNREACHED; n];
        let mut subtree_size = vec![0; n];
        let mut order = Vec::with_capacity(n);
        let mut stack = vec![root];
        depth[root] = 0;
        while let Some(u) = stack.pop() {
            pre[u] = order.len();
            order.push(u);
            for &c in children[u].iter().rev() {
                depth[c] = depth[u] + 1;
                stack.push(c);
            }
        }
        for &u in order.iter().rev() {
            subtree_size[u] = 1 + children[u].iter().map(|&c| subtree_size[c]).sum::<usize>();
        }
        ShortestPathTree { root, parent, dist, depth, subtree_size, children, pre }
    }

    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn reachable(&self, v: Vertex) -> bool {
        self.depth[v] != UNREACHED
    }

    /// True iff `a` is `b` or an ancestor of `b`.
    pub fn is_ancestor(&self, a: Vertex, b: Vertex) -> bool {
        self.reachable(a) && self.reachable(b) && self.pre[a] <= self.pre[b] && self.pre[b] < self.pre[a] + self.subtree_size[a]
    }

    /// True iff `(u, v)` is a tree edge.
    pub fn is_tree_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.parent[v] == Some(u)
    }

    pub fn height(&self) -> usize {
        self.depth.iter().filter(|&&d| d != UNREACHED).copied().max().unwrap_or(0)
    }

    /// Vertices of the subtree rooted at `v`, in pre-order.
    pub fn subtree(&self, v: Vertex) -> Vec<Vertex> {
        let mut out = Vec::with_capacity(self.subtree_size[v]);
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            out.push(u);
            stack.extend(self.children[u].iter().rev());
        }
        out
    }

    /// Tree path from the root to `v` as a vertex sequence.
    pub fn path_to(&self, v: Vertex) -> Option<Vec<Vertex>> {
        if !self.reachable(v) {
            return None;
        }
        let mut path = vec![v];
        let mut cur = v;
        while let Some(p) = self.parent[cur] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        Some(path)
    }

    /// Ancestor of `v` at the given depth, if `v` is at least that deep.
    pub fn ancestor_at_depth(&self, v: Vertex, depth: usize) -> Option<Vertex> {
        if !self.reachable(v) || self.depth[v] < depth {
            return None;
        }
        let mut cur = v;
        while self.depth[cur] > depth {
            cur = self.parent[cur]?;
        }
        Some(cur)
    }
}

/// Centralized deterministic shortest-path tree rooted at `root`.
pub fn build_sp_tree(g: &Graph, root: Vertex) -> ShortestPathTree {
    assert!(root < g.n(), "root {root} out of range");
    let keys = shortest_keys(g, &[(root, (0, 0))], |_| true);
    ShortestPathTree::from_keys(g, root, &keys, |_| true)
}

/// A path of tree edges, given with the source of the tree it lives on and
/// its first vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PathSpec {
    pub source: Vertex,
    pub start_vertex: Vertex,
    pub edges: Vec<EdgeId>,
}

impl PathSpec {
    pub fn from_vertices(g: &Graph, source: Vertex, vertices: &[Vertex]) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::InvalidPath("a path needs at least one edge".into()));
        }
        let edges = vertices.windows(2).map(|w| g.require_edge(w[0], w[1])).collect::<Result<Vec<_>>>()?;
        Ok(PathSpec { source, start_vertex: vertices[0], edges })
    }

    pub fn single_edge(g: &Graph, source: Vertex, edge: EdgeId) -> Self {
        PathSpec { source, start_vertex: g.edge(edge).from, edges: vec![edge] }
    }

    /// Second vertex of the path: the root of `T_x(P)`.
    pub fn subtree_root(&self, g: &Graph) -> Vertex {
        g.edge(self.edges[0]).to
    }

    pub fn vertices(&self, g: &Graph) -> Vec<Vertex> {
        let mut vs = vec![self.start_vertex];
        vs.extend(self.edges.iter().map(|&id| g.edge(id).to));
        vs
    }

    /// Checks the path is a contiguous downward path of tree edges rooted in `t`.
    pub fn validate(&self, g: &Graph, t: &ShortestPathTree) -> Result<()> {
        if self.source != t.root {
            return Err(Error::InvalidPath(format!("path source {} is not the tree root {}", self.source, t.root)));
        }
        let Some(&first) = self.edges.first() else {
            return Err(Error::InvalidPath("empty path".into()));
        };
        if g.edge(first).from != self.start_vertex {
            return Err(Error::InvalidPath("first edge does not leave the start vertex".into()));
        }
        let mut prev = self.start_vertex;
        for &id in &self.edges {
            let e = g.edge(id);
            if e.from != prev {
                return Err(Error::InvalidPath(format!("edge ({}, {}) does not continue the path", e.from, e.to)));
            }
            if !t.is_tree_edge(e.from, e.to) {
                return Err(Error::InvalidPath(format!("edge ({}, {}) is not on the tree", e.from, e.to)));
            }
            prev = e.to;
        }
        Ok(())
    }
}

/// True iff the hanging subtrees `T_x(P)` of all paths are pairwise disjoint.
/// Every path is validated against the tree first.
pub fn is_independent(g: &Graph, t: &ShortestPathTree, paths: &[PathSpec]) -> Result<bool> {
    for p in paths {
        p.validate(g, t)?;
    }
    // Subtrees are disjoint iff no root is an ancestor of another; sorting by
    // pre-order lets each root be compared with its predecessor only.
    let mut roots: Vec<Vertex> = paths.iter().map(|p| p.subtree_root(g)).collect();
    roots.sort_by_key(|&r| t.pre[r]);
    let mut open: Option<Vertex> = None;
    for r in roots {
        if let Some(o) = open {
            if t.is_ancestor(o, r) {
                return Ok(false);
            }
        }
        open = Some(r);
    }
    Ok(true)
}

/// Uniformly random simple digraph with `m` distinct edges and weights in
/// `1..=max_w`. Deterministic per seed.
pub fn generate_random(n: usize, m: usize, max_w: Weight, seed: u64) -> Result<Graph> {
    if n > 0 && m > n * (n - 1) {
        return Err(Error::InvalidParameters(format!("m = {m} exceeds n(n-1) = {}", n * (n - 1))));
    }
    if max_w == 0 || max_w > MAX_WEIGHT {
        return Err(Error::InvalidParameters(format!("max_w must be in 1..={MAX_WEIGHT}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::new(n);
    for (u, v) in random_pairs(&mut rng, n, m, &HashSet::new()) {
        g.add_edge(u, v, rng.gen_range(1..=max_w))?;
    }
    Ok(g)
}

/// Random digraph containing a directed Hamiltonian cycle through a random
/// vertex order (so it is strongly connected), padded with uniformly random
/// extra edges up to `m` total. Requires `m >= n` when `n >= 2`.
pub fn generate_connected(n: usize, m: usize, max_w: Weight, seed: u64) -> Result<Graph> {
    if n >= 2 && m < n {
        return Err(Error::InvalidParameters(format!("need m >= n for a spanning cycle (m = {m}, n = {n})")));
    }
    if n > 0 && m > n * (n - 1) {
        return Err(Error::InvalidParameters(format!("m = {m} exceeds n(n-1) = {}", n * (n - 1))));
    }
    if max_w == 0 || max_w > MAX_WEIGHT {
        return Err(Error::InvalidParameters(format!("max_w must be in 1..={MAX_WEIGHT}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::new(n);
    let mut taken = HashSet::new();
    if n >= 2 {
        let mut order: Vec<Vertex> = (0..n).collect();
        order.shuffle(&mut rng);
        let cycle_len = if n == 2 { 2 } else { n };
        for i in 0..cycle_len {
            let (u, v) = (order[i], order[(i + 1) % n]);
            if taken.insert((u, v)) {
                g.add_edge(u, v, rng.gen_range(1..=max_w))?;
            }
        }
    }
    let extra = m - g.m();
    for (u, v) in random_pairs(&mut rng, n, extra, &taken) {
        g.add_edge(u, v, rng.gen_range(1..=max_w))?;
    }
    Ok(g)
}

fn random_pairs(rng: &mut ChaCha8Rng, n: usize, m: usize, exclude: &HashSet<(Vertex, Vertex)>) -> Vec<(Vertex, Vertex)> {
    let capacity = n * n.saturating_sub(1) - exclude.len();
    assert!(m <= capacity, "not enough free vertex pairs");
    if 2 * m > capacity {
        let mut all: Vec<_> =
            (0..n).flat_map(|u| (0..n).map(move |v| (u, v))).filter(|&(u, v)| u != v && !exclude.contains(&(u, v))).collect();
        all.shuffle(rng);
        all.truncate(m);
        return all;
    }
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(m);
    while out.len() < m {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v && !exclude.contains(&(u, v)) && seen.insert((u, v)) {
            out.push((u, v));
        }
    }
    out
}

/// Parses the plain-text graph format: a header line `n m`, then `m` lines
/// `u v w`. Blank lines and anything after `#` are ignored.
pub fn read_graph(bytes: &[u8]) -> Result<Graph> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::Parse { line: 0, msg: format!("not UTF-8: {e}") })?;
    let mut header: Option<(usize, usize)> = None;
    let mut g = Graph::new(0);
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parse = |s: &str| -> Result<u64> {
            s.parse::<u64>().map_err(|_| Error::Parse { line: line_no, msg: format!("expected a non-negative integer, got {s:?}") })
        };
        match header {
            None => {
                if fields.len() != 2 {
                    return Err(Error::Parse { line: line_no, msg: "header must be `n m`".into() });
                }
                let n = parse(fields[0])? as usize;
                let m = parse(fields[1])? as usize;
                header = Some((n, m));
                g = Graph::new(n);
            }
            Some(_) => {
                if fields.len() != 3 {
                    return Err(Error::Parse { line: line_no, msg: "edge lines must be `u v w`".into() });
                }
                let (u, v, w) = (parse(fields[0])? as usize, parse(fields[1])? as usize, parse(fields[2])?);
                g.add_edge(u, v, w).map_err(|e| Error::Parse { line: line_no, msg: e.to_string() })?;
            }
        }
    }
    let Some((_, m)) = header else {
        return Err(Error::Parse { line: 0, msg: "missing header".into() });
    };
    if g.m() != m {
        return Err(Error::Parse { line: text.lines().count(), msg: format!("header declares {m} edges, found {}", g.m()) });
    }
    Ok(g)
}

pub fn write_graph(g: &Graph) -> Vec<u8> {
    let mut s = String::new();
    let _ = writeln!(s, "{} {}", g.n(), g.m());
    for e in g.edges() {
        let _ = writeln!(s, "{} {} {}", e.from, e.to, e.weight);
    }
    s.into_bytes()
}
