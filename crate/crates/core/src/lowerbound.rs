//! Graph families from the set-disjointness reductions, with checkers for
//! the distance facts the reductions rely on.
//!
//! `Fig1` (replacement paths): a binary tree over `ℓ` leaves, `q` bit
//! paths of length `ℓ`, one shortcut path of length `ℓ - 1`, and `k` pairs
//! `(a_i, b_i)`. Failing an edge of the shortcut path leaves an `a_i`-`b_i`
//! path iff row `i` of the two bit matrices intersects.
//!
//! `Fig2` (second simple shortest paths): sources `a_i` reach `q` through
//! `c` or, when Alice's bit is set, also through `c'`. The second simple
//! distance `d₂(a_i, q)` reveals the bit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Dist, EdgeId, Graph, Vertex, INF};
use crate::{ceil_log2, oracle, Error, Result};

/// Two bit matrices of `rows × cols`, row-major: entry `(i, j)` is bit
/// `i·cols + j` (0-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DisjointnessInstance {
    pub rows: usize,
    pub cols: usize,
    pub bits_a: Vec<bool>,
    pub bits_b: Vec<bool>,
}

impl DisjointnessInstance {
    pub fn new(rows: usize, cols: usize, bits_a: Vec<bool>, bits_b: Vec<bool>) -> Result<Self> {
        if bits_a.len() != rows * cols || bits_b.len() != rows * cols {
            return Err(Error::InvalidParameters(format!("expected {} bits per side", rows * cols)));
        }
        Ok(DisjointnessInstance { rows, cols, bits_a, bits_b })
    }

    /// Independent fair coin flips on both sides.
    pub fn random(rows: usize, cols: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bits_a = (0..rows * cols).map(|_| rng.gen_bool(0.5)).collect();
        let bits_b = (0..rows * cols).map(|_| rng.gen_bool(0.5)).collect();
        DisjointnessInstance { rows, cols, bits_a, bits_b }
    }

    pub fn a(&self, i: usize, j: usize) -> bool {
        self.bits_a[i * self.cols + j]
    }

    pub fn b(&self, i: usize, j: usize) -> bool {
        self.bits_b[i * self.cols + j]
    }

    pub fn row_intersects(&self, i: usize) -> bool {
        (0..self.cols).any(|j| self.a(i, j) && self.b(i, j))
    }

    /// True iff the two sets are disjoint.
    pub fn disjoint(&self) -> bool {
        !(0..self.rows).any(|i| self.row_intersects(i))
    }
}

/// Outcome of one checked fact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClaimCheck {
    pub claim: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClaimReport {
    pub checks: Vec<ClaimCheck>,
}

impl ClaimReport {
    pub fn check(&mut self, claim: String, expected: impl ToString, actual: impl ToString, pass: bool) {
        self.checks.push(ClaimCheck { claim, expected: expected.to_string(), actual: actual.to_string(), pass });
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// The first failed check as an error.
    pub fn into_result(self) -> Result<()> {
        match self.checks.into_iter().find(|c| !c.pass) {
            None => Ok(()),
            Some(c) => Err(Error::ClaimViolated(format!("{}: expected {}, got {}", c.claim, c.expected, c.actual))),
        }
    }
}

fn show(d: Dist) -> String {
    if d == INF {
        "inf".into()
    } else {
        d.to_string()
    }
}

/// A `Fig1` graph and its named vertices.
#[derive(Clone, Debug)]
pub struct Fig1 {
    pub graph: Graph,
    pub k: usize,
    pub q: usize,
    pub ell: usize,
    pub a: Vec<Vertex>,
    pub b: Vec<Vertex>,
    /// `v*_0 .. v*_{ℓ-1}`.
    pub star_path: Vec<Vertex>,
    /// `paths[j] = v^j_0 .. v^j_ℓ`.
    pub paths: Vec<Vec<Vertex>>,
    /// `u_1 .. u_ℓ`.
    pub leaves: Vec<Vertex>,
    pub tree_root: Vertex,
    pub tree_height: usize,
    /// Edges of the shortcut path, any of which can serve as `e*`.
    pub star_edges: Vec<EdgeId>,
}

/// Builds the `Fig1` graph for `k` pairs, `q` bit paths and path length
/// `ell`. All edges have weight 1. Path vertex `t` of every path points to
/// leaf `u_max(t,1)`; tree edges point from child to parent.
pub fn build_fig1(k: usize, q: usize, ell: usize, bits: &DisjointnessInstance) -> Result<Fig1> {
    if k == 0 || q == 0 || ell < 2 {
        return Err(Error::InvalidParameters(format!("need k ≥ 1, q ≥ 1, ell ≥ 2 (got k={k}, q={q}, ell={ell})")));
    }
    if bits.rows != k || bits.cols != q {
        return Err(Error::InvalidParameters(format!("bit matrices are {}×{}, expected {k}×{q}", bits.rows, bits.cols)));
    }
    let mut next = 0;
    let mut take = |count: usize| {
        let ids: Vec<Vertex> = (next..next + count).collect();
        next += count;
        ids
    };
    let a = take(k);
    let b = take(k);
    let star_path = take(ell);
    let paths: Vec<Vec<Vertex>> = (0..q).map(|_| take(ell + 1)).collect();
    let leaves = take(ell);

    // Balanced binary tree over the leaves, built level by level.
    let mut tree_edges = Vec::new();
    let mut level = leaves.clone();
    let mut tree_height = 0;
    while level.len() > 1 {
        let mut up = Vec::with_capacity(level.len().div_ceil(2));
        for pair in level.chunks(2) {
            let parent = take(1)[0];
            for &c in pair {
                tree_edges.push((c, parent));
            }
            up.push(parent);
        }
        level = up;
        tree_height += 1;
    }
    let tree_root = level[0];
    let n = next;
    if 2 * k > n {
        return Err(Error::InvalidParameters(format!("k={k} exceeds half of the {n} vertices")));
    }

    let mut g = Graph::new(n);
    for (c, p) in tree_edges {
        g.add_edge(c, p, 1)?;
    }
    let leaf_of = |t: usize| leaves[t.max(1) - 1];
    for path in paths.iter().chain(std::iter::once(&star_path)) {
        for (t, &v) in path.iter().enumerate() {
            g.add_edge(v, leaf_of(t), 1)?;
        }
        for w in path.windows(2) {
            g.add_edge(w[0], w[1], 1)?;
        }
    }
    for i in 0..k {
        g.add_edge(a[i], star_path[0], 1)?;
        g.add_edge(star_path[ell - 1], b[i], 1)?;
        for (j, path) in paths.iter().enumerate() {
            if bits.a(i, j) {
                g.add_edge(a[i], path[0], 1)?;
            }
            if bits.b(i, j) {
                g.add_edge(path[ell], b[i], 1)?;
            }
        }
    }
    let star_edges = star_path.windows(2).map(|w| g.edge_id(w[0], w[1]).expect("path edge")).collect();
    Ok(Fig1 { graph: g, k, q, ell, a, b, star_path, paths, leaves, tree_root, tree_height, star_edges })
}

impl Fig1 {
    /// `d(a_i, b_i, e*)` for any `e*` on the shortcut path.
    pub fn expected_replacement(&self, i: usize, bits: &DisjointnessInstance) -> Dist {
        if bits.row_intersects(i) {
            self.ell as Dist + 2
        } else {
            INF
        }
    }

    /// Checks `d(a_i, b_i) = ℓ + 1` and the replacement distance for every
    /// pair and every edge of the shortcut path, plus the logarithmic tree
    /// height.
    pub fn verify_claims(&self, bits: &DisjointnessInstance) -> ClaimReport {
        let g = &self.graph;
        let mut report = ClaimReport::default();
        for i in 0..self.k {
            let d = oracle::sp(g, self.a[i])[self.b[i]];
            report.check(format!("d(a{}, b{})", i + 1, i + 1), self.ell + 1, show(d), d == self.ell as Dist + 1);
            let want = self.expected_replacement(i, bits);
            for (pos, &e) in self.star_edges.iter().enumerate() {
                let got = oracle::sp_avoiding(g, self.a[i], &[e])[self.b[i]];
                report.check(format!("d(a{}, b{}, e*{})", i + 1, i + 1, pos), show(want), show(got), got == want);
            }
        }
        let bound = ceil_log2(self.ell) as usize;
        report.check("tree height".into(), format!("≤ {bound}"), self.tree_height, self.tree_height <= bound);
        report
    }
}

/// A `Fig2` graph and its named vertices.
#[derive(Clone, Debug)]
pub struct Fig2 {
    pub graph: Graph,
    pub stretch: usize,
    pub directed: bool,
    pub bits_a: Vec<bool>,
    pub a: Vec<Vertex>,
    pub c: Vertex,
    pub c_prime: Vertex,
    pub hub: Vertex,
    pub p: Vertex,
    pub q: Vertex,
    /// Vertices Alice simulates.
    pub alice: Vec<bool>,
}

/// Builds the `Fig2` graph. Each `a_i` reaches `c` by a path of
/// `stretch` unit edges, and `c'` likewise iff `bits_a[i]`. `c` and `c'`
/// both lead to `p`, and `p` to `q`. The hub `b` reaches `c` and `c'` by
/// paths of `stretch` edges, which keeps the diameter constant without
/// shortening any `a_i`-`q` path. Undirected unless `directed`, in which
/// case every edge points towards `q`.
pub fn build_fig2(bits_a: &[bool], stretch: usize, directed: bool) -> Result<Fig2> {
    if bits_a.is_empty() || stretch == 0 {
        return Err(Error::InvalidParameters("need at least one bit and stretch ≥ 1".into()));
    }
    let n_bits = bits_a.len();
    let (c, c_prime, hub, p, q) = (n_bits, n_bits + 1, n_bits + 2, n_bits + 3, n_bits + 4);
    let mut next = n_bits + 5;
    let mut links = Vec::new();
    // `stretch` edges from `u` to `v` through fresh vertices.
    let mut chain = |u: Vertex, v: Vertex, links: &mut Vec<(Vertex, Vertex)>| {
        let mut prev = u;
        for _ in 1..stretch {
            links.push((prev, next));
            prev = next;
            next += 1;
        }
        links.push((prev, v));
    };
    for (i, &bit) in bits_a.iter().enumerate() {
        chain(i, c, &mut links);
        if bit {
            chain(i, c_prime, &mut links);
        }
    }
    chain(hub, c, &mut links);
    chain(hub, c_prime, &mut links);
    links.extend([(c, p), (c_prime, p), (p, q)]);
    let mut g = Graph::new(next);
    for (u, v) in links {
        g.add_edge(u, v, 1)?;
        if !directed {
            g.add_edge(v, u, 1)?;
        }
    }
    let alice = (0..g.n()).map(|v| v != p && v != q).collect();
    Ok(Fig2 { graph: g, stretch, directed, bits_a: bits_a.to_vec(), a: (0..n_bits).collect(), c, c_prime, hub, p, q, alice })
}

impl Fig2 {
    /// `d₂(a_i, q)` the reduction relies on: `k + 2` when the bit is set;
    /// otherwise `3k + 2` undirected and `∞` directed.
    pub fn expected_d2(&self, i: usize) -> Dist {
        let k = self.stretch as Dist;
        match (self.bits_a[i], self.directed) {
            (true, _) => k + 2,
            (false, false) => 3 * k + 2,
            (false, true) => INF,
        }
    }

    /// Undirected links with one end on each side of the Alice/Bob cut.
    pub fn crossing_links(&self) -> usize {
        let mut pairs: Vec<(Vertex, Vertex)> = self
            .graph
            .edges()
            .iter()
            .filter(|e| self.alice[e.from] != self.alice[e.to])
            .map(|e| (e.from.min(e.to), e.from.max(e.to)))
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        pairs.len()
    }

    /// Recovers Alice's bits from the `d₂(a_i, q)` column.
    pub fn decode_bits(&self, d2_column: &[Dist]) -> Vec<bool> {
        d2_column.iter().map(|&d| d == self.stretch as Dist + 2).collect()
    }

    pub fn verify_claims(&self) -> ClaimReport {
        let g = &self.graph;
        let mut report = ClaimReport::default();
        let k = self.stretch as Dist;
        for (i, &a) in self.a.iter().enumerate() {
            let d = oracle::sp(g, a)[self.q];
            report.check(format!("d(a{}, q)", i + 1), k + 2, show(d), d == k + 2);
            let d2 = oracle::sisp2(g, a, self.q).unwrap_or(INF);
            let want = self.expected_d2(i);
            let ok = if self.bits_a[i] || self.directed { d2 == want } else { d2 >= want && d2 != INF };
            report.check(format!("d2(a{}, q)", i + 1), show(want), show(d2), ok);
        }
        let crossing = self.crossing_links();
        report.check("crossing links".into(), 2, crossing, crossing == 2);
        report
    }
}
