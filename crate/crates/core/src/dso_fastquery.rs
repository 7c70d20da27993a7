//! Distance sensitivity oracle with `O(k + D)`-round batched queries.
//!
//! Preprocessing stores, at every node, distances avoiding edges close to
//! either end of a shortest path, plus distances avoiding whole intervals
//! between level vertices of every shortest-path tree. A query `(x, y, e)`
//! is then answered from stored values after a constant number of pipelined
//! broadcasts.
//!
//! Level vertices: with `r = ⌈√n⌉`, all vertices at depths `i·r` (type 2) and
//! all vertices at the depth of any vertex with at least two children of
//! subtree size `≥ r` (type 1). Every downward tree path of `r` hops meets a
//! level depth, and there are at most `2r` level depths.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::exclude::{run_instances, ExcludeOptions, ExcludeRequest};
use crate::graph::{sat_add, Dist, EdgeId, Graph, PathSpec, ShortestPathTree, Vertex};
use crate::query::{announce, AnswerCase, BatchAnswers, Query, QueryAnswer, QueryBatch};
use crate::sim::{apsp, broadcast, broadcast_many, charge_scheduled, upcast, Delivery, NetworkRun, Outbox, Protocol, RoundCtx, Sim, Trace};
use crate::{ceil_sqrt, Error, Result};

/// Level structure of one shortest-path tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelCut {
    pub root: Vertex,
    /// Hop threshold `⌈√n⌉`.
    pub r: usize,
    /// Depths `i·r` present in the tree.
    pub type2_depths: Vec<usize>,
    /// Depths of vertices with two or more children of size `≥ r`.
    pub type1_depths: Vec<usize>,
    /// Vertices that make their depth type 1.
    pub generators: Vec<Vertex>,
    /// Sorted union of both kinds.
    pub level_depths: Vec<usize>,
    pub is_level: Vec<bool>,
    /// Interval paths between consecutive level depths, split into
    /// independent sets. Only intervals some query can consult are kept:
    /// the upper depth is at least `r`, and the lower end has a descendant
    /// `r + 1` hops below the upper depth.
    pub interval_sets: Vec<Vec<PathSpec>>,
}

impl LevelCut {
    /// Largest level depth `≤ depth`.
    pub fn level_at_or_above(&self, depth: usize) -> Option<usize> {
        let i = self.level_depths.partition_point(|&d| d <= depth);
        i.checked_sub(1).map(|i| self.level_depths[i])
    }

    /// Smallest level depth `≥ depth`.
    pub fn level_at_or_below(&self, depth: usize) -> Option<usize> {
        self.level_depths.get(self.level_depths.partition_point(|&d| d < depth)).copied()
    }
}

/// Level vertices and interval sets of `tree`, with `r = ⌈√n⌉`.
pub fn tree_cut(g: &Graph, tree: &ShortestPathTree) -> LevelCut {
    tree_cut_with(g, tree, ceil_sqrt(g.n()).max(1))
}

/// [`tree_cut`] with an explicit hop threshold `r ≥ 1`.
pub fn tree_cut_with(g: &Graph, tree: &ShortestPathTree, r: usize) -> LevelCut {
    assert!(r >= 1, "hop threshold must be positive");
    let n = tree.n();
    let height = tree.height();
    let type2_depths: Vec<usize> = (1..=r).map(|i| i * r).take_while(|&d| d <= height).collect();
    let generators: Vec<Vertex> =
        (0..n).filter(|&v| tree.reachable(v) && tree.children[v].iter().filter(|&&c| tree.subtree_size[c] >= r).count() >= 2).collect();
    let type1: BTreeSet<usize> = generators.iter().map(|&v| tree.depth[v]).collect();
    let type1_depths: Vec<usize> = type1.iter().copied().collect();
    let levels: BTreeSet<usize> = type1.into_iter().chain(type2_depths.iter().copied()).collect();
    let level_depths: Vec<usize> = levels.into_iter().collect();
    let is_level = (0..n).map(|v| tree.reachable(v) && level_depths.binary_search(&tree.depth[v]).is_ok()).collect();

    // Deepest depth reached inside each subtree.
    let mut reach = tree.depth.clone();
    let mut order: Vec<Vertex> = (0..n).filter(|&v| tree.reachable(v)).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(tree.depth[v]));
    for &v in &order {
        if let Some(p) = tree.parent[v] {
            reach[p] = reach[p].max(reach[v]);
        }
    }

    let mut interval_sets = Vec::new();
    for w in level_depths.windows(2) {
        let (d1, d2) = (w[0], w[1]);
        if d1 < r {
            continue;
        }
        let mut groups: BTreeMap<Vertex, Vec<PathSpec>> = BTreeMap::new();
        for b in (0..n).filter(|&b| tree.reachable(b) && tree.depth[b] == d2 && reach[b] > d1 + r) {
            let mut vs = vec![b];
            while tree.depth[*vs.last().unwrap()] > d1 {
                vs.push(tree.parent[*vs.last().unwrap()].expect("non-root has a parent"));
            }
            vs.reverse();
            let path = PathSpec::from_vertices(g, vs[0], &vs).map(|p| PathSpec { source: tree.root, ..p });
            groups.entry(vs[1]).or_default().push(path.expect("tree edges are graph edges"));
        }
        let width = groups.values().map(Vec::len).max().unwrap_or(0);
        for j in 0..width {
            interval_sets.push(groups.values().filter_map(|gr| gr.get(j).cloned()).collect());
        }
    }

    LevelCut { root: tree.root, r, type2_depths, type1_depths, generators, level_depths, is_level, interval_sets }
}

/// Convergecast of small values to the root, each forwarded at most once
/// per node.
struct Gather<'a> {
    tree: &'a ShortestPathTree,
    seen: Vec<BTreeSet<u64>>,
}

impl Protocol for Gather<'_> {
    type Msg = u64;

    fn words(&self, _: &u64) -> usize {
        1
    }

    fn start(&mut self, out: &mut Outbox<u64>) {
        for v in 0..self.tree.n() {
            if let Some(p) = self.tree.parent[v] {
                for &x in &self.seen[v] {
                    out.send(v, p, x);
                }
            }
        }
    }

    fn on_round(&mut self, _: RoundCtx, inbox: Vec<Delivery<u64>>, out: &mut Outbox<u64>) {
        for d in inbox {
            if self.seen[d.to].insert(d.msg) {
                if let Some(p) = self.tree.parent[d.to] {
                    out.send(d.to, p, d.msg);
                }
            }
        }
    }
}

/// Every level vertex sends its id down its subtree, so each node learns
/// its level ancestors (itself included).
struct LevelChain<'a> {
    tree: &'a ShortestPathTree,
    is_level: &'a [bool],
    chain: Vec<Vec<Vertex>>,
}

impl LevelChain<'_> {
    fn pass(&mut self, v: Vertex, id: Vertex, out: &mut Outbox<Vertex>) {
        self.chain[v].push(id);
        for &c in &self.tree.children[v] {
            out.send(v, c, id);
        }
    }
}

impl Protocol for LevelChain<'_> {
    type Msg = Vertex;

    fn words(&self, _: &Vertex) -> usize {
        1
    }

    fn start(&mut self, out: &mut Outbox<Vertex>) {
        for v in 0..self.tree.n() {
            if self.is_level[v] {
                self.pass(v, v, out);
            }
        }
    }

    fn on_round(&mut self, _: RoundCtx, inbox: Vec<Delivery<Vertex>>, out: &mut Outbox<Vertex>) {
        for d in inbox {
            self.pass(d.to, d.msg, out);
        }
    }
}

/// Everything the nodes store after preprocessing. Per-node data is indexed
/// by the node that holds it.
#[derive(Clone, Debug)]
pub struct FastQueryState {
    pub n: usize,
    pub r: usize,
    /// `dist[x][y] = d(x, y)`, known at `y` (forward trees) and at `x`
    /// (reverse trees).
    pub dist: Vec<Vec<Dist>>,
    /// `T_x` for every `x`; node `v` knows its own parent, depth and
    /// pre-order interval in each.
    pub trees: Vec<ShortestPathTree>,
    pub cuts: Vec<LevelCut>,
    /// `level_chain[x][v]`: level ancestors of `v` in `T_x` (itself
    /// included), by increasing depth.
    pub level_chain: Vec<Vec<Vec<Vertex>>>,
    /// At `y`: `d(x, y, e)` keyed by `(x, e)` for every edge `e` of `T_x`
    /// that is at most `r` hops below `x` on the path to `y`.
    pub near_source: Vec<HashMap<(Vertex, EdgeId), Dist>>,
    /// At `x`: `d(x, y, e)` keyed by `(y, e)` for every edge `e` at most `r`
    /// hops before `y` on the reverse-tree path from `x`.
    pub near_sink: Vec<HashMap<(Vertex, EdgeId), Dist>>,
    /// At `y`: `d(x, y, [a, b])` keyed by `(x, b)` for interval paths of
    /// `T_x` ending at an ancestor `b` of `y`.
    pub interval: Vec<HashMap<(Vertex, Vertex), Dist>>,
}

/// The three candidates of the level-vertex rule for a long-range query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LevelTerms {
    pub a: Vertex,
    pub b: Vertex,
    /// `d(x, a) + d(a, y, e)`.
    pub via_a: Dist,
    /// `d(x, b, e) + d(b, y)`.
    pub via_b: Dist,
    /// `d(x, y, [a, b])`.
    pub skip: Dist,
}

impl LevelTerms {
    pub fn min(&self) -> Dist {
        self.via_a.min(self.via_b).min(self.skip)
    }
}

/// How the head `v` of the failed edge classifies a query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Plan {
    OffPath,
    /// The edge is at most `r` hops below `x`.
    NearSource,
    /// The edge is at most `r` hops above `y`.
    NearSink,
    /// Neither; `a` is the closest level vertex above the edge and `pos`
    /// the depth of its head.
    Level {
        a: Vertex,
        pos: usize,
    },
}

impl FastQueryState {
    /// Words stored at node `v`.
    pub fn node_words(&self, v: Vertex) -> usize {
        let chains: usize = self.level_chain.iter().map(|c| c[v].len()).sum();
        let stores = self.near_source[v].len() + self.near_sink[v].len() + self.interval[v].len();
        // Two distances and four tree labels per source, three words per entry.
        6 * self.n + chains + 3 * stores
    }

    pub fn max_node_words(&self) -> usize {
        (0..self.n).map(|v| self.node_words(v)).max().unwrap_or(0)
    }

    fn plan(&self, x: Vertex, y: Vertex, u: Vertex, v: Vertex) -> Plan {
        let t = &self.trees[x];
        if t.parent[v] != Some(u) || !t.is_ancestor(v, y) {
            return Plan::OffPath;
        }
        let pos = t.depth[v];
        if pos <= self.r {
            Plan::NearSource
        } else if t.depth[y] + 1 - pos <= self.r {
            Plan::NearSink
        } else {
            let a = *self.level_chain[x][u].last().expect("a level depth lies within r hops above the edge");
            Plan::Level { a, pos }
        }
    }

    /// Terms of the level-vertex rule for `(x, y, e)`, if that rule applies.
    pub fn level_terms(&self, g: &Graph, x: Vertex, y: Vertex, e: EdgeId) -> Option<LevelTerms> {
        let edge = g.edge(e);
        match self.plan(x, y, edge.from, edge.to) {
            Plan::Level { a, pos } => Some(self.terms(x, y, e, a, self.b_for(x, y, pos))),
            _ => None,
        }
    }

    /// Level ancestor of `y` at the first level depth `≥ pos`.
    fn b_for(&self, x: Vertex, y: Vertex, pos: usize) -> Vertex {
        let t = &self.trees[x];
        *self.level_chain[x][y].iter().find(|&&b| t.depth[b] >= pos).expect("a level depth lies within r hops below the edge")
    }

    fn terms(&self, x: Vertex, y: Vertex, e: EdgeId, a: Vertex, b: Vertex) -> LevelTerms {
        let via_a = sat_add(self.dist[x][a], self.near_source[y].get(&(a, e)).copied().unwrap_or(self.dist[a][y]));
        let via_b = sat_add(self.near_sink[x].get(&(b, e)).copied().unwrap_or(self.dist[x][b]), self.dist[b][y]);
        let skip = *self.interval[y].get(&(x, b)).expect("interval exclude covers every consulted interval");
        LevelTerms { a, b, via_a, via_b, skip }
    }

    /// Centralized evaluation of the query rules, as carried out by the
    /// nodes during [`answer_batch_fast`].
    pub fn lookup(&self, g: &Graph, x: Vertex, y: Vertex, e: EdgeId) -> (Dist, AnswerCase) {
        let edge = g.edge(e);
        match self.plan(x, y, edge.from, edge.to) {
            Plan::OffPath => (self.dist[x][y], AnswerCase::OffPath),
            Plan::NearSource => (self.near_source[y][&(x, e)], AnswerCase::ShortHop),
            Plan::NearSink => (self.near_sink[x].get(&(y, e)).copied().unwrap_or(self.dist[x][y]), AnswerCase::ShortHop),
            Plan::Level { a, pos } => (self.terms(x, y, e, a, self.b_for(x, y, pos)).min(), AnswerCase::LevelVertex),
        }
    }
}

/// Single-edge paths for the tree edges entering depths `1..=r` of `tree`,
/// one request per depth.
fn hop_requests(g: &Graph, tree: &ShortestPathTree, r: usize) -> Vec<ExcludeRequest> {
    let mut by_depth = vec![Vec::new(); r.min(tree.height())];
    for v in 0..tree.n() {
        if let Some(p) = tree.parent[v] {
            if tree.depth[v] <= r {
                by_depth[tree.depth[v] - 1].push(PathSpec::single_edge(g, tree.root, g.edge_id(p, v).expect("tree edge")));
            }
        }
    }
    by_depth.into_iter().map(|paths| ExcludeRequest::new(tree.root, paths)).collect()
}

/// Runs `reqs` (grouped per source tree) as scheduled instances and hands
/// each result's entries to `store` as `(source, y, path, distance)`.
fn run_excludes(
    run: &mut NetworkRun<'_>,
    g: &Graph,
    trees: &[ShortestPathTree],
    reqs: &[ExcludeRequest],
    traces: &mut Vec<Trace>,
    mut store: impl FnMut(Vertex, Vertex, &PathSpec, Dist),
) {
    let refs: Vec<&ShortestPathTree> = reqs.iter().map(|q| &trees[q.source]).collect();
    debug_assert!(reqs.iter().all(|q| q.validate(g, &trees[q.source]).is_ok()));
    let (results, ts) = run_instances(run, g, reqs, Some(&refs), ExcludeOptions::default());
    traces.extend(ts);
    for (req, res) in reqs.iter().zip(&results) {
        for (y, i, d) in res.entries() {
            store(req.source, y, &req.paths[i], d);
        }
    }
}

/// Preprocessing. Phases: `apsp` (both directions), `hop_exclude`,
/// `tree_cut`, `interval_exclude`, plus the communication tree used by the
/// queries (`preprocess`).
pub fn preprocess_fast_query(run: &mut NetworkRun<'_>) -> Result<FastQueryState> {
    let g = run.graph();
    let n = g.n();
    if !run.topology().is_connected() {
        return Err(Error::InvalidParameters("the underlying undirected graph must be connected".into()));
    }
    let r = ceil_sqrt(n).max(1);
    run.comm_tree(0, "preprocess");
    let gr = g.reversed();
    let trees = apsp(run, g, "apsp");
    let rev_trees = apsp(run, &gr, "apsp");
    let dist: Vec<Vec<Dist>> = trees.iter().map(|t| t.dist.clone()).collect();

    // Line 2, in G and in the reverse graph.
    let mut near_source = vec![HashMap::new(); n];
    let mut near_sink = vec![HashMap::new(); n];
    let mut traces = Vec::new();
    let reqs: Vec<ExcludeRequest> = trees.iter().flat_map(|t| hop_requests(g, t, r)).collect();
    run_excludes(run, g, &trees, &reqs, &mut traces, |x, y, p, d| {
        near_source[y].insert((x, p.edges[0]), d);
    });
    let reqs: Vec<ExcludeRequest> = rev_trees.iter().flat_map(|t| hop_requests(&gr, t, r)).collect();
    run_excludes(run, &gr, &rev_trees, &reqs, &mut traces, |y, x, p, d| {
        near_sink[x].insert((y, p.edges[0]), d);
    });
    charge_scheduled(run, "hop_exclude", &traces);

    // Lines 4-5: subtree sizes, type-1 depths to the root and back down,
    // then every node learns its level ancestors.
    let cuts: Vec<LevelCut> = trees.iter().map(|t| tree_cut_with(g, t, r)).collect();
    let sim = run.sim();
    let (level_chain, traces): (Vec<_>, Vec<_>) = trees.iter().zip(&cuts).map(|(t, cut)| distributed_cut(sim, t, cut)).unzip();
    charge_scheduled(run, "tree_cut", &traces);

    // Line 6.
    let mut interval = vec![HashMap::new(); n];
    let mut traces = Vec::new();
    let reqs: Vec<ExcludeRequest> =
        cuts.iter().flat_map(|c| c.interval_sets.iter().map(|s| ExcludeRequest::new(c.root, s.clone()))).collect();
    run_excludes(run, g, &trees, &reqs, &mut traces, |x, y, p, d| {
        let b = g.edge(*p.edges.last().expect("non-empty path")).to;
        if trees[x].is_ancestor(b, y) {
            interval[y].insert((x, b), d);
        }
    });
    charge_scheduled(run, "interval_exclude", &traces);

    Ok(FastQueryState { n, r, dist, trees, cuts, level_chain, near_source, near_sink, interval })
}

/// Message-level tree cutting on one tree; returns every node's level
/// ancestors. The result is checked against the centralized cut.
fn distributed_cut(sim: Sim<'_>, tree: &ShortestPathTree, cut: &LevelCut) -> (Vec<Vec<Vertex>>, Trace) {
    let n = tree.n();
    let sizes = upcast(sim, tree, &vec![vec![1]; n], |a, b| a + b);
    let mut trace = sizes.trace;
    let seen: Vec<BTreeSet<u64>> = (0..n)
        .map(|v| {
            let big = tree.children[v].iter().filter(|&&c| sizes.partial[c][0] >= cut.r as u64).count();
            if tree.reachable(v) && big >= 2 {
                BTreeSet::from([tree.depth[v] as u64])
            } else {
                BTreeSet::new()
            }
        })
        .collect();
    let mut gather = Gather { tree, seen };
    trace.then(sim.execute(&mut gather));
    let type1: Vec<usize> = gather.seen[tree.root].iter().map(|&d| d as usize).collect();
    assert_eq!(type1, cut.type1_depths, "distributed and centralized cuts disagree");
    trace.then(broadcast(sim, tree, type1.len()).trace);
    let mut chain = LevelChain { tree, is_level: &cut.is_level, chain: vec![Vec::new(); n] };
    trace.then(sim.execute(&mut chain));
    let mut chain = chain.chain;
    for c in &mut chain {
        c.sort_by_key(|&a| tree.depth[a]);
    }
    (chain, trace)
}

/// Answers a batch from the preprocessed state; charged to the `query`
/// phase. After the queries are announced, five pipelined broadcast waves
/// over the communication tree carry: the sink's tree position, the edge
/// head's classification, the sink's level vertex `b`, the source's stored
/// values, and finally the answers.
pub fn answer_batch_fast(run: &mut NetworkRun<'_>, state: &FastQueryState, batch: &QueryBatch) -> BatchAnswers {
    let g = run.graph();
    let start = run.ledger().rounds();
    let resolved: Vec<_> = batch.queries.iter().map(|q| q.resolve(g)).collect();
    let valid: Vec<bool> = resolved.iter().map(Result::is_ok).collect();
    let mut trace = announce(run, batch, &valid);
    let tree = run.comm_tree(0, "query");
    let sim = run.sim();
    let mut wave = |records: Vec<(Vertex, usize)>| {
        let out = broadcast_many(sim, &tree, &records);
        debug_assert!(out.complete(records.len()));
        trace.then(out.trace);
    };

    let live: Vec<usize> = (0..batch.len()).filter(|&i| valid[i]).collect();
    let q = |i: usize| batch.queries[i];
    // Wave 1: y sends its pre-order index and depth in T_x.
    wave(live.iter().map(|&i| (q(i).y, 2)).collect());
    // Wave 2: v classifies the query.
    let plans: Vec<Plan> = live.iter().map(|&i| state.plan(q(i).x, q(i).y, q(i).u, q(i).v)).collect();
    wave(live.iter().map(|&i| (q(i).v, 2)).collect());
    // Wave 3: y names its level vertex below the edge.
    let bs: Vec<Option<Vertex>> = live
        .iter()
        .zip(&plans)
        .map(|(&i, p)| match *p {
            Plan::Level { pos, .. } => Some(state.b_for(q(i).x, q(i).y, pos)),
            _ => None,
        })
        .collect();
    wave(live.iter().zip(&bs).filter(|(_, b)| b.is_some()).map(|(&i, _)| (q(i).y, 1)).collect());
    // Wave 4: x sends what it stores.
    wave(
        live.iter()
            .zip(&plans)
            .filter_map(|(&i, p)| match p {
                Plan::NearSink => Some((q(i).x, 1)),
                Plan::Level { .. } => Some((q(i).x, 2)),
                _ => None,
            })
            .collect(),
    );
    // Wave 5: y answers.
    wave(live.iter().map(|&i| (q(i).y, 1)).collect());
    run.charge("query", &trace);

    let mut answers: Vec<QueryAnswer> =
        batch.queries.iter().zip(&resolved).map(|(q, r)| QueryAnswer { query: *q, result: r.map(|_| 0), case: None }).collect();
    for (j, &i) in live.iter().enumerate() {
        let Query { x, y, .. } = q(i);
        let e = resolved[i].expect("live queries resolve");
        let (d, case) = match plans[j] {
            Plan::OffPath => (state.dist[x][y], AnswerCase::OffPath),
            Plan::NearSource => (state.near_source[y][&(x, e)], AnswerCase::ShortHop),
            Plan::NearSink => (state.near_sink[x].get(&(y, e)).copied().unwrap_or(state.dist[x][y]), AnswerCase::ShortHop),
            Plan::Level { a, .. } => (state.terms(x, y, e, a, bs[j].expect("b chosen in wave 3")).min(), AnswerCase::LevelVertex),
        };
        answers[i].result = Ok(d);
        answers[i].case = Some(case);
    }
    BatchAnswers { answers, rounds: run.ledger().rounds() - start }
}
