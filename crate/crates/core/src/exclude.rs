//! Excluded shortest paths.
//!
//! For a source `x` and a set of independent paths on `T_x`, every vertex `y`
//! hanging below a path `P` learns `d(x, y, P)`, its distance once all edges
//! of `P` are removed. Only vertices of `T_x(P)` are affected; the algorithm
//! computes, for each `z ∈ T_x(P)`, the best way to enter the subtree from
//! outside (`d*`), then finishes with one shortest-path computation inside the
//! subtrees seeded with those values.

use rayon::prelude::*;

use crate::graph::{build_sp_tree, is_independent, sat_add, Dist, EdgeId, Graph, PathSpec, ShortestPathTree, Vertex, INF};
use crate::sim::{charge_scheduled, downcast, sssp, sssp_keys, CostModel, Delivery, NetworkRun, Outbox, Protocol, RoundCtx, Sim, Trace};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExcludeRequest {
    pub source: Vertex,
    pub paths: Vec<PathSpec>,
}

impl ExcludeRequest {
    pub fn new(source: Vertex, paths: Vec<PathSpec>) -> Self {
        ExcludeRequest { source, paths }
    }

    /// Checks that every path lies on `tree` and that the set is independent.
    pub fn validate(&self, g: &Graph, tree: &ShortestPathTree) -> Result<()> {
        g.check_vertex(self.source)?;
        for p in &self.paths {
            if p.source != self.source {
                return Err(Error::InvalidPath(format!("path rooted at {} in a request for source {}", p.source, self.source)));
            }
        }
        if !is_independent(g, tree, &self.paths)? {
            return Err(Error::NotIndependent(format!("paths of source {}", self.source)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ExcludeOptions {
    /// On unit-weight graphs, replace the final shortest-path computation by
    /// a BFS in which `z` starts at round `d*(x, z)`.
    pub unweighted_bfs: bool,
}

/// Output of one source: `entry[y] = Some((i, d(x, y, P_i)))` for `y` below
/// path `i`, `None` for unaffected vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExcludeResult {
    pub source: Vertex,
    pub tree: ShortestPathTree,
    pub entry: Vec<Option<(usize, Dist)>>,
}

impl ExcludeResult {
    /// `d(x, y, P_path)` if `y` lies below that path.
    pub fn get(&self, y: Vertex, path: usize) -> Option<Dist> {
        match self.entry[y] {
            Some((i, d)) if i == path => Some(d),
            _ => None,
        }
    }

    /// `(y, path index, distance)` for every stored entry.
    pub fn entries(&self) -> impl Iterator<Item = (Vertex, usize, Dist)> + '_ {
        self.entry.iter().enumerate().filter_map(|(y, e)| e.map(|(i, d)| (y, i, d)))
    }
}

/// Line 3: every reached node tells its out-neighbours its distance and, if
/// it lies below a path, that path's label.
struct Exchange<'a> {
    g: &'a Graph,
    dist: &'a [Dist],
    label: &'a [Option<usize>],
    on_path: &'a [bool],
    best: Vec<Dist>,
}

impl Protocol for Exchange<'_> {
    type Msg = (Dist, Option<usize>);

    fn words(&self, msg: &Self::Msg) -> usize {
        1 + msg.1.is_some() as usize
    }

    fn start(&mut self, out: &mut Outbox<Self::Msg>) {
        for (_, e) in self.g.edges().iter().enumerate().filter(|(_, e)| self.dist[e.from] != INF) {
            out.send(e.from, e.to, (self.dist[e.from], self.label[e.from]));
        }
    }

    fn on_round(&mut self, _: RoundCtx, inbox: Vec<Delivery<Self::Msg>>, _: &mut Outbox<Self::Msg>) {
        for d in inbox {
            let z = d.to;
            let Some(lz) = self.label[z] else { continue };
            let id = self.g.edge_id(d.from, z).expect("message along a graph edge");
            if d.msg.1 == Some(lz) || self.on_path[id] {
                continue;
            }
            self.best[z] = self.best[z].min(sat_add(d.msg.0, self.g.edge(id).weight));
        }
    }
}

/// BFS inside the excluded subtrees in which `z` joins at round `d*(x, z)`.
struct DelayedBfs<'a, F> {
    g: &'a Graph,
    allowed: F,
    dist: Vec<Dist>,
    sent: Vec<bool>,
}

impl<F: Fn(EdgeId) -> bool> DelayedBfs<'_, F> {
    fn fire(&mut self, round: Dist, out: &mut Outbox<()>) {
        for v in 0..self.g.n() {
            if !self.sent[v] && self.dist[v] == round {
                self.sent[v] = true;
                for &id in self.g.out_edges(v) {
                    if (self.allowed)(id) {
                        out.send(v, self.g.edge(id).to, ());
                    }
                }
            }
        }
    }
}

impl<F: Fn(EdgeId) -> bool> Protocol for DelayedBfs<'_, F> {
    type Msg = ();

    fn words(&self, _: &()) -> usize {
        1
    }

    fn start(&mut self, out: &mut Outbox<()>) {
        self.fire(0, out);
    }

    fn on_round(&mut self, ctx: RoundCtx, inbox: Vec<Delivery<()>>, out: &mut Outbox<()>) {
        for d in inbox {
            self.dist[d.to] = self.dist[d.to].min(ctx.round);
        }
        self.fire(ctx.round, out);
    }

    fn active(&self) -> bool {
        (0..self.g.n()).any(|v| !self.sent[v] && self.dist[v] != INF)
    }
}

/// One run of the algorithm for a validated request, standalone. If `tree`
/// is given it is used as `T_x` and the first shortest-path computation is
/// skipped.
pub(crate) fn exclude_instance(
    sim: Sim<'_>,
    g: &Graph,
    req: &ExcludeRequest,
    tree: Option<&ShortestPathTree>,
    cost: CostModel,
    opts: ExcludeOptions,
) -> (ExcludeResult, Trace) {
    let n = g.n();
    let mut trace = Trace::default();
    let tree = match tree {
        Some(t) => t.clone(),
        None => {
            let (t, tr) = sssp(sim, g, req.source, |_| true, cost);
            trace.then(tr);
            t
        }
    };

    // Line 2: the subtree below each path learns the path's label.
    let items: Vec<(Vertex, u64)> = req.paths.iter().enumerate().map(|(i, p)| (p.subtree_root(g), i as u64)).collect();
    let dc = downcast(sim, &tree, &items);
    trace.then(dc.trace);
    let mut label = vec![None; n];
    for (v, got) in dc.received.iter().enumerate() {
        debug_assert!(got.len() <= 1, "independent paths give each vertex at most one label");
        label[v] = got.first().map(|&i| i as usize);
    }
    let mut on_path = vec![false; g.m()];
    for p in &req.paths {
        for &e in &p.edges {
            on_path[e] = true;
        }
    }

    // Lines 3-4: d*(x, z) from in-neighbours outside z's subtree.
    let mut ex = Exchange { g, dist: &tree.dist, label: &label, on_path: &on_path, best: vec![INF; n] };
    trace.then(sim.execute(&mut ex));
    let best = ex.best;

    // Line 5: shortest paths inside each subtree, seeded with d*.
    let allowed = |id: EdgeId| {
        let e = g.edge(id);
        !on_path[id] && label[e.from].is_some() && label[e.from] == label[e.to]
    };
    let dist: Vec<Dist> = if opts.unweighted_bfs && g.is_unit_weight() {
        let mut p = DelayedBfs { g, allowed, dist: best, sent: vec![false; n] };
        trace.then(sim.execute(&mut p));
        p.dist
    } else {
        let seeds: Vec<(Vertex, (Dist, u32))> = (0..n).filter(|&z| best[z] != INF).map(|z| (z, (best[z], 0))).collect();
        let (keys, tr) = sssp_keys(sim, g, &seeds, allowed, cost);
        trace.then(tr);
        keys.into_iter().map(|k| k.0).collect()
    };

    let entry = (0..n).map(|y| label[y].map(|i| (i, dist[y]))).collect();
    (ExcludeResult { source: req.source, tree, entry }, trace)
}

fn validated_tree(g: &Graph, req: &ExcludeRequest) -> Result<ShortestPathTree> {
    g.check_vertex(req.source)?;
    let tree = build_sp_tree(g, req.source);
    req.validate(g, &tree)?;
    Ok(tree)
}

/// Algorithm for a single source, charged to the `exclude` phase.
pub fn exclude_single_source(run: &mut NetworkRun<'_>, req: &ExcludeRequest, opts: ExcludeOptions) -> Result<ExcludeResult> {
    validated_tree(run.graph(), req)?;
    let (res, trace) = exclude_instance(run.sim(), run.graph(), req, None, run.cost_model(), opts);
    run.charge("exclude", &trace);
    Ok(res)
}

/// All requests run as independent instances combined by random-delay
/// scheduling, charged to the `exclude` phase. Every request is validated
/// before any round is spent.
pub fn exclude_multi_source(run: &mut NetworkRun<'_>, reqs: &[ExcludeRequest], opts: ExcludeOptions) -> Result<Vec<ExcludeResult>> {
    for req in reqs {
        validated_tree(run.graph(), req)?;
    }
    let (results, traces) = run_instances(run, run.graph(), reqs, None, opts);
    charge_scheduled(run, "exclude", &traces);
    Ok(results)
}

/// Runs every request on `g` (the run graph or its reverse) standalone, in
/// parallel; `trees[i]`, when given, is the already known tree of
/// `reqs[i]`'s source.
pub(crate) fn run_instances(
    run: &NetworkRun<'_>,
    g: &Graph,
    reqs: &[ExcludeRequest],
    trees: Option<&[&ShortestPathTree]>,
    opts: ExcludeOptions,
) -> (Vec<ExcludeResult>, Vec<Trace>) {
    let sim = run.sim();
    let cost = run.cost_model();
    reqs.par_iter().enumerate().map(|(i, req)| exclude_instance(sim, g, req, trees.map(|t| t[i]), cost, opts)).unzip()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate_connected;
    use crate::oracle;
    use crate::sim::SimConfig;

    fn run_single(g: &Graph, source: Vertex, paths: &[&[Vertex]]) -> ExcludeResult {
        let mut run = NetworkRun::new(g, SimConfig::default()).unwrap();
        let paths = paths.iter().map(|p| PathSpec::from_vertices(g, source, p).unwrap()).collect();
        exclude_single_source(&mut run, &ExcludeRequest::new(source, paths), ExcludeOptions::default()).unwrap()
    }

    #[test]
    fn path_graph_has_no_detour() {
        let g = Graph::from_edges(3, [(0, 1, 1), (1, 2, 1)]).unwrap();
        let res = run_single(&g, 0, &[&[0, 1]]);
        assert_eq!(res.get(1, 0), Some(INF));
        assert_eq!(res.get(2, 0), Some(INF));
        assert_eq!(res.entry[0], None);
    }

    #[test]
    fn triangle_detour() {
        let g = Graph::from_edges(3, [(0, 1, 1), (0, 2, 5), (1, 2, 1)]).unwrap();
        let res = run_single(&g, 0, &[&[0, 1]]);
        assert_eq!(res.get(1, 0), Some(INF));
        assert_eq!(res.get(2, 0), Some(5));
    }

    #[test]
    fn rejects_dependent_paths_without_spending_rounds() {
        let g = Graph::from_edges(3, [(0, 1, 1), (1, 2, 1)]).unwrap();
        let mut run = NetworkRun::new(&g, SimConfig::default()).unwrap();
        let paths = vec![PathSpec::from_vertices(&g, 0, &[0, 1, 2]).unwrap(), PathSpec::from_vertices(&g, 0, &[1, 2]).unwrap()];
        let err = exclude_single_source(&mut run, &ExcludeRequest::new(0, paths), ExcludeOptions::default()).unwrap_err();
        assert!(matches!(err, Error::NotIndependent(_)));
        assert_eq!(run.ledger().rounds(), 0);
    }

    /// Random independent paths: single tree edges towards disjoint subtrees,
    /// each extended down the tree by a few hops.
    fn random_paths(g: &Graph, tree: &ShortestPathTree, seed: u64) -> Vec<PathSpec> {
        let mut taken = vec![false; g.n()];
        let mut out = Vec::new();
        let order: Vec<Vertex> = (0..g.n()).map(|i| (i * 7 + seed as usize) % g.n()).collect();
        for v in order {
            let Some(p) = tree.parent[v] else { continue };
            if tree.subtree(v).iter().any(|&w| taken[w]) || (0..g.n()).any(|a| taken[a] && tree.is_ancestor(a, v)) {
                continue;
            }
            let mut verts = vec![p, v];
            let mut cur = v;
            for _ in 0..(seed as usize + v) % 3 {
                match tree.children[cur].first() {
                    Some(&c) => {
                        verts.push(c);
                        cur = c;
                    }
                    None => break,
                }
            }
            for w in tree.subtree(v) {
                taken[w] = true;
            }
            out.push(PathSpec::from_vertices(g, tree.root, &verts).unwrap());
            if out.len() == 3 {
                break;
            }
        }
        out
    }

    #[test]
    fn matches_oracle_on_random_graphs() {
        for seed in 0..12 {
            let g = generate_connected(32, 96, 100, seed).unwrap();
            let x = seed as usize % 32;
            let tree = build_sp_tree(&g, x);
            let paths = random_paths(&g, &tree, seed);
            assert!(is_independent(&g, &tree, &paths).unwrap());
            let mut run = NetworkRun::new(&g, SimConfig::default()).unwrap();
            let res = exclude_single_source(&mut run, &ExcludeRequest::new(x, paths.clone()), ExcludeOptions::default()).unwrap();
            for (i, p) in paths.iter().enumerate() {
                let want = oracle::excluded(&g, x, &p.edges).unwrap();
                let root = p.subtree_root(&g);
                for (y, &d) in want.iter().enumerate() {
                    if tree.is_ancestor(root, y) {
                        assert_eq!(res.get(y, i), Some(d), "seed {seed} y {y}");
                    } else {
                        assert!(res.entry[y].is_none_or(|(j, _)| j != i));
                    }
                }
            }
        }
    }

    #[test]
    fn unweighted_bfs_mode_agrees() {
        for seed in 0..8 {
            let g = generate_connected(30, 80, 1, 100 + seed).unwrap();
            let tree = build_sp_tree(&g, 0);
            let paths = random_paths(&g, &tree, seed);
            let req = ExcludeRequest::new(0, paths);
            let mut run = NetworkRun::new(&g, SimConfig::default()).unwrap();
            let a = exclude_single_source(&mut run, &req, ExcludeOptions::default()).unwrap();
            let b = exclude_single_source(&mut run, &req, ExcludeOptions { unweighted_bfs: true }).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn multi_source_equals_sequential() {
        let g = generate_connected(40, 120, 50, 5).unwrap();
        let reqs: Vec<ExcludeRequest> = (0..16)
            .map(|x| {
                let tree = build_sp_tree(&g, x);
                ExcludeRequest::new(x, random_paths(&g, &tree, x as u64))
            })
            .collect();
        let mut run = NetworkRun::new(&g, SimConfig::default()).unwrap();
        let multi = exclude_multi_source(&mut run, &reqs, ExcludeOptions::default()).unwrap();
        for (req, got) in reqs.iter().zip(&multi) {
            let mut single_run = NetworkRun::new(&g, SimConfig::default()).unwrap();
            assert_eq!(got, &exclude_single_source(&mut single_run, req, ExcludeOptions::default()).unwrap());
        }
        assert!(run.ledger().rounds() > 0);
    }

    #[test]
    fn empty_path_sets_give_apsp() {
        let g = generate_connected(20, 50, 9, 2).unwrap();
        let reqs: Vec<ExcludeRequest> = (0..20).map(|x| ExcludeRequest::new(x, Vec::new())).collect();
        let mut run = NetworkRun::new(&g, SimConfig { cost: CostModel::charged(), ..Default::default() }).unwrap();
        let res = exclude_multi_source(&mut run, &reqs, ExcludeOptions::default()).unwrap();
        let apsp = oracle::apsp(&g);
        for (x, r) in res.iter().enumerate() {
            assert_eq!(r.tree.dist, apsp[x]);
            assert!(r.entries().next().is_none());
        }
    }
}
