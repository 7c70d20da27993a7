//! Basic CONGEST procedures, each executed by the round engine.
//!
//! Every function returns its result together with the [`Trace`] of the
//! execution; callers decide whether to charge it directly or to compose it
//! with other instances first.

use std::collections::{BTreeSet, HashMap};

use super::engine::{Delivery, Outbox, Protocol, RoundCtx, Sim, Trace};
use super::{CostMode, CostModel};
use crate::graph::{key_extend, shortest_keys, Dist, EdgeId, Graph, Key, ShortestPathTree, Vertex, INF, INF_KEY};

// ---------------------------------------------------------------------------
// BFS tree of the communication network

#[derive(Clone, Copy)]
enum FloodMsg {
    Flood,
    Child,
}

struct Flood<'a> {
    sim: Sim<'a>,
    root: Vertex,
    parent: Vec<Option<Vertex>>,
    joined: Vec<bool>,
}

impl Protocol for Flood<'_> {
    type Msg = FloodMsg;

    fn words(&self, _: &FloodMsg) -> usize {
        1
    }

    fn start(&mut self, out: &mut Outbox<FloodMsg>) {
        self.joined[self.root] = true;
        for &v in self.sim.topo.neighbors(self.root) {
            out.send(self.root, v, FloodMsg::Flood);
        }
    }

    fn on_round(&mut self, _: RoundCtx, inbox: Vec<Delivery<FloodMsg>>, out: &mut Outbox<FloodMsg>) {
        // The inbox is sorted by (to, from): the first flood seen by a node
        // comes from its smallest-id neighbour that reached it.
        for d in inbox {
            if matches!(d.msg, FloodMsg::Flood) && !self.joined[d.to] {
                self.joined[d.to] = true;
                self.parent[d.to] = Some(d.from);
                out.send(d.to, d.from, FloodMsg::Child);
                for &w in self.sim.topo.neighbors(d.to) {
                    if w != d.from {
                        out.send(d.to, w, FloodMsg::Flood);
                    }
                }
            }
        }
    }
}

/// BFS tree of the undirected communication network, built by flooding from
/// `root`. Each node learns its parent and children. `dist` holds hop depth.
pub fn bfs_tree(sim: Sim<'_>, root: Vertex) -> (ShortestPathTree, Trace) {
    let n = sim.topo.n();
    let mut p = Flood { sim, root, parent: vec![None; n], joined: vec![false; n] };
    let trace = sim.execute(&mut p);
    let mut tree = ShortestPathTree::from_parents(root, p.parent, vec![INF; n]);
    for v in 0..n {
        if tree.reachable(v) {
            tree.dist[v] = tree.depth[v] as Dist;
        }
    }
    (tree, trace)
}

// ---------------------------------------------------------------------------
// Broadcast

#[derive(Clone, Debug)]
pub struct BroadcastOutcome {
    /// Indices of the items held by each node when the broadcast ends, in
    /// arrival order.
    pub received: Vec<Vec<usize>>,
    /// Nodes the broadcast could not reach.
    pub unreached: Vec<Vertex>,
    pub trace: Trace,
}

impl BroadcastOutcome {
    /// True iff every node outside `unreached` holds all `count` items.
    pub fn complete(&self, count: usize) -> bool {
        self.received.iter().enumerate().all(|(v, r)| r.len() == count || self.unreached.contains(&v))
    }
}

/// Item index (a tag carried inside the first word) and packet size in
/// words.
type Packet = (usize, usize);

/// Floods packets up to the root and back down. Items larger than the link
/// bandwidth travel as several packets so they pipeline hop by hop instead
/// of being stored and forwarded whole.
struct TreeFlood<'a> {
    tree: &'a ShortestPathTree,
    /// Packets waiting at their origin, in order, for the upward leg.
    own: Vec<Vec<Packet>>,
    /// Packets per item.
    packets: Vec<usize>,
    /// Packets of each item seen so far, per node.
    seen: Vec<HashMap<usize, usize>>,
    received: Vec<Vec<usize>>,
}

impl TreeFlood<'_> {
    fn down(&mut self, v: Vertex, packet: Packet, out: &mut Outbox<Packet>) {
        for &c in &self.tree.children[v] {
            out.send(v, c, packet);
        }
        let item = packet.0;
        let count = self.seen[v].entry(item).or_default();
        *count += 1;
        if *count == self.packets[item] {
            self.seen[v].remove(&item);
            self.received[v].push(item);
        }
    }
}

impl Protocol for TreeFlood<'_> {
    type Msg = Packet;

    fn words(&self, msg: &Packet) -> usize {
        msg.1
    }

    fn start(&mut self, out: &mut Outbox<Packet>) {
        for v in 0..self.own.len() {
            for packet in std::mem::take(&mut self.own[v]) {
                match self.tree.parent[v] {
                    Some(p) => out.send(v, p, packet),
                    None => self.down(v, packet, out),
                }
            }
        }
    }

    fn on_round(&mut self, _: RoundCtx, inbox: Vec<Delivery<Packet>>, out: &mut Outbox<Packet>) {
        for d in inbox {
            match self.tree.parent[d.to] {
                Some(p) if p != d.from => out.send(d.to, p, d.msg),
                _ => self.down(d.to, d.msg, out),
            }
        }
    }
}

/// `items[i]` is `(origin, words)`; unreachable origins are skipped.
fn flood_outcome(tree: &ShortestPathTree, sim: Sim<'_>, items: &[(Vertex, usize)]) -> BroadcastOutcome {
    let n = tree.n();
    let size = sim.bandwidth.max(1);
    let mut own = vec![Vec::new(); n];
    let mut packets = Vec::with_capacity(items.len());
    for (i, &(v, words)) in items.iter().enumerate() {
        let words = words.max(1);
        packets.push(words.div_ceil(size));
        if tree.reachable(v) {
            own[v].extend((0..words).step_by(size).map(|at| (i, size.min(words - at))));
        }
    }
    let mut p = TreeFlood { tree, own, packets, seen: vec![HashMap::new(); n], received: vec![Vec::new(); n] };
    let trace = sim.execute(&mut p);
    let unreached = (0..n).filter(|&v| !tree.reachable(v)).collect();
    BroadcastOutcome { received: p.received, unreached, trace }
}

/// Sends `count` one-word items from the root of `tree` to every node of the
/// tree, pipelined down the tree.
pub fn broadcast(sim: Sim<'_>, tree: &ShortestPathTree, count: usize) -> BroadcastOutcome {
    flood_outcome(tree, sim, &vec![(tree.root, 1); count])
}

/// Makes every record known to every node. Record `i` is `(origin, words)`:
/// it starts at `origin`, travels up `tree` to the root and is then
/// pipelined down, costing `words` words per link it crosses. Records held
/// by nodes outside the tree are never delivered.
pub fn broadcast_many(sim: Sim<'_>, tree: &ShortestPathTree, records: &[(Vertex, usize)]) -> BroadcastOutcome {
    flood_outcome(tree, sim, records)
}

// ---------------------------------------------------------------------------
// Downcast / upcast

#[derive(Clone, Debug)]
pub struct DowncastOutcome {
    /// Payloads received by each node, in arrival order.
    pub received: Vec<Vec<u64>>,
    /// Per item: false when its target is not in the tree.
    pub delivered: Vec<bool>,
    pub trace: Trace,
}

struct Downcast<'a> {
    tree: &'a ShortestPathTree,
    items: Vec<(Vertex, u64)>,
    received: Vec<Vec<u64>>,
}

impl Downcast<'_> {
    fn route(&mut self, v: Vertex, item: (Vertex, u64), out: &mut Outbox<(Vertex, u64)>) {
        let (target, payload) = item;
        if self.tree.is_ancestor(target, v) {
            self.received[v].push(payload);
            for &c in &self.tree.children[v] {
                out.send(v, c, item);
            }
        } else if let Some(&c) = self.tree.children[v].iter().find(|&&c| self.tree.is_ancestor(c, target)) {
            out.send(v, c, item);
        }
    }
}

impl Protocol for Downcast<'_> {
    type Msg = (Vertex, u64);

    /// Target id and payload.
    fn words(&self, _: &(Vertex, u64)) -> usize {
        2
    }

    fn start(&mut self, out: &mut Outbox<(Vertex, u64)>) {
        let root = self.tree.root;
        for item in std::mem::take(&mut self.items) {
            self.route(root, item, out);
        }
    }

    fn on_round(&mut self, _: RoundCtx, inbox: Vec<Delivery<(Vertex, u64)>>, out: &mut Outbox<(Vertex, u64)>) {
        for d in inbox {
            self.route(d.to, d.msg, out);
        }
    }
}

/// Sends each `(target, payload)` from the root of `tree` to every node of
/// the subtree rooted at `target`.
pub fn downcast(sim: Sim<'_>, tree: &ShortestPathTree, items: &[(Vertex, u64)]) -> DowncastOutcome {
    let delivered: Vec<bool> = items.iter().map(|&(t, _)| t < tree.n() && tree.reachable(t)).collect();
    let kept = items.iter().zip(&delivered).filter(|(_, &ok)| ok).map(|(&it, _)| it).collect();
    let mut p = Downcast { tree, items: kept, received: vec![Vec::new(); tree.n()] };
    let trace = sim.execute(&mut p);
    DowncastOutcome { received: p.received, delivered, trace }
}

#[derive(Clone, Debug)]
pub struct UpcastOutcome {
    /// Element-wise fold over the whole tree.
    pub root: Vec<u64>,
    /// Element-wise fold over each node's subtree (empty for nodes outside
    /// the tree).
    pub partial: Vec<Vec<u64>>,
    pub trace: Trace,
}

struct Upcast<'a, F> {
    tree: &'a ShortestPathTree,
    combine: F,
    acc: Vec<Vec<u64>>,
    /// Elements received so far from each child, indexed like `children`.
    got: Vec<Vec<usize>>,
    next: Vec<usize>,
    len: usize,
}

impl<F: Fn(u64, u64) -> u64> Upcast<'_, F> {
    fn flush(&mut self, v: Vertex, out: &mut Outbox<u64>) {
        let Some(p) = self.tree.parent[v] else { return };
        while self.next[v] < self.len && self.got[v].iter().all(|&g| g > self.next[v]) {
            out.send(v, p, self.acc[v][self.next[v]]);
            self.next[v] += 1;
        }
    }
}

impl<F: Fn(u64, u64) -> u64> Protocol for Upcast<'_, F> {
    type Msg = u64;

    fn words(&self, _: &u64) -> usize {
        1
    }

    fn start(&mut self, out: &mut Outbox<u64>) {
        for v in 0..self.tree.n() {
            if self.tree.reachable(v) {
                self.flush(v, out);
            }
        }
    }

    fn on_round(&mut self, _: RoundCtx, inbox: Vec<Delivery<u64>>, out: &mut Outbox<u64>) {
        let mut touched = Vec::new();
        for d in inbox {
            let idx = self.tree.children[d.to].iter().position(|&c| c == d.from).expect("upcast message from a child");
            let i = self.got[d.to][idx];
            self.got[d.to][idx] += 1;
            self.acc[d.to][i] = (self.combine)(self.acc[d.to][i], d.msg);
            touched.push(d.to);
        }
        touched.dedup();
        for v in touched {
            self.flush(v, out);
        }
    }
}

/// Folds `values[v]` (all of equal length) element-wise towards the root of
/// `tree` with the associative, commutative `combine`, pipelined.
pub fn upcast<F: Fn(u64, u64) -> u64>(sim: Sim<'_>, tree: &ShortestPathTree, values: &[Vec<u64>], combine: F) -> UpcastOutcome {
    let n = tree.n();
    let len = values.get(tree.root).map_or(0, Vec::len);
    assert!((0..n).filter(|&v| tree.reachable(v)).all(|v| values[v].len() == len), "upcast values must have equal length");
    let mut p = Upcast {
        tree,
        combine,
        acc: values.to_vec(),
        got: (0..n).map(|v| vec![0; tree.children[v].len()]).collect(),
        next: vec![0; n],
        len,
    };
    let trace = sim.execute(&mut p);
    let partial: Vec<Vec<u64>> = (0..n).map(|v| if tree.reachable(v) { p.acc[v].clone() } else { Vec::new() }).collect();
    UpcastOutcome { root: partial[tree.root].clone(), partial, trace }
}

// ---------------------------------------------------------------------------
// Multi-source BFS

#[derive(Clone, Debug)]
pub struct MultiBfs {
    pub sources: Vec<Vertex>,
    /// `dist[i][v]`: hop distance from `sources[i]` to `v` if at most `h`.
    pub dist: Vec<Vec<Option<u32>>>,
    pub trace: Trace,
}

impl MultiBfs {
    /// Hop distance to `v` and the nearest source (smallest id on ties).
    pub fn nearest(&self, v: Vertex) -> Option<(u32, Vertex)> {
        self.sources.iter().zip(&self.dist).filter_map(|(&s, d)| d[v].map(|h| (h, s))).min()
    }
}

struct MultiBfsProto<'a, F> {
    g: &'a Graph,
    allowed: F,
    h: u32,
    step: u64,
    best: Vec<Vec<u32>>,
    sent: Vec<Vec<u32>>,
    /// Per node, `(distance, source index)` entries not yet forwarded.
    pending: Vec<BTreeSet<(u32, usize)>>,
}

impl<F: Fn(EdgeId) -> bool> MultiBfsProto<'_, F> {
    fn send_step(&mut self, out: &mut Outbox<(usize, u32)>) {
        for v in 0..self.g.n() {
            let Some((d, s)) = self.pending[v].pop_first() else { continue };
            self.sent[s][v] = d;
            for &id in self.g.out_edges(v) {
                if (self.allowed)(id) {
                    out.send(v, self.g.edge(id).to, (s, d));
                }
            }
        }
    }
}

impl<F: Fn(EdgeId) -> bool> Protocol for MultiBfsProto<'_, F> {
    /// Source index and hop distance.
    type Msg = (usize, u32);

    fn words(&self, _: &(usize, u32)) -> usize {
        2
    }

    fn start(&mut self, out: &mut Outbox<(usize, u32)>) {
        self.send_step(out);
    }

    fn on_round(&mut self, ctx: RoundCtx, inbox: Vec<Delivery<(usize, u32)>>, out: &mut Outbox<(usize, u32)>) {
        for d in inbox {
            let (s, dist) = d.msg;
            let cand = dist + 1;
            let v = d.to;
            if cand < self.best[s][v] {
                self.pending[v].remove(&(self.best[s][v], s));
                self.best[s][v] = cand;
                if cand < self.h && cand < self.sent[s][v] {
                    self.pending[v].insert((cand, s));
                }
            }
        }
        if ctx.round.is_multiple_of(self.step) {
            self.send_step(out);
        }
    }

    fn active(&self) -> bool {
        self.pending.iter().any(|p| !p.is_empty())
    }
}

/// Hop distances from every source over the directed edges accepted by
/// `allowed`, truncated at `h` hops. Each node forwards one
/// `(source, distance)` pair at a time, smallest distance first.
pub fn bfs_multi(sim: Sim<'_>, g: &Graph, sources: &[Vertex], h: usize, allowed: impl Fn(EdgeId) -> bool) -> MultiBfs {
    let mut srcs = sources.to_vec();
    srcs.sort_unstable();
    srcs.dedup();
    let n = g.n();
    let k = srcs.len();
    let h = h.min(u32::MAX as usize - 1) as u32;
    let mut p = MultiBfsProto {
        g,
        allowed,
        h,
        step: 2usize.div_ceil(sim.bandwidth) as u64,
        best: vec![vec![u32::MAX; n]; k],
        sent: vec![vec![u32::MAX; n]; k],
        pending: vec![BTreeSet::new(); n],
    };
    for (i, &s) in srcs.iter().enumerate() {
        p.best[i][s] = 0;
        if h > 0 {
            p.pending[s].insert((0, i));
        }
    }
    let trace = sim.execute(&mut p);
    let dist = p.best.into_iter().map(|row| row.into_iter().map(|d| (d != u32::MAX).then_some(d)).collect()).collect();
    MultiBfs { sources: srcs, dist, trace }
}

// ---------------------------------------------------------------------------
// Bellman-Ford and SSSP

struct BellmanFord<'a, F> {
    g: &'a Graph,
    allowed: F,
    h: u64,
    key: Vec<Key>,
    improved: Vec<bool>,
}

impl<F: Fn(EdgeId) -> bool> BellmanFord<'_, F> {
    fn announce(&mut self, out: &mut Outbox<Key>) {
        for v in 0..self.g.n() {
            if !std::mem::take(&mut self.improved[v]) {
                continue;
            }
            for &id in self.g.out_edges(v) {
                if (self.allowed)(id) {
                    out.send(v, self.g.edge(id).to, self.key[v]);
                }
            }
        }
    }
}

impl<F: Fn(EdgeId) -> bool> Protocol for BellmanFord<'_, F> {
    type Msg = Key;

    fn words(&self, _: &Key) -> usize {
        1
    }

    fn start(&mut self, out: &mut Outbox<Key>) {
        if self.h > 0 {
            self.announce(out);
        }
    }

    fn on_round(&mut self, ctx: RoundCtx, inbox: Vec<Delivery<Key>>, out: &mut Outbox<Key>) {
        for d in inbox {
            let id = self.g.edge_id(d.from, d.to).expect("message along a graph edge");
            let cand = key_extend(d.msg, self.g.edge(id).weight);
            if cand < self.key[d.to] {
                self.key[d.to] = cand;
                self.improved[d.to] = true;
            }
        }
        if ctx.round < self.h {
            self.announce(out);
        } else {
            self.improved.iter_mut().for_each(|b| *b = false);
        }
    }
}

/// Keys `(distance, hops)` over walks of at most `h` edges accepted by
/// `allowed`, starting from the seeded keys. Nodes send only in rounds in
/// which their tentative key improved.
pub(crate) fn bellman_ford_keys(
    sim: Sim<'_>,
    g: &Graph,
    seeds: &[(Vertex, Key)],
    h: usize,
    allowed: impl Fn(EdgeId) -> bool,
) -> (Vec<Key>, Trace) {
    let n = g.n();
    let mut key = vec![INF_KEY; n];
    let mut improved = vec![false; n];
    for &(v, k) in seeds {
        if k < key[v] {
            key[v] = k;
            improved[v] = true;
        }
    }
    let mut p = BellmanFord { g, allowed, h: h as u64, key, improved };
    let trace = sim.execute(&mut p);
    (p.key, trace)
}

/// `d_h(source, ·)`: minimum weight over paths of at most `h` edges accepted
/// by `allowed`.
pub fn bellman_ford(sim: Sim<'_>, g: &Graph, source: Vertex, h: usize, allowed: impl Fn(EdgeId) -> bool) -> (Vec<Dist>, Trace) {
    let (keys, trace) = bellman_ford_keys(sim, g, &[(source, (0, 0))], h, allowed);
    (keys.into_iter().map(|k| k.0).collect(), trace)
}

/// Exact shortest-path keys from the seeds under the given cost model.
pub fn sssp_keys(sim: Sim<'_>, g: &Graph, seeds: &[(Vertex, Key)], allowed: impl Fn(EdgeId) -> bool, cost: CostModel) -> (Vec<Key>, Trace) {
    match cost.mode {
        CostMode::Faithful => bellman_ford_keys(sim, g, seeds, g.n(), allowed),
        CostMode::Charged => (shortest_keys(g, seeds, allowed), cost.charged_trace(g.n(), sim.bandwidth)),
    }
}

struct Exchange<'a, F> {
    g: &'a Graph,
    allowed: F,
    keys: &'a [Key],
}

impl<F: Fn(EdgeId) -> bool> Protocol for Exchange<'_, F> {
    type Msg = Key;

    fn words(&self, _: &Key) -> usize {
        1
    }

    fn start(&mut self, out: &mut Outbox<Key>) {
        for (id, e) in self.g.edges().iter().enumerate() {
            if self.keys[e.from].0 != INF && (self.allowed)(id) {
                out.send(e.from, e.to, self.keys[e.from]);
            }
        }
    }

    fn on_round(&mut self, _: RoundCtx, _: Vec<Delivery<Key>>, _: &mut Outbox<Key>) {}
}

/// One round in which every reached node tells its out-neighbours its key,
/// so that each node can pick its tree parent.
pub fn predecessor_exchange(sim: Sim<'_>, g: &Graph, keys: &[Key], allowed: impl Fn(EdgeId) -> bool) -> Trace {
    sim.execute(&mut Exchange { g, allowed, keys })
}

/// Shortest-path tree from `source` over the edges accepted by `allowed`:
/// SSSP followed by a predecessor exchange.
pub fn sssp(
    sim: Sim<'_>,
    g: &Graph,
    source: Vertex,
    allowed: impl Fn(EdgeId) -> bool + Copy,
    cost: CostModel,
) -> (ShortestPathTree, Trace) {
    let (keys, mut trace) = sssp_keys(sim, g, &[(source, (0, 0))], allowed, cost);
    trace.then(predecessor_exchange(sim, g, &keys, allowed));
    (ShortestPathTree::from_keys(g, source, &keys, allowed), trace)
}

#[cfg(test)]
mod tests {
    use super::super::Topology;
    use super::*;
    use crate::graph::{build_sp_tree, generate_connected};
    use crate::oracle;

    const C: u64 = 8;

    fn path_graph(n: usize) -> Graph {
        Graph::from_edges(n, (0..n - 1).map(|i| (i, i + 1, 1))).unwrap()
    }

    #[test]
    fn broadcast_on_path() {
        let g = path_graph(10);
        let topo = Topology::new(&g);
        let sim = Sim::new(&topo, 1);
        let (tree, _) = bfs_tree(sim, 0);
        let out = broadcast(sim, &tree, 1);
        assert!(out.received.iter().all(|r| r == &vec![0]));
        assert!(out.unreached.is_empty());
        assert!(out.trace.rounds <= C * 10);
    }

    #[test]
    fn broadcast_on_star() {
        let g = Graph::from_edges(8, (1..8).map(|i| (0, i, 1))).unwrap();
        let topo = Topology::new(&g);
        let sim = Sim::new(&topo, 1);
        let (tree, _) = bfs_tree(sim, 3);
        let out = broadcast(sim, &tree, 20);
        assert!(out.trace.rounds <= C * (20 + 2));
        assert!(out.received.iter().all(|r| r.len() == 20));
    }

    #[test]
    fn broadcast_flags_disconnected() {
        let g = Graph::from_edges(4, [(0, 1, 1), (2, 3, 1)]).unwrap();
        let topo = Topology::new(&g);
        let sim = Sim::new(&topo, 1);
        let (tree, _) = bfs_tree(sim, 0);
        let out = broadcast(sim, &tree, 1);
        assert_eq!(out.unreached, vec![2, 3]);
        assert!(out.received[2].is_empty());
    }

    #[test]
    fn broadcast_many_reaches_everyone() {
        let g = generate_connected(40, 100, 9, 3).unwrap();
        let topo = Topology::new(&g);
        let sim = Sim::new(&topo, 1);
        let (tree, _) = bfs_tree(sim, 0);
        let records: Vec<(Vertex, usize)> = (0..40).map(|v| (v, 2)).collect();
        let out = broadcast_many(sim, &tree, &records);
        assert!(out.complete(40));
        for got in &out.received {
            let mut got = got.clone();
            got.sort();
            assert_eq!(got, (0..40).collect::<Vec<_>>());
        }
        assert!(out.trace.rounds <= C * (80 + topo.diameter() as u64));
    }

    #[test]
    fn upcast_counts_subtrees() {
        let g = generate_connected(30, 70, 5, 8).unwrap();
        let topo = Topology::new(&g);
        let sim = Sim::new(&topo, 1);
        let tree = build_sp_tree(&g, 2);
        let out = upcast(sim, &tree, &vec![vec![1]; 30], |a, b| a + b);
        assert_eq!(out.root, vec![30]);
        for v in 0..30 {
            assert_eq!(out.partial[v], vec![tree.subtree_size[v] as u64]);
        }
    }

    #[test]
    fn downcast_to_deep_leaf() {
        let g = path_graph(12);
        let topo = Topology::new(&g);
        let sim = Sim::new(&topo, 1);
        let tree = build_sp_tree(&g, 0);
        let out = downcast(sim, &tree, &[(11, 5)]);
        assert_eq!(out.received[11], vec![5]);
        assert!(out.received[..11].iter().all(Vec::is_empty));
        assert!(out.trace.rounds <= C * (1 + 11));
        let tree = build_sp_tree(&g, 5);
        let out = downcast(sim, &tree, &[(2, 1), (7, 9)]);
        assert_eq!(out.delivered, vec![false, true]);
        assert_eq!(out.received[11], vec![9]);
    }

    #[test]
    fn bfs_multi_zero_hops() {
        let g = path_graph(5);
        let topo = Topology::new(&g);
        let out = bfs_multi(Sim::new(&topo, 1), &g, &[1, 3], 0, |_| true);
        assert_eq!(out.nearest(1), Some((0, 1)));
        assert_eq!(out.nearest(2), None);
        assert_eq!(out.trace.rounds, 0);
    }

    #[test]
    fn bellman_ford_one_hop() {
        let g = Graph::from_edges(3, [(0, 1, 4), (1, 2, 1), (0, 2, 9)]).unwrap();
        let topo = Topology::new(&g);
        let (d, _) = bellman_ford(Sim::new(&topo, 1), &g, 0, 1, |_| true);
        assert_eq!(d, vec![0, 4, 9]);
        let (d, _) = bellman_ford(Sim::new(&topo, 1), &g, 0, 2, |_| true);
        assert_eq!(d, vec![0, 4, 5]);
    }

    #[test]
    fn sssp_modes_agree() {
        for seed in 0..10 {
            let g = generate_connected(64, 200, 50, seed).unwrap();
            let topo = Topology::new(&g);
            let sim = Sim::new(&topo, 1);
            let (a, ta) = sssp(sim, &g, 0, |_| true, CostModel::faithful());
            let (b, tb) = sssp(sim, &g, 0, |_| true, CostModel::charged());
            assert_eq!(a, b);
            assert_eq!(a.dist, oracle::sp(&g, 0));
            assert_ne!(ta, tb);
        }
    }

    #[test]
    fn sssp_isolated_source() {
        let g = Graph::from_edges(3, [(1, 0, 1), (1, 2, 1)]).unwrap();
        let topo = Topology::new(&g);
        let (t, _) = sssp(Sim::new(&topo, 1), &g, 0, |_| true, CostModel::faithful());
        assert_eq!(t.dist, vec![0, INF, INF]);
    }

    #[test]
    fn bfs_multi_matches_centralized_bfs() {
        for seed in 0..6 {
            let g = generate_connected(64, 192, 1, 40 + seed).unwrap();
            let topo = Topology::new(&g);
            let sources: Vec<Vertex> = (0..8).map(|i| (i * 7 + seed as usize) % 64).collect();
            for h in [3, 64] {
                let out = bfs_multi(Sim::new(&topo, 1), &g, &sources, h, |_| true);
                for (i, &s) in out.sources.iter().enumerate() {
                    let want: Vec<Option<u32>> = oracle::bfs_hops(&g, s, h, &[]).into_iter().map(|d| d.map(|d| d as u32)).collect();
                    assert_eq!(out.dist[i], want, "seed {seed} source {s} h {h}");
                }
                assert!(out.trace.rounds <= C * (8 + h as u64), "rounds {}", out.trace.rounds);
            }
        }
    }

    #[test]
    fn bellman_ford_matches_hop_dp() {
        for seed in 0..10 {
            let g = generate_connected(49, 150, 20, 70 + seed).unwrap();
            let topo = Topology::new(&g);
            let removed = (seed as usize * 13) % g.m();
            let (d, _) = bellman_ford(Sim::new(&topo, 1), &g, 3, 7, |id| id != removed);
            assert_eq!(d, oracle::hop_limited(&g, 3, 7, &[removed]));
        }
    }
}
