//! Message-level CONGEST simulation.
//!
//! Algorithms are written as [`Protocol`]s and executed by the round engine
//! in [`engine`]. Every execution yields a [`Trace`]; traces are charged to
//! the [`CostLedger`] of a [`NetworkRun`], either directly or after being
//! composed by [`schedule_random_delays`].

mod engine;
mod ledger;
mod primitives;
mod schedule;
mod topology;

use std::collections::HashMap;

pub use engine::{bandwidth_checks, Delivery, Outbox, Protocol, RoundCtx, Sim, Trace};
pub use ledger::{CostLedger, LedgerDelta, PhaseRecord};
pub use primitives::{
    bellman_ford, bfs_multi, bfs_tree, broadcast, broadcast_many, downcast, predecessor_exchange, sssp, sssp_keys, upcast,
    BroadcastOutcome, DowncastOutcome, MultiBfs, UpcastOutcome,
};
pub use schedule::{schedule_random_delays, ScheduleReport};
pub use topology::{LinkId, Topology};

use crate::graph::{Graph, ShortestPathTree, Vertex};
use crate::{ceil_log2, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CostMode {
    /// SSSP runs as Bellman-Ford message passing.
    Faithful,
    /// SSSP distances are computed centrally and the ledger is charged the
    /// black-box costs.
    Charged,
}

/// How SSSP invocations are executed and billed.
#[derive(Clone, Copy, Debug)]
pub struct CostModel {
    pub mode: CostMode,
    pub charged_sssp_rounds: fn(usize) -> u64,
    pub charged_sssp_congestion: fn(usize) -> u64,
}

fn default_sssp_rounds(n: usize) -> u64 {
    n as u64 * ceil_log2(n).max(1) as u64
}

fn default_sssp_congestion(n: usize) -> u64 {
    let l = ceil_log2(n).max(1) as u64;
    l * l
}

impl CostModel {
    pub fn faithful() -> Self {
        CostModel { mode: CostMode::Faithful, charged_sssp_rounds: default_sssp_rounds, charged_sssp_congestion: default_sssp_congestion }
    }

    pub fn charged() -> Self {
        CostModel { mode: CostMode::Charged, ..Self::faithful() }
    }

    /// Trace of one charged SSSP: `R(n)` rounds and `C(n)` words on every
    /// link direction, at most `bandwidth` per round.
    pub fn charged_trace(&self, n: usize, bandwidth: usize) -> Trace {
        let words = (self.charged_sssp_congestion)(n);
        let b = bandwidth as u64;
        let len = words.div_ceil(b);
        let rounds = (self.charged_sssp_rounds)(n).max(len);
        let mut uniform = Vec::new();
        let full = words / b;
        if full > 0 {
            uniform.push((0, full, bandwidth as u32));
        }
        if !words.is_multiple_of(b) {
            uniform.push((full, 1, (words % b) as u32));
        }
        Trace { rounds, events: Vec::new(), uniform }
    }
}

impl Default for CostModel {
    fn default() -> Self {
        Self::faithful()
    }
}

/// Run-wide settings.
#[derive(Clone, Copy, Debug)]
pub struct SimConfig {
    /// Words per link direction per round.
    pub bandwidth: usize,
    /// Constant of the primitive cost envelopes (`rounds ≤ c·(items + depth)`).
    pub engine_c: u64,
    pub seed: u64,
    pub cost: CostModel,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig { bandwidth: 1, engine_c: 16, seed: 0, cost: CostModel::faithful() }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.bandwidth == 0 {
            return Err(Error::InvalidParameters("bandwidth must be at least 1".into()));
        }
        if self.engine_c == 0 {
            return Err(Error::InvalidParameters("engine constant must be positive".into()));
        }
        Ok(())
    }
}

/// A simulated network executing algorithms on one graph, with its ledger.
pub struct NetworkRun<'g> {
    graph: &'g Graph,
    topo: Topology,
    config: SimConfig,
    ledger: CostLedger,
    seed_counter: u64,
    bfs_trees: HashMap<Vertex, ShortestPathTree>,
}

impl<'g> NetworkRun<'g> {
    pub fn new(graph: &'g Graph, config: SimConfig) -> Result<Self> {
        config.validate()?;
        let topo = Topology::new(graph);
        let ledger = CostLedger::new(topo.num_links());
        Ok(NetworkRun { graph, topo, config, ledger, seed_counter: 0, bfs_trees: HashMap::new() })
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn topology(&self) -> &Topology {
        &self.topo
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn cost_model(&self) -> CostModel {
        self.config.cost
    }

    pub fn set_cost_model(&mut self, cost: CostModel) {
        self.config.cost = cost;
    }

    pub fn ledger(&self) -> &CostLedger {
        &self.ledger
    }

    pub fn ledger_mut(&mut self) -> &mut CostLedger {
        &mut self.ledger
    }

    pub fn sim(&self) -> Sim<'_> {
        Sim::new(&self.topo, self.config.bandwidth)
    }

    pub fn charge(&mut self, phase: &str, trace: &Trace) -> LedgerDelta {
        self.ledger.charge_trace(phase, trace)
    }

    /// A fresh seed derived from the run seed; the sequence is fixed per run.
    pub fn next_seed(&mut self) -> u64 {
        self.seed_counter += 1;
        splitmix64(self.config.seed ^ splitmix64(self.seed_counter))
    }

    /// BFS tree of the communication network rooted at `root`. The first
    /// request per root runs the flooding protocol and charges it to
    /// `phase`; later requests reuse the tree.
    pub fn comm_tree(&mut self, root: Vertex, phase: &str) -> ShortestPathTree {
        if let Some(t) = self.bfs_trees.get(&root) {
            return t.clone();
        }
        let (tree, trace) = bfs_tree(self.sim(), root);
        self.charge(phase, &trace);
        self.bfs_trees.insert(root, tree.clone());
        tree
    }
}

/// Shortest-path trees from every vertex of `g` (which must share the
/// run's topology, e.g. the run graph or its reverse), one SSSP instance per
/// source combined by random-delay scheduling and charged to `phase`.
pub fn apsp(run: &mut NetworkRun<'_>, g: &Graph, phase: &str) -> Vec<ShortestPathTree> {
    use rayon::prelude::*;
    let sim = run.sim();
    let cost = run.cost_model();
    let (trees, traces): (Vec<ShortestPathTree>, Vec<Trace>) = (0..g.n()).into_par_iter().map(|x| sssp(sim, g, x, |_| true, cost)).unzip();
    charge_scheduled(run, phase, &traces);
    trees
}

/// Schedules standalone instance traces with random delays and charges the
/// result to `phase`. The declared per-instance bounds are the largest
/// congestion and round count among the instances.
pub fn charge_scheduled(run: &mut NetworkRun<'_>, phase: &str, traces: &[Trace]) -> ScheduleReport {
    let links = run.topology().num_links();
    let c = traces.iter().map(|t| t.congestion(links)).max().unwrap_or(0);
    let r = traces.iter().map(|t| t.rounds).max().unwrap_or(0);
    let seed = run.next_seed();
    schedule_random_delays(run, phase, traces, c, r, seed)
}

pub(crate) fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn charged_trace_respects_bandwidth() {
        let m = CostModel::charged();
        let t = m.charged_trace(64, 1);
        assert_eq!(t.rounds, 64 * 6);
        assert_eq!(t.congestion(10), 36);
        assert_eq!(t.max_words_per_round(), 1);
        let t = m.charged_trace(64, 5);
        assert_eq!(t.congestion(3), 36);
        assert!(t.max_words_per_round() <= 5);
    }

    #[test]
    fn seeds_replay() {
        let g = Graph::from_edges(2, [(0, 1, 1)]).unwrap();
        let cfg = SimConfig { seed: 9, ..Default::default() };
        let mut a = NetworkRun::new(&g, cfg).unwrap();
        let mut b = NetworkRun::new(&g, cfg).unwrap();
        let sa: Vec<u64> = (0..4).map(|_| a.next_seed()).collect();
        let sb: Vec<u64> = (0..4).map(|_| b.next_seed()).collect();
        assert_eq!(sa, sb);
        assert_ne!(sa[0], sa[1]);
        assert!(NetworkRun::new(&g, SimConfig { bandwidth: 0, ..cfg }).is_err());
    }
}
