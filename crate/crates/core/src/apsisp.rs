//! All-pairs second simple shortest paths.
//!
//! With `(x, a)` the first edge of the `x`-`y` shortest path,
//! `d₂(x, y) = min(d(x, y, (x, a)), w(x, a) + d₂(a, y))`. One exclude per
//! source delivers `d(x, y, (x, a))` to `y`; a downcast on `T_x` tells `y` the
//! edge `(x, a)` and its weight. Each `y` then evaluates the recurrence
//! locally, in order of increasing hop length of the `z`-`y` shortest path.

use crate::exclude::{run_instances, ExcludeOptions, ExcludeRequest};
use crate::graph::{sat_add, Dist, Graph, PathSpec, Vertex, INF};
use crate::sim::{apsp, charge_scheduled, downcast, NetworkRun, Trace};

/// `d₂` for every ordered pair, as known at the sinks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SispTable {
    /// `d2[x][y]`.
    pub d2: Vec<Vec<Dist>>,
    /// Iteration of the local recurrence at `y` in which `d₂(x, y)` was fixed
    /// (`None` for `x = y` and for unreachable pairs).
    pub finalized_at: Vec<Vec<Option<usize>>>,
}

impl SispTable {
    pub fn get(&self, x: Vertex, y: Vertex) -> Dist {
        self.d2[x][y]
    }
}

/// What `y` knows about source `z` after the message phases.
#[derive(Clone, Copy)]
struct SinkView {
    /// Second vertex `a` of the `z`-`y` shortest path and `w(z, a)`.
    first: Option<(Vertex, Dist)>,
    /// `d(z, y, (z, a))`.
    excluded: Dist,
}

/// Runs the message phases (`apsp`, `first_edge`, `exclude`) on the run and
/// then the local recurrence at every sink.
pub fn compute_2apsisp(run: &mut NetworkRun<'_>) -> SispTable {
    let g = run.graph();
    let n = g.n();
    let trees = apsp(run, g, "apsp");

    // Line 2: below each child `a` of `x`, announce `a` and `w(x, a)`.
    let sim = run.sim();
    let mut first = vec![vec![None; n]; n];
    let mut traces = Vec::with_capacity(n);
    for (x, t) in trees.iter().enumerate() {
        let items: Vec<(Vertex, u64)> = t.children[x].iter().map(|&a| (a, g.edge(g.edge_id(x, a).unwrap()).weight)).collect();
        let out = downcast(sim, t, &items);
        for (y, got) in out.received.iter().enumerate() {
            if let Some(&w) = got.first() {
                let a = t.ancestor_at_depth(y, 1).expect("receiver lies below a child of the root");
                first[x][y] = Some((a, w));
            }
        }
        traces.push(out.trace);
    }
    charge_scheduled(run, "first_edge", &traces);

    // Line 3: exclude every first edge of every tree.
    let reqs: Vec<ExcludeRequest> = (0..n)
        .map(|x| {
            let paths = trees[x].children[x].iter().map(|&a| PathSpec::single_edge(g, x, g.edge_id(x, a).unwrap())).collect();
            ExcludeRequest::new(x, paths)
        })
        .collect();
    let tree_refs: Vec<_> = trees.iter().collect();
    let (results, traces) = run_instances(run, g, &reqs, Some(&tree_refs), ExcludeOptions::default());
    charge_scheduled(run, "exclude", &traces);

    // Lines 4-9: local computation, no rounds.
    run.charge("local_dp", &Trace::idle(0));
    let mut d2 = vec![vec![INF; n]; n];
    let mut finalized_at = vec![vec![None; n]; n];
    for y in 0..n {
        let view: Vec<SinkView> =
            (0..n).map(|z| SinkView { first: first[z][y], excluded: results[z].entry[y].map_or(INF, |(_, d)| d) }).collect();
        let (col, iters) = local_recurrence(y, &view);
        for z in 0..n {
            d2[z][y] = col[z];
            finalized_at[z][y] = iters[z];
        }
    }
    SispTable { d2, finalized_at }
}

/// Evaluates the recurrence at sink `y` in rounds: round 1 handles sources
/// whose shortest path to `y` is the edge `(z, y)`, round `t` those whose
/// next vertex was fixed in round `t - 1`.
fn local_recurrence(y: Vertex, view: &[SinkView]) -> (Vec<Dist>, Vec<Option<usize>>) {
    let n = view.len();
    let mut d2 = vec![INF; n];
    let mut done: Vec<Option<usize>> = vec![None; n];
    for iter in 1..=n {
        let mut progressed = false;
        for z in 0..n {
            if done[z].is_some() || z == y {
                continue;
            }
            let Some((a, w)) = view[z].first else { continue };
            let value = if a == y {
                view[z].excluded
            } else if let Some(t) = done[a] {
                if t >= iter {
                    continue;
                }
                view[z].excluded.min(sat_add(w, d2[a]))
            } else {
                continue;
            };
            d2[z] = value;
            done[z] = Some(iter);
            progressed = true;
        }
        if !progressed {
            break;
        }
    }
    (d2, done)
}

/// Convenience wrapper for callers without a run of their own.
pub fn compute_2apsisp_on(g: &Graph, config: crate::SimConfig) -> crate::Result<(SispTable, crate::CostLedger)> {
    let mut run = NetworkRun::new(g, config)?;
    let table = compute_2apsisp(&mut run);
    Ok((table, run.ledger().clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_sp_tree, generate_random};
    use crate::oracle::{self, TieBreak};
    use crate::{CostModel, SimConfig};

    #[test]
    fn disjoint_equal_paths() {
        let g = Graph::from_edges(4, [(0, 1, 2), (1, 3, 2), (0, 2, 1), (2, 3, 3)]).unwrap();
        let (t, _) = compute_2apsisp_on(&g, SimConfig::default()).unwrap();
        assert_eq!(t.get(0, 3), 4);
        assert_eq!(t.get(0, 1), INF);
        assert_eq!(t.get(3, 3), INF);
    }

    #[test]
    fn matches_oracle_and_hop_order() {
        for seed in 0..8 {
            let n = 12 + seed as usize;
            let g = generate_random(n, 3 * n, 6, seed).unwrap();
            let cfg = SimConfig { cost: CostModel::charged(), ..Default::default() };
            let (t, ledger) = compute_2apsisp_on(&g, cfg).unwrap();
            assert_eq!(t.d2, oracle::sisp2_table(&g, TieBreak::SmallestId), "seed {seed}");
            assert_eq!(t.d2, oracle::sisp2_table(&g, TieBreak::LargestId), "seed {seed}");
            for x in 0..n {
                let tree = build_sp_tree(&g, x);
                for y in 0..n {
                    if x != y && tree.reachable(y) {
                        assert_eq!(t.finalized_at[x][y], Some(tree.depth[y]));
                    }
                }
            }
            assert_eq!(ledger.phase("local_dp").unwrap().rounds, 0);
        }
    }
}
