//! Random workloads: independent path sets and query batches.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::build_sp_tree;
use crate::{Graph, PathSpec, Query, QueryBatch, ShortestPathTree, Vertex};

/// Random independent downward paths on `tree`: each picks a subtree root
/// `w` unrelated to the previous picks and runs from `w`'s parent down to a
/// random descendant of `w`.
pub fn random_independent_paths(g: &Graph, tree: &ShortestPathTree, rng: &mut impl Rng, max_paths: usize) -> Vec<PathSpec> {
    let mut candidates: Vec<Vertex> = (0..g.n()).filter(|&v| tree.reachable(v) && tree.parent[v].is_some()).collect();
    candidates.shuffle(rng);
    let mut roots: Vec<Vertex> = Vec::new();
    let mut paths = Vec::new();
    for w in candidates {
        if paths.len() == max_paths {
            break;
        }
        if roots.iter().any(|&r| tree.is_ancestor(r, w) || tree.is_ancestor(w, r)) {
            continue;
        }
        roots.push(w);
        let below = tree.subtree(w);
        let end = below[rng.gen_range(0..below.len())];
        let mut vs = tree.path_to(end).expect("reachable");
        let start = tree.depth[w] - 1;
        vs.drain(..start);
        paths.push(PathSpec::from_vertices(g, tree.root, &vs).expect("tree edges"));
    }
    paths
}

/// Queries mixing failures on the tie-broken `x`-`y` shortest path with
/// failures of arbitrary edges.
pub fn random_queries(g: &Graph, rng: &mut impl Rng, k: usize) -> QueryBatch {
    let n = g.n();
    let mut trees: Vec<Option<ShortestPathTree>> = vec![None; n];
    (0..k)
        .map(|_| {
            let x = rng.gen_range(0..n);
            let y = rng.gen_range(0..n);
            let tree = trees[x].get_or_insert_with(|| build_sp_tree(g, x));
            match tree.path_to(y) {
                Some(p) if p.len() > 1 && rng.gen_bool(0.6) => {
                    let j = rng.gen_range(0..p.len() - 1);
                    Query::new(x, y, p[j], p[j + 1])
                }
                _ => {
                    let e = g.edge(rng.gen_range(0..g.m()));
                    Query::new(x, y, e.from, e.to)
                }
            }
        })
        .collect()
}
