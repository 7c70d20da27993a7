//! Centralized ground truth.
//!
//! Nothing here calls into the simulator or into the shortest-path helpers of
//! [`crate::graph`]; the searches are written out again so the tests compare
//! two independent implementations.

use std::collections::{BTreeSet, VecDeque};

use crate::graph::{Dist, EdgeId, Graph, Vertex, INF};
use crate::{Error, Result};

/// Which predecessor to keep when several give the same (weight, hops).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TieBreak {
    SmallestId,
    LargestId,
}

struct Search {
    dist: Vec<Dist>,
    hops: Vec<u64>,
}

/// Ordered-set Dijkstra on (weight, hops) over the edges not in `removed`.
fn search(g: &Graph, s: Vertex, removed: &dyn Fn(EdgeId) -> bool) -> Search {
    let n = g.n();
    let mut dist = vec![INF; n];
    let mut hops = vec![u64::MAX; n];
    let mut frontier = BTreeSet::new();
    dist[s] = 0;
    hops[s] = 0;
    frontier.insert((0u64, 0u64, s));
    while let Some((d, h, u)) = frontier.pop_first() {
        for &id in g.out_edges(u) {
            if removed(id) {
                continue;
            }
            let e = g.edge(id);
            let cand = (d + e.weight, h + 1);
            if cand < (dist[e.to], hops[e.to]) {
                frontier.remove(&(dist[e.to], hops[e.to], e.to));
                dist[e.to] = cand.0;
                hops[e.to] = cand.1;
                frontier.insert((cand.0, cand.1, e.to));
            }
        }
    }
    Search { dist, hops }
}

/// `d(s, ·)` in `G`.
pub fn sp(g: &Graph, s: Vertex) -> Vec<Dist> {
    search(g, s, &|_| false).dist
}

/// `d(s, ·)` in `G` minus the given edges.
pub fn sp_avoiding(g: &Graph, s: Vertex, removed: &[EdgeId]) -> Vec<Dist> {
    search(g, s, &|id| removed.contains(&id)).dist
}

fn check_edge(g: &Graph, e: EdgeId) -> Result<()> {
    if e < g.m() {
        Ok(())
    } else {
        Err(Error::InvalidParameters(format!("edge id {e} out of range")))
    }
}

/// Replacement distance `d(s, t, e)`.
pub fn rp(g: &Graph, s: Vertex, t: Vertex, e: EdgeId) -> Result<Dist> {
    g.check_vertex(s)?;
    g.check_vertex(t)?;
    check_edge(g, e)?;
    Ok(sp_avoiding(g, s, &[e])[t])
}

/// `d(s, ·, P)`: distances with every edge of the path removed.
pub fn excluded(g: &Graph, s: Vertex, path_edges: &[EdgeId]) -> Result<Vec<Dist>> {
    g.check_vertex(s)?;
    for &e in path_edges {
        check_edge(g, e)?;
    }
    Ok(sp_avoiding(g, s, path_edges))
}

/// Edges of the `s`-`t` shortest path chosen by `rule`, or `None` if `t` is
/// unreachable.
pub fn shortest_path_edges(g: &Graph, s: Vertex, t: Vertex, rule: TieBreak) -> Option<Vec<EdgeId>> {
    let sr = search(g, s, &|_| false);
    if sr.dist[t] == INF {
        return None;
    }
    let mut out = Vec::new();
    let mut cur = t;
    while cur != s {
        let preds = g.in_edges(cur).iter().copied().filter(|&id| {
            let e = g.edge(id);
            sr.dist[e.from] != INF && sr.dist[e.from] + e.weight == sr.dist[cur] && sr.hops[e.from] + 1 == sr.hops[cur]
        });
        let pick = match rule {
            TieBreak::SmallestId => preds.min_by_key(|&id| g.edge(id).from),
            TieBreak::LargestId => preds.max_by_key(|&id| g.edge(id).from),
        }
        .expect("reachable vertex has a predecessor");
        out.push(pick);
        cur = g.edge(pick).from;
    }
    out.reverse();
    Some(out)
}

/// Second simple shortest path distance: the minimum over the edges of the
/// chosen shortest `s`-`t` path of the replacement distance. `∞` when
/// `s = t`, when `t` is unreachable, or when no alternative exists.
pub fn sisp2_with(g: &Graph, s: Vertex, t: Vertex, rule: TieBreak) -> Result<Dist> {
    g.check_vertex(s)?;
    g.check_vertex(t)?;
    if s == t {
        return Ok(INF);
    }
    let Some(path) = shortest_path_edges(g, s, t, rule) else {
        return Ok(INF);
    };
    Ok(path.iter().map(|&e| sp_avoiding(g, s, &[e])[t]).min().unwrap_or(INF))
}

pub fn sisp2(g: &Graph, s: Vertex, t: Vertex) -> Result<Dist> {
    sisp2_with(g, s, t, TieBreak::SmallestId)
}

/// Second implementation of `sisp2`: minimum replacement distance over every
/// edge lying on any shortest `s`-`t` path.
pub fn sisp2_all_shortest_edges(g: &Graph, s: Vertex, t: Vertex) -> Result<Dist> {
    g.check_vertex(s)?;
    g.check_vertex(t)?;
    if s == t {
        return Ok(INF);
    }
    let from_s = sp(g, s);
    if from_s[t] == INF {
        return Ok(INF);
    }
    let to_t = sp(&g.reversed(), t);
    let mut best = INF;
    for (id, e) in g.edges().iter().enumerate() {
        if from_s[e.from] != INF && to_t[e.to] != INF && from_s[e.from] + e.weight + to_t[e.to] == from_s[t] {
            best = best.min(sp_avoiding(g, s, &[id])[t]);
        }
    }
    Ok(best)
}

/// Full `d₂` matrix, `table[x][y]`.
pub fn sisp2_table(g: &Graph, rule: TieBreak) -> Vec<Vec<Dist>> {
    (0..g.n()).map(|x| (0..g.n()).map(|y| sisp2_with(g, x, y, rule).expect("valid vertices")).collect()).collect()
}

/// Distances from every source in `sources`, `table[i][v] = d(sources[i], v)`.
pub fn ksssp(g: &Graph, sources: &[Vertex]) -> Result<Vec<Vec<Dist>>> {
    sources.iter().map(|&s| g.check_vertex(s).map(|_| sp(g, s))).collect()
}

pub fn apsp(g: &Graph) -> Vec<Vec<Dist>> {
    (0..g.n()).map(|s| sp(g, s)).collect()
}

/// `d_h(s, ·)`: minimum weight over paths of at most `h` edges avoiding
/// `removed`, by the layered dynamic program.
pub fn hop_limited(g: &Graph, s: Vertex, h: usize, removed: &[EdgeId]) -> Vec<Dist> {
    let mut cur = vec![INF; g.n()];
    cur[s] = 0;
    for _ in 0..h {
        let mut next = cur.clone();
        for (id, e) in g.edges().iter().enumerate() {
            if removed.contains(&id) || cur[e.from] == INF {
                continue;
            }
            next[e.to] = next[e.to].min(cur[e.from] + e.weight);
        }
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

/// Minimum hop count of a shortest `s`-`t` path in `G - e` (the replacement
/// path's hop length), or `None` if no replacement path exists.
pub fn replacement_hops(g: &Graph, s: Vertex, t: Vertex, e: EdgeId) -> Option<usize> {
    let sr = search(g, s, &|id| id == e);
    (sr.dist[t] != INF).then(|| sr.hops[t] as usize)
}

/// Unweighted directed BFS truncated at `h` hops; `None` beyond `h` or unreachable.
pub fn bfs_hops(g: &Graph, s: Vertex, h: usize, removed: &[EdgeId]) -> Vec<Option<usize>> {
    let mut out = vec![None; g.n()];
    out[s] = Some(0);
    let mut queue = VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        let du = out[u].unwrap();
        if du == h {
            continue;
        }
        for &id in g.out_edges(u) {
            let v = g.edge(id).to;
            if !removed.contains(&id) && out[v].is_none() {
                out[v] = Some(du + 1);
                queue.push_back(v);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate_random;

    #[test]
    fn rp_off_path_edge_is_plain_distance() {
        let g = Graph::from_edges(4, [(0, 1, 1), (1, 2, 1), (2, 3, 5), (0, 3, 10)]).unwrap();
        let e = g.edge_id(2, 3).unwrap();
        assert_eq!(rp(&g, 0, 2, e).unwrap(), sp(&g, 0)[2]);
        assert!(rp(&g, 0, 2, 99).is_err());
    }

    #[test]
    fn sisp2_single_path_is_infinite() {
        let g = Graph::from_edges(3, [(0, 1, 1), (1, 2, 1)]).unwrap();
        assert_eq!(sisp2(&g, 0, 2).unwrap(), INF);
        assert_eq!(sisp2(&g, 0, 0).unwrap(), INF);
    }

    #[test]
    fn sisp2_equal_paths() {
        let g = Graph::from_edges(4, [(0, 1, 1), (1, 3, 1), (0, 2, 1), (2, 3, 1)]).unwrap();
        assert_eq!(sisp2(&g, 0, 3).unwrap(), 2);
    }

    #[test]
    fn tie_break_rules_agree() {
        for seed in 0..1000u64 {
            let n = 6 + (seed % 5) as usize;
            let g = generate_random(n, 2 * n, 3, seed).unwrap();
            let (s, t) = ((seed as usize) % n, (seed as usize / 7) % n);
            let a = sisp2_with(&g, s, t, TieBreak::SmallestId).unwrap();
            let b = sisp2_with(&g, s, t, TieBreak::LargestId).unwrap();
            assert_eq!(a, b, "seed {seed}");
            if seed % 10 == 0 {
                assert_eq!(a, sisp2_all_shortest_edges(&g, s, t).unwrap(), "seed {seed}");
            }
        }
    }

    #[test]
    fn hop_limited_levels() {
        let g = Graph::from_edges(3, [(0, 1, 1), (1, 2, 1), (0, 2, 5)]).unwrap();
        assert_eq!(hop_limited(&g, 0, 1, &[]), vec![0, 1, 5]);
        assert_eq!(hop_limited(&g, 0, 2, &[]), vec![0, 1, 2]);
        assert_eq!(bfs_hops(&g, 0, 0, &[]), vec![Some(0), None, None]);
        assert_eq!(replacement_hops(&g, 0, 2, g.edge_id(1, 2).unwrap()), Some(1));
    }
}
