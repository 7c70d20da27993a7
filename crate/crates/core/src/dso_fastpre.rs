//! Distance sensitivity oracle with near-linear preprocessing, built on
//! sampled sources and sampled subgraphs.
//!
//! For each level `j` with `2^j ≥ ⌈√n⌉`, every vertex joins `S_j` with
//! probability `min(1, c·ln n / 2^j)`, and `ĥ = ⌈c_g·h·ln n⌉` subgraphs
//! `G_i^j` keep each edge with probability `1 - 1/h` (`h = 2^{j+1}`).
//! Preprocessing computes distances to and from every sampled source in
//! every subgraph. A query `(x, y, e)` combines a `⌈√n⌉`-hop Bellman-Ford in
//! `G - e` with the best `d_i^j(x, s) + d_i^j(s, y)` over subgraphs missing
//! `e`. Answers never undershoot the true distance and are exact w.h.p.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::graph::{sat_add, Dist, EdgeId, Graph, Vertex, INF};
use crate::query::{announce, AnswerCase, BatchAnswers, QueryAnswer, QueryBatch};
use crate::sim::{bellman_ford, broadcast_many, charge_scheduled, splitmix64, sssp_keys, NetworkRun, Trace};
use crate::{ceil_log2, ceil_sqrt, Error, Result};

/// Sampling constants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FastPreParams {
    /// Source sampling constant `c`.
    pub c: f64,
    /// Subgraph count constant `c_g`.
    pub c_g: f64,
    pub seed: u64,
}

impl Default for FastPreParams {
    fn default() -> Self {
        FastPreParams { c: 2.0, c_g: 4.0, seed: 0 }
    }
}

impl FastPreParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite() && self.c_g > 0.0 && self.c_g.is_finite()) {
            return Err(Error::InvalidParameters(format!("sampling constants must be positive, got c={} c_g={}", self.c, self.c_g)));
        }
        Ok(())
    }
}

/// Sampled sources and subgraphs of one level.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledLevel {
    pub j: u32,
    /// Hop bound `2^{j+1}`.
    pub h: u64,
    /// Number of subgraphs `ĥ`.
    pub graphs: usize,
    /// Sampled sources, sorted.
    pub sources: Vec<Vertex>,
    seed: u64,
}

fn natural_log(n: usize) -> f64 {
    (n.max(2) as f64).ln()
}

impl SampledLevel {
    /// Samples `S_j` and fixes the subgraph seeds for `n` vertices.
    pub fn sample(n: usize, j: u32, params: &FastPreParams) -> Self {
        let p = (params.c * natural_log(n) / 2f64.powi(j as i32)).min(1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(params.seed ^ splitmix64(j as u64)));
        let sources = (0..n).filter(|_| rng.gen_bool(p)).collect();
        let h = 1u64 << (j + 1);
        let graphs = (params.c_g * h as f64 * natural_log(n)).ceil() as usize;
        SampledLevel { j, h, graphs, sources, seed: params.seed }
    }

    /// Whether `G_i^j` keeps the edge `(u, v)`: a pure function of the seed,
    /// the level, the subgraph index and the endpoints.
    pub fn keeps(&self, i: usize, u: Vertex, v: Vertex) -> bool {
        let mut x = splitmix64(self.seed ^ splitmix64(self.j as u64));
        for part in [i as u64, u as u64, v as u64] {
            x = splitmix64(x ^ part);
        }
        let unit = (x >> 11) as f64 / (1u64 << 53) as f64;
        unit < 1.0 - 1.0 / self.h as f64
    }

    /// `I_e^j`: indices of the subgraphs missing `e`.
    pub fn missing(&self, g: &Graph, e: EdgeId) -> Vec<usize> {
        let edge = g.edge(e);
        (0..self.graphs).filter(|&i| !self.keeps(i, edge.from, edge.to)).collect()
    }
}

/// Levels `⌈log₂⌈√n⌉⌉ ..= ⌈log₂ n⌉`.
pub fn sample_levels(n: usize, params: &FastPreParams) -> Vec<SampledLevel> {
    let lo = ceil_log2(ceil_sqrt(n).max(1));
    let hi = ceil_log2(n).max(lo);
    (lo..=hi).map(|j| SampledLevel::sample(n, j, params)).collect()
}

/// Distances to and from the sampled sources in every subgraph.
#[derive(Clone, Debug)]
pub struct FastPreState {
    pub n: usize,
    /// Hop bound of the query-time Bellman-Ford, `⌈√n⌉`.
    pub r: usize,
    pub params: FastPreParams,
    pub levels: Vec<SampledLevel>,
    /// `from_source[l][k][i][v] = d_i^j(s, v)` for `s = levels[l].sources[k]`,
    /// held by `v`.
    pub from_source: Vec<Vec<Vec<Vec<Dist>>>>,
    /// `to_source[l][k][i][v] = d_i^j(v, s)`, held by `v`.
    pub to_source: Vec<Vec<Vec<Vec<Dist>>>>,
}

impl FastPreState {
    /// Words stored at any single node (the same at every node).
    pub fn node_words(&self) -> usize {
        self.levels.iter().map(|l| 2 * l.sources.len() * l.graphs).sum()
    }

    /// Best `d_i^j(x, s) + d_i^j(s, y)` over levels, sampled sources and
    /// subgraphs missing `e`.
    pub fn sampled_distance(&self, g: &Graph, x: Vertex, y: Vertex, e: EdgeId) -> Dist {
        let mut best = INF;
        for (l, level) in self.levels.iter().enumerate() {
            for i in level.missing(g, e) {
                for k in 0..level.sources.len() {
                    best = best.min(sat_add(self.to_source[l][k][i][x], self.from_source[l][k][i][y]));
                }
            }
        }
        best
    }

    /// Words `x` broadcasts for a query failing `e`: one `(s, d_i^j(x, s))`
    /// pair per sampled source and subgraph missing `e`.
    fn source_words(&self, g: &Graph, e: EdgeId) -> usize {
        self.levels.iter().map(|l| 2 * l.sources.len() * l.missing(g, e).len()).sum()
    }
}

/// Preprocessing, charged to `sample_sssp`. Sampling is local and free.
pub fn preprocess_fast_pre(run: &mut NetworkRun<'_>, params: FastPreParams) -> Result<FastPreState> {
    params.validate()?;
    let g = run.graph();
    let gr = g.reversed();
    let n = g.n();
    let levels = sample_levels(n, &params);
    let sim = run.sim();
    let cost = run.cost_model();
    let mut traces = Vec::new();
    let mut from_source = Vec::with_capacity(levels.len());
    let mut to_source = Vec::with_capacity(levels.len());
    for level in &levels {
        let mut per_dir: [Vec<Vec<Vec<Dist>>>; 2] = Default::default();
        for (d, graph) in [g, &gr].into_iter().enumerate() {
            let rows: Vec<(Vec<Vec<Dist>>, Vec<Trace>)> = level
                .sources
                .par_iter()
                .map(|&s| {
                    (0..level.graphs)
                        .map(|i| {
                            // Edge ids are shared with the reverse graph, so
                            // membership is tested on the original endpoints.
                            let keep = |id: EdgeId| {
                                let e = g.edge(id);
                                level.keeps(i, e.from, e.to)
                            };
                            let (keys, t) = sssp_keys(sim, graph, &[(s, (0, 0))], keep, cost);
                            (keys.into_iter().map(|k| k.0).collect(), t)
                        })
                        .unzip()
                })
                .collect();
            for (row, ts) in rows {
                per_dir[d].push(row);
                traces.extend(ts);
            }
        }
        let [f, t] = per_dir;
        from_source.push(f);
        to_source.push(t);
    }
    charge_scheduled(run, "sample_sssp", &traces);
    Ok(FastPreState { n, r: ceil_sqrt(n).max(1), params, levels, from_source, to_source })
}

/// Answers a batch; charged to the `query` phase. The Bellman-Fords run one
/// after the other; then three pipelined broadcast waves carry `I_e^j` from
/// the edge, `x`'s distances to the sampled sources in those subgraphs, and
/// the answers from the sinks.
pub fn answer_batch_pre(run: &mut NetworkRun<'_>, state: &FastPreState, batch: &QueryBatch) -> BatchAnswers {
    let g = run.graph();
    let start = run.ledger().rounds();
    let resolved: Vec<_> = batch.queries.iter().map(|q| q.resolve(g)).collect();
    let valid: Vec<bool> = resolved.iter().map(Result::is_ok).collect();
    let mut trace = announce(run, batch, &valid);
    let tree = run.comm_tree(0, "query");
    let sim = run.sim();

    let mut answers = Vec::with_capacity(batch.len());
    let mut waves: [Vec<(Vertex, usize)>; 3] = Default::default();
    for (q, r) in batch.queries.iter().zip(&resolved) {
        let Ok(e) = *r else {
            answers.push(QueryAnswer { query: *q, result: r.map(|_| 0), case: None });
            continue;
        };
        let (short, t) = bellman_ford(sim, g, q.x, state.r, |id| id != e);
        trace.then(t);
        let missing: usize = state.levels.iter().map(|l| l.missing(g, e).len()).sum();
        waves[0].push((q.u, missing));
        waves[1].push((q.x, state.source_words(g, e)));
        waves[2].push((q.y, 1));
        let sampled = state.sampled_distance(g, q.x, q.y, e);
        let (d, case) = if short[q.y] <= sampled { (short[q.y], AnswerCase::ShortHop) } else { (sampled, AnswerCase::Sampled) };
        answers.push(QueryAnswer { query: *q, result: Ok(d), case: Some(case) });
    }
    for records in &waves {
        let records: Vec<_> = records.iter().copied().filter(|&(_, w)| w > 0).collect();
        let out = broadcast_many(sim, &tree, &records);
        debug_assert!(out.complete(records.len()));
        trace.then(out.trace);
    }
    run.charge("query", &trace);
    BatchAnswers { answers, rounds: run.ledger().rounds() - start }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_connected, shortest_keys};
    use crate::oracle;
    use crate::query::Query;
    use crate::{CostModel, SimConfig};

    #[test]
    fn source_sample_sizes_follow_binomial() {
        let (n, j) = (64usize, 4u32);
        let p = 2.0 * (64f64).ln() / 16.0;
        let sizes: Vec<f64> = (0..100u64)
            .map(|seed| SampledLevel::sample(n, j, &FastPreParams { seed, ..Default::default() }).sources.len() as f64)
            .collect();
        let mean = sizes.iter().sum::<f64>() / 100.0;
        let sd_of_mean = (n as f64 * p * (1.0 - p) / 100.0).sqrt();
        assert!((mean - n as f64 * p).abs() <= 3.0 * sd_of_mean, "mean {mean}");
    }

    #[test]
    fn full_probability_keeps_every_vertex() {
        let levels = sample_levels(16, &FastPreParams::default());
        assert_eq!(levels.first().unwrap().j, 2);
        assert_eq!(levels.last().unwrap().j, 4);
        // c·ln 16 / 4 > 1 at the lowest level.
        assert_eq!(levels[0].sources, (0..16).collect::<Vec<_>>());
    }

    #[test]
    fn missing_sets_are_concentrated() {
        let g = generate_connected(64, 256, 5, 1).unwrap();
        let params = FastPreParams::default();
        let cap = 2.0 * params.c_g * (64f64).ln();
        for level in sample_levels(64, &params) {
            for e in 0..g.m() {
                let k = level.missing(&g, e).len();
                assert!(k >= 1 && k as f64 <= cap, "level {} edge {e}: {k}", level.j);
            }
        }
    }

    #[test]
    fn stored_distances_match_filtered_dijkstra() {
        let g = generate_connected(16, 48, 7, 2).unwrap();
        let mut run = NetworkRun::new(&g, SimConfig::default()).unwrap();
        let state = preprocess_fast_pre(&mut run, FastPreParams { seed: 5, ..Default::default() }).unwrap();
        let gr = g.reversed();
        for (l, level) in state.levels.iter().enumerate() {
            for (k, &s) in level.sources.iter().enumerate().take(3) {
                for i in (0..level.graphs).step_by(17) {
                    let keep = |id: EdgeId| level.keeps(i, g.edge(id).from, g.edge(id).to);
                    let fwd: Vec<Dist> = shortest_keys(&g, &[(s, (0, 0))], keep).iter().map(|k| k.0).collect();
                    let rev: Vec<Dist> = shortest_keys(&gr, &[(s, (0, 0))], keep).iter().map(|k| k.0).collect();
                    assert_eq!(state.from_source[l][k][i], fwd);
                    assert_eq!(state.to_source[l][k][i], rev);
                }
            }
        }
        assert!(run.ledger().phase("sample_sssp").unwrap().rounds > 0);
    }

    #[test]
    fn answers_are_one_sided_and_mostly_exact() {
        let mut exact = 0;
        let mut total = 0;
        for seed in 0..2u64 {
            let g = generate_connected(40, 120, 10, seed + 10).unwrap();
            let mut run = NetworkRun::new(&g, SimConfig { cost: CostModel::charged(), ..Default::default() }).unwrap();
            let state = preprocess_fast_pre(&mut run, FastPreParams { seed, ..Default::default() }).unwrap();
            let batch: QueryBatch = (0..100)
                .map(|i| {
                    let e = g.edge((i * 37 + seed as usize) % g.m());
                    Query::new((i * 7) % 40, (i * 11 + 3) % 40, e.from, e.to)
                })
                .collect();
            let out = answer_batch_pre(&mut run, &state, &batch);
            for a in &out.answers {
                let e = g.edge_id(a.query.u, a.query.v).unwrap();
                let truth = oracle::rp(&g, a.query.x, a.query.y, e).unwrap();
                let got = a.result.unwrap();
                assert!(got >= truth);
                if oracle::replacement_hops(&g, a.query.x, a.query.y, e).is_some_and(|h| h <= state.r) {
                    assert_eq!(got, truth);
                }
                exact += usize::from(got == truth);
                total += 1;
            }
            assert!(out.rounds > 0);
        }
        assert!(exact * 100 >= total * 99, "{exact}/{total}");
    }

    #[test]
    fn rejects_unknown_edges() {
        let g = generate_connected(9, 20, 3, 0).unwrap();
        let mut run = NetworkRun::new(&g, SimConfig { cost: CostModel::charged(), ..Default::default() }).unwrap();
        let state = preprocess_fast_pre(&mut run, FastPreParams::default()).unwrap();
        let missing = (0..9).flat_map(|u| (0..9).map(move |v| (u, v))).find(|&(u, v)| u != v && g.edge_id(u, v).is_none()).unwrap();
        let out = answer_batch_pre(&mut run, &state, &QueryBatch::new(vec![Query::new(0, 1, missing.0, missing.1)]));
        assert!(out.answers[0].result.is_err());
        assert!(preprocess_fast_pre(&mut run, FastPreParams { c: 0.0, ..Default::default() }).is_err());
    }
}
