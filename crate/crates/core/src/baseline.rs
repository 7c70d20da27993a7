//! Answering queries without preprocessing.
//!
//! The general baseline runs one shortest-path computation in `G - e_i` per
//! query, one after the other. When every query of the batch fails the same
//! edge, one multi-source computation in `G - e` from the distinct sources
//! answers all of them.

use crate::query::{announce, AnswerCase, BatchAnswers, QueryAnswer, QueryBatch};
use crate::sim::{bfs_multi, charge_scheduled, sssp_keys, NetworkRun, Trace};
use crate::{Dist, Error, Result, Vertex, INF};

/// One SSSP in `G - e_i` from `x_i` per valid query, sequentially; charged to
/// the `query` phase.
pub fn answer_general_no_pre(run: &mut NetworkRun<'_>, batch: &QueryBatch) -> BatchAnswers {
    let g = run.graph();
    let start = run.ledger().rounds();
    let resolved: Vec<_> = batch.queries.iter().map(|q| q.resolve(g)).collect();
    let valid: Vec<bool> = resolved.iter().map(Result::is_ok).collect();
    let mut trace = announce(run, batch, &valid);
    let sim = run.sim();
    let cost = run.cost_model();
    let mut answers = Vec::with_capacity(batch.len());
    for (q, r) in batch.queries.iter().zip(resolved) {
        let result = r.map(|e| {
            let (keys, t) = sssp_keys(sim, g, &[(q.x, (0, 0))], |id| id != e, cost);
            trace.then(t);
            keys[q.y].0
        });
        answers.push(QueryAnswer { query: *q, result, case: Some(AnswerCase::Direct) });
    }
    run.charge("query", &trace);
    BatchAnswers { answers, rounds: run.ledger().rounds() - start }
}

/// Multi-source computation in `G - e` for a batch sharing the failed edge
/// `e`; charged to the `query` phase. A single distinct source needs one
/// SSSP; unit-weight graphs use multi-source BFS; otherwise one SSSP per
/// distinct source, combined by random-delay scheduling.
pub fn answer_seb_no_pre(run: &mut NetworkRun<'_>, batch: &QueryBatch) -> Result<BatchAnswers> {
    let g = run.graph();
    let Some((u, v)) = batch.common_edge() else {
        return if batch.is_empty() { Ok(BatchAnswers { answers: Vec::new(), rounds: 0 }) } else { Err(Error::MixedBatch) };
    };
    let start = run.ledger().rounds();
    let resolved: Vec<_> = batch.queries.iter().map(|q| q.resolve(g)).collect();
    let Some(e) = g.edge_id(u, v) else {
        let answers =
            batch.queries.iter().zip(resolved).map(|(q, r)| QueryAnswer { query: *q, result: r.map(|_| INF), case: None }).collect();
        return Ok(BatchAnswers { answers, rounds: 0 });
    };
    let valid: Vec<bool> = resolved.iter().map(Result::is_ok).collect();
    let trace = announce(run, batch, &valid);
    run.charge("query", &trace);

    let mut sources: Vec<Vertex> = batch.queries.iter().zip(&valid).filter(|(_, &ok)| ok).map(|(q, _)| q.x).collect();
    sources.sort_unstable();
    sources.dedup();
    let sim = run.sim();
    let cost = run.cost_model();
    // dist[i][y] for sources[i].
    let dist: Vec<Vec<Dist>> = if sources.is_empty() {
        Vec::new()
    } else if sources.len() == 1 {
        let (keys, t) = sssp_keys(sim, g, &[(sources[0], (0, 0))], |id| id != e, cost);
        run.charge("query", &t);
        vec![keys.into_iter().map(|k| k.0).collect()]
    } else if g.is_unit_weight() {
        let out = bfs_multi(sim, g, &sources, g.n(), |id| id != e);
        run.charge("query", &out.trace);
        out.dist.into_iter().map(|row| row.into_iter().map(|d| d.map_or(INF, Dist::from)).collect()).collect()
    } else {
        let (rows, traces): (Vec<Vec<Dist>>, Vec<Trace>) = sources
            .iter()
            .map(|&s| {
                let (keys, t) = sssp_keys(sim, g, &[(s, (0, 0))], |id| id != e, cost);
                (keys.into_iter().map(|k| k.0).collect(), t)
            })
            .unzip();
        charge_scheduled(run, "query", &traces);
        rows
    };
    let answers = batch
        .queries
        .iter()
        .zip(resolved)
        .map(|(q, r)| {
            let result = r.map(|_| dist[sources.binary_search(&q.x).expect("source was collected")][q.y]);
            QueryAnswer { query: *q, result, case: Some(AnswerCase::Direct) }
        })
        .collect();
    Ok(BatchAnswers { answers, rounds: run.ledger().rounds() - start })
}
