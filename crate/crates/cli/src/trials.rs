//! One randomized trial: build a workload, run an algorithm, compare every
//! answer with the centralized oracle and read the cost ledger.

use congest_dso::apsisp::compute_2apsisp;
use congest_dso::baseline::{answer_general_no_pre, answer_seb_no_pre};
use congest_dso::dso_fastpre::{answer_batch_pre, preprocess_fast_pre, FastPreParams};
use congest_dso::dso_fastquery::{answer_batch_fast, preprocess_fast_query};
use congest_dso::exclude::{exclude_multi_source, ExcludeOptions, ExcludeRequest};
use congest_dso::graph::{build_sp_tree, generate_connected};
use congest_dso::oracle::{self, TieBreak};
use congest_dso::workload::{random_independent_paths, random_queries};
use congest_dso::{BatchAnswers, Dist, Graph, NetworkRun, Query, QueryBatch, SimConfig, Weight};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Algo, CliError};

#[derive(Clone, Copy, Debug)]
pub struct Setup {
    pub n: usize,
    pub m: usize,
    pub max_weight: Weight,
    pub sim: SimConfig,
    pub params: FastPreParams,
}

impl Setup {
    /// Graph of trial `trial`; trials differ only in their seed.
    pub fn graph(&self, trial: u64) -> Result<Graph, CliError> {
        Ok(generate_connected(self.n, self.m, self.max_weight, self.sim.seed.wrapping_add(trial))?)
    }

    fn rng(&self, trial: u64, k: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.sim.seed);
        rng.set_stream(trial.wrapping_mul(1 << 20) ^ k as u64);
        rng
    }
}

/// Oracle comparison and cost of one trial.
#[derive(Clone, Copy, Debug, Default)]
pub struct Measurement {
    pub checks: usize,
    pub mismatches: usize,
    /// Answers smaller than the true distance.
    pub below: usize,
    pub rounds: u64,
    pub peak_congestion: u64,
}

impl Measurement {
    fn compare(&mut self, got: Dist, want: Dist) {
        self.checks += 1;
        self.mismatches += usize::from(got != want);
        self.below += usize::from(got < want);
    }

    pub fn absorb(&mut self, other: &Measurement) {
        self.checks += other.checks;
        self.mismatches += other.mismatches;
        self.below += other.below;
        self.rounds += other.rounds;
        self.peak_congestion = self.peak_congestion.max(other.peak_congestion);
    }

    pub fn exact_rate(&self) -> f64 {
        if self.checks == 0 {
            1.0
        } else {
            1.0 - self.mismatches as f64 / self.checks as f64
        }
    }
}

/// `k` queries that all fail one edge of a random shortest path.
fn shared_edge_queries(g: &Graph, rng: &mut ChaCha8Rng, k: usize) -> QueryBatch {
    let n = g.n();
    let (u, v) = loop {
        let x = rng.gen_range(0..n);
        match build_sp_tree(g, x).path_to(rng.gen_range(0..n)) {
            Some(p) if p.len() > 1 => {
                let j = rng.gen_range(0..p.len() - 1);
                break (p[j], p[j + 1]);
            }
            _ => continue,
        }
    };
    (0..k).map(|_| Query::new(rng.gen_range(0..n), rng.gen_range(0..n), u, v)).collect()
}

fn check_answers(g: &Graph, answers: &BatchAnswers, out: &mut Measurement) -> Result<(), CliError> {
    for a in &answers.answers {
        let q = a.query;
        let got = a.result.map_err(|e| CliError::Data(format!("query {q:?} rejected: {e}")))?;
        let e = g.require_edge(q.u, q.v)?;
        out.compare(got, oracle::rp(g, q.x, q.y, e)?);
    }
    Ok(())
}

/// Runs `algo` on trial `trial` with batch size `k`. Query-answering
/// algorithms report the cost of the query phase only.
pub fn run_trial(algo: Algo, setup: &Setup, trial: u64, k: usize) -> Result<Measurement, CliError> {
    let g = setup.graph(trial)?;
    let mut rng = setup.rng(trial, k);
    let mut run = NetworkRun::new(&g, setup.sim)?;
    let mut out = Measurement::default();
    let answers = match algo {
        Algo::Exclude => {
            let reqs: Vec<ExcludeRequest> = (0..k.min(g.n()))
                .map(|x| ExcludeRequest::new(x, random_independent_paths(&g, &build_sp_tree(&g, x), &mut rng, 4)))
                .collect();
            let results = exclude_multi_source(&mut run, &reqs, ExcludeOptions::default())?;
            for (req, res) in reqs.iter().zip(&results) {
                for (y, i, d) in res.entries() {
                    out.compare(d, oracle::excluded(&g, req.source, &req.paths[i].edges)?[y]);
                }
            }
            None
        }
        Algo::Apsisp => {
            let table = compute_2apsisp(&mut run);
            let truth = oracle::sisp2_table(&g, TieBreak::SmallestId);
            for (row, want) in table.d2.iter().zip(&truth) {
                for (&got, &want) in row.iter().zip(want) {
                    out.compare(got, want);
                }
            }
            None
        }
        Algo::Fastquery => {
            let state = preprocess_fast_query(&mut run)?;
            Some(answer_batch_fast(&mut run, &state, &random_queries(&g, &mut rng, k)))
        }
        Algo::Fastpre => {
            let state = preprocess_fast_pre(&mut run, FastPreParams { seed: setup.params.seed.wrapping_add(trial), ..setup.params })?;
            Some(answer_batch_pre(&mut run, &state, &random_queries(&g, &mut rng, k)))
        }
        Algo::General => Some(answer_general_no_pre(&mut run, &random_queries(&g, &mut rng, k))),
        Algo::Seb => Some(answer_seb_no_pre(&mut run, &shared_edge_queries(&g, &mut rng, k))?),
    };
    match answers {
        Some(answers) => {
            check_answers(&g, &answers, &mut out)?;
            let phase = run.ledger().phase("query");
            (out.rounds, out.peak_congestion) = phase.map_or((0, 0), |p| (p.rounds, p.peak_congestion));
        }
        None => {
            out.rounds = run.ledger().rounds();
            out.peak_congestion = run.ledger().peak_congestion();
        }
    }
    Ok(out)
}
