mod common;

use congest_dso::baseline::{answer_general_no_pre, answer_seb_no_pre};
use congest_dso::dso_fastpre::{answer_batch_pre, preprocess_fast_pre, FastPreParams};
use congest_dso::dso_fastquery::{answer_batch_fast, preprocess_fast_query};
use congest_dso::exclude::{exclude_multi_source, ExcludeOptions, ExcludeRequest};
use congest_dso::graph::{build_sp_tree, generate_connected, generate_random};
use congest_dso::io::{parse_exclude_requests, parse_queries, write_answers, write_exclude_results, write_queries};
use congest_dso::lowerbound::{build_fig1, DisjointnessInstance};
use congest_dso::oracle;
use congest_dso::{CostModel, NetworkRun, Query, QueryBatch, SimConfig};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{random_independent_paths, random_queries};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn multi_source_exclude_matches_oracle(n in 4usize..24, extra in 0usize..40, seed in any::<u64>(), sources in 1usize..4) {
        let m = (n + extra).min(n * (n - 1));
        let g = generate_random(n, m, 30, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let reqs: Vec<ExcludeRequest> = (0..sources.min(n))
            .map(|x| ExcludeRequest::new(x, random_independent_paths(&g, &build_sp_tree(&g, x), &mut rng, 3)))
            .collect();
        let mut run = NetworkRun::new(&g, SimConfig::default()).unwrap();
        let results = exclude_multi_source(&mut run, &reqs, ExcludeOptions::default()).unwrap();
        for (req, res) in reqs.iter().zip(&results) {
            for (y, i, d) in res.entries() {
                prop_assert_eq!(d, oracle::excluded(&g, req.source, &req.paths[i].edges).unwrap()[y]);
            }
        }
    }
}

/// Both oracles reproduce the disjointness answer on the first lower-bound
/// family, including unreachable pairs.
#[test]
fn dsos_answer_fig1_replacements() {
    for seed in 0..4u64 {
        let inst = DisjointnessInstance::random(3, 3, seed);
        let f = build_fig1(3, 3, 4, &inst).unwrap();
        let batch: QueryBatch = (0..f.k)
            .flat_map(|i| f.star_path.windows(2).map(move |w| (i, w[0], w[1])))
            .map(|(i, u, v)| Query::new(f.a[i], f.b[i], u, v))
            .collect();
        let mut run = NetworkRun::new(&f.graph, SimConfig::default()).unwrap();
        let state = preprocess_fast_query(&mut run).unwrap();
        let fast = answer_batch_fast(&mut run, &state, &batch);
        let state = preprocess_fast_pre(&mut run, FastPreParams { seed, ..Default::default() }).unwrap();
        let pre = answer_batch_pre(&mut run, &state, &batch);
        for (a, b) in fast.answers.iter().zip(&pre.answers) {
            let i = f.a.iter().position(|&x| x == a.query.x).unwrap();
            let want = f.expected_replacement(i, &inst);
            assert_eq!(a.result, Ok(want), "fast query {:?}", a.query);
            assert_eq!(b.result, Ok(want), "fast pre {:?}", b.query);
        }
    }
}

/// The single-edge batch baseline agrees with the general one.
#[test]
fn seb_baseline_matches_general() {
    for (seed, w) in [(1u64, 1), (2, 20)] {
        let g = generate_connected(20, 50, w, seed).unwrap();
        let e = g.edge(7);
        let batch: QueryBatch = (0..10).map(|i| Query::new((i * 3) % 20, (i * 7 + 1) % 20, e.from, e.to)).collect();
        let mut run = NetworkRun::new(&g, SimConfig { cost: CostModel::charged(), ..Default::default() }).unwrap();
        let general = answer_general_no_pre(&mut run, &batch).distances();
        let seb = answer_seb_no_pre(&mut run, &batch).unwrap().distances();
        assert_eq!(general, seb);
        for (q, d) in batch.queries.iter().zip(general) {
            assert_eq!(d, Some(oracle::rp(&g, q.x, q.y, 7).unwrap()));
        }
    }
}

#[test]
fn text_formats_round_trip() {
    let g = generate_connected(16, 40, 9, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let batch = random_queries(&g, &mut rng, 12);
    assert_eq!(parse_queries(&write_queries(&batch)).unwrap(), batch);

    let tree = build_sp_tree(&g, 2);
    let paths = random_independent_paths(&g, &tree, &mut rng, 3);
    let text: String = paths
        .iter()
        .map(|p| {
            let vs: Vec<String> = p.vertices(&g).iter().map(ToString::to_string).collect();
            format!("2; path = {}\n", vs.join(" "))
        })
        .collect();
    let reqs = parse_exclude_requests(&text, &g).unwrap();
    assert_eq!(reqs, vec![ExcludeRequest::new(2, paths)]);
    let mut run = NetworkRun::new(&g, SimConfig::default()).unwrap();
    let results = exclude_multi_source(&mut run, &reqs, ExcludeOptions::default()).unwrap();
    let csv = write_exclude_results(&reqs, &results);
    assert_eq!(csv.lines().count(), 1 + results[0].entries().count());

    let answers = answer_general_no_pre(&mut run, &batch);
    assert_eq!(write_answers(&answers, true).lines().count(), 1 + batch.len());
}
