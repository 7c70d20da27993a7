//! Shared fixtures for the benchmarks.

use congest_dso::graph::generate_connected;
use congest_dso::workload::random_queries;
use congest_dso::{CostModel, Graph, QueryBatch, SimConfig};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Connected random graph with three edges per vertex.
pub fn graph(n: usize, seed: u64) -> Graph {
    generate_connected(n, 3 * n, 20, seed).expect("valid parameters")
}

pub fn queries(g: &Graph, k: usize, seed: u64) -> QueryBatch {
    random_queries(g, &mut ChaCha8Rng::seed_from_u64(seed), k)
}

pub fn charged() -> SimConfig {
    SimConfig { cost: CostModel::charged(), ..Default::default() }
}
