//! Graph shapes shared by the integration tests and the acceptance harness.

#![allow(dead_code)]

use congest_dso::graph::generate_connected;
pub use congest_dso::workload::{random_independent_paths, random_queries};
use congest_dso::Graph;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Strongly connected random graph whose density varies with `shape`:
/// 0 is a bare cycle (deep trees, many unreachable replacements), larger
/// values add chords.
pub fn shaped_graph(n: usize, shape: usize, max_w: u64, seed: u64) -> Graph {
    let m = match shape % 4 {
        0 => n,
        1 => n + n / 4,
        2 => 2 * n,
        _ => 4 * n,
    };
    generate_connected(n, m.min(n * (n - 1)), max_w, seed).expect("valid parameters")
}

/// A random rooted tree on `n` vertices as a graph of parent-to-child
/// edges; `chain` is the probability that a vertex hangs below its
/// predecessor, which controls depth.
pub fn random_tree_graph(n: usize, chain: f64, rng: &mut ChaCha8Rng) -> Graph {
    let mut g = Graph::new(n);
    for v in 1..n {
        let p = if rng.gen_bool(chain) { v - 1 } else { rng.gen_range(0..v) };
        g.add_edge(p, v, rng.gen_range(1..=5)).expect("fresh edge");
    }
    g
}
