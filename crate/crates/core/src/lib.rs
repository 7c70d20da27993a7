//! Message-level simulation of the synchronous CONGEST model, together with
//! distributed algorithms for excluded shortest paths, distance sensitivity
//! oracles (DSOs) and all-pairs second simple shortest paths (2-APSiSP).
//!
//! Every distributed algorithm runs on a [`sim::NetworkRun`], which enforces
//! per-link bandwidth and records rounds and congestion in a
//! [`sim::CostLedger`]. The [`oracle`] module holds centralized reference
//! implementations, written independently of the simulator, that the tests
//! compare against.

pub mod apsisp;
pub mod baseline;
pub mod dso_fastpre;
pub mod dso_fastquery;
mod error;
pub mod exclude;
pub mod graph;
pub mod io;
pub mod lowerbound;
pub mod oracle;
pub mod query;
pub mod sim;
pub mod workload;

pub use error::{Error, Result};
pub use graph::{Dist, EdgeId, Graph, PathSpec, ShortestPathTree, Vertex, Weight, INF};
pub use query::{AnswerCase, BatchAnswers, Query, QueryAnswer, QueryBatch, QueryError};
pub use sim::{CostLedger, CostMode, CostModel, NetworkRun, SimConfig};

/// `⌈√n⌉`, used wherever a square-root threshold appears.
pub fn ceil_sqrt(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    while r * r < n {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= n {
        r -= 1;
    }
    r
}

/// `⌈log₂ n⌉` with `ceil_log2(1) == 0`.
pub fn ceil_log2(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_roots() {
        assert_eq!(ceil_sqrt(0), 0);
        assert_eq!(ceil_sqrt(1), 1);
        assert_eq!(ceil_sqrt(25), 5);
        assert_eq!(ceil_sqrt(26), 6);
        assert_eq!(ceil_sqrt(63), 8);
        assert_eq!(ceil_sqrt(64), 8);
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(7), 3);
        assert_eq!(ceil_log2(8), 3);
        assert_eq!(ceil_log2(9), 4);
    }
}
