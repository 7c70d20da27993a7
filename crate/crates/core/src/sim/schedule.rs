//! Random-delay scheduling of independent algorithm instances.
//!
//! Instances are executed standalone first; their traces are then overlaid
//! with each instance shifted by a random delay. Time advances in big steps,
//! one per original round. A step lasts as many rounds as its busiest link
//! needs to carry the combined load at bandwidth `B`, and at least one.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::engine::Trace;
use super::ledger::LedgerDelta;
use super::NetworkRun;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScheduleReport {
    pub delays: Vec<u64>,
    pub delta: LedgerDelta,
    /// Instances that exceeded their declared congestion or round bound.
    pub violations: Vec<usize>,
}

/// Overlays `instances` with delays drawn uniformly from `[0, k·C)` and
/// charges the composed execution to `phase`. `congestion_bound` and
/// `round_bound` are the declared per-instance bounds; exceeding them is
/// recorded as a ledger warning.
pub fn schedule_random_delays(
    run: &mut NetworkRun<'_>,
    phase: &str,
    instances: &[Trace],
    congestion_bound: u64,
    round_bound: u64,
    seed: u64,
) -> ScheduleReport {
    let links = run.topology().num_links();
    let bandwidth = run.config().bandwidth as u64;
    let k = instances.len() as u64;
    let span = (k * congestion_bound).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let delays: Vec<u64> = instances.iter().map(|_| if k <= 1 { 0 } else { rng.gen_range(0..span) }).collect();

    let mut violations = Vec::new();
    for (i, t) in instances.iter().enumerate() {
        let c = t.congestion(links);
        if c > congestion_bound || t.rounds > round_bound {
            violations.push(i);
            run.ledger_mut().warn(format!(
                "{phase}: instance {i} used congestion {c} and {} rounds, declared bounds {congestion_bound} and {round_bound}",
                t.rounds
            ));
        }
    }

    let end = instances.iter().zip(&delays).map(|(t, &d)| d + t.rounds).max().unwrap_or(0) as usize;
    // Words every link carries in each big step from uniform segments.
    let mut uniform = vec![0i64; end + 1];
    let mut events: Vec<(u64, u32, u64)> = Vec::new();
    let mut link_words = vec![0u64; links];
    let mut uniform_total = 0u64;
    for (t, &d) in instances.iter().zip(&delays) {
        for &(s, len, w) in &t.uniform {
            uniform[(d + s) as usize] += w as i64;
            uniform[(d + s + len) as usize] -= w as i64;
            uniform_total += len * w as u64;
        }
        for &(r, l, w) in &t.events {
            events.push((d + r, l, w as u64));
            link_words[l as usize] += w as u64;
        }
    }
    events.sort_unstable();
    let mut level = 0i64;
    let uniform_level: Vec<u64> = uniform[..end]
        .iter()
        .map(|&d| {
            level += d;
            level as u64
        })
        .collect();
    let mut step_load = uniform_level.clone();
    let mut i = 0;
    while i < events.len() {
        let (s, l, _) = events[i];
        let mut w = 0;
        while i < events.len() && events[i].0 == s && events[i].1 == l {
            w += events[i].2;
            i += 1;
        }
        let s = s as usize;
        step_load[s] = step_load[s].max(uniform_level[s] + w);
    }
    let rounds: u64 = step_load.iter().map(|&load| load.div_ceil(bandwidth).max(1)).sum();
    let delta = run.ledger_mut().charge(phase, rounds, &link_words, uniform_total);
    ScheduleReport { delays, delta, violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::sim::SimConfig;

    fn ring(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n, 1))).unwrap()
    }

    #[test]
    fn single_instance_is_direct() {
        let g = ring(6);
        let mut run = NetworkRun::new(&g, SimConfig::default()).unwrap();
        let t = Trace { rounds: 5, events: vec![(0, 0, 1), (3, 2, 1)], uniform: vec![] };
        let rep = schedule_random_delays(&mut run, "x", std::slice::from_ref(&t), 2, 5, 1);
        assert_eq!(rep.delays, vec![0]);
        assert_eq!(rep.delta.rounds, 5);
        assert_eq!(rep.delta.peak_congestion, t.congestion(run.topology().num_links()));
    }

    #[test]
    fn silent_instances_take_max_rounds() {
        let g = ring(6);
        let mut run = NetworkRun::new(&g, SimConfig::default()).unwrap();
        let traces = vec![Trace::idle(3), Trace::idle(7), Trace::idle(4)];
        let rep = schedule_random_delays(&mut run, "x", &traces, 0, 7, 2);
        assert!(rep.delta.rounds <= 7);
        assert!(rep.violations.is_empty());
    }

    #[test]
    fn overlapping_load_stretches_steps() {
        let g = ring(4);
        let mut run = NetworkRun::new(&g, SimConfig::default()).unwrap();
        let t = Trace { rounds: 1, events: vec![(0, 0, 1)], uniform: vec![] };
        // Declared C = 0 forces every delay to zero: three words meet on one link.
        let rep = schedule_random_delays(&mut run, "x", &[t.clone(), t.clone(), t], 0, 1, 3);
        assert_eq!(rep.delta.rounds, 3);
        assert_eq!(rep.violations, vec![0, 1, 2]);
        assert_eq!(run.ledger().warnings().len(), 3);
    }
}
