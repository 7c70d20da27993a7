//! Synchronous round engine.
//!
//! A [`Protocol`] reacts to the messages delivered in each round by queueing
//! new messages on communication links. Every link direction delivers at most
//! `B` words per round; longer queues drain FIFO over later rounds. The
//! engine records, per round and link direction, how many words crossed,
//! producing a [`Trace`].

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::sync::atomic::{AtomicU64, Ordering};

use super::topology::{LinkId, Topology};
use crate::graph::Vertex;

static BANDWIDTH_CHECKS: AtomicU64 = AtomicU64::new(0);

/// Number of (round, link) bandwidth checks the engine has performed in this
/// process. A failed check panics, so a positive count means every check
/// passed.
pub fn bandwidth_checks() -> u64 {
    BANDWIDTH_CHECKS.load(Ordering::Relaxed)
}

#[derive(Clone, Copy, Debug)]
pub struct RoundCtx {
    /// 1-based index of the round whose deliveries are being handled.
    pub round: u64,
    pub bandwidth: usize,
}

#[derive(Clone, Debug)]
pub struct Delivery<M> {
    pub from: Vertex,
    pub to: Vertex,
    pub msg: M,
}

pub struct Outbox<M> {
    sends: Vec<(Vertex, Vertex, M)>,
}

impl<M> Outbox<M> {
    pub fn send(&mut self, from: Vertex, to: Vertex, msg: M) {
        self.sends.push((from, to, msg));
    }

    pub fn is_empty(&self) -> bool {
        self.sends.is_empty()
    }
}

pub trait Protocol {
    type Msg;

    /// Cost of a message in words (at least one).
    fn words(&self, msg: &Self::Msg) -> usize;

    /// Messages sent before the first round.
    fn start(&mut self, out: &mut Outbox<Self::Msg>);

    /// Handles the messages delivered in round `ctx.round`; anything sent
    /// here starts transmitting in the next round.
    fn on_round(&mut self, ctx: RoundCtx, inbox: Vec<Delivery<Self::Msg>>, out: &mut Outbox<Self::Msg>);

    /// Whether the protocol needs more rounds even with no traffic in flight.
    fn active(&self) -> bool {
        false
    }
}

/// Per-round, per-link record of an execution.
///
/// `events` holds sparse `(round, link, words)` entries with 0-based rounds.
/// `uniform` holds `(start, len, words)` segments that put `words` words on
/// every link direction in each round of the segment; these come from
/// charged cost-model phases.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    pub rounds: u64,
    pub events: Vec<(u64, LinkId, u32)>,
    pub uniform: Vec<(u64, u64, u32)>,
}

impl Trace {
    /// A phase of purely local computation lasting `rounds` rounds.
    pub fn idle(rounds: u64) -> Self {
        Trace { rounds, ..Default::default() }
    }

    /// Appends `other` so that it starts when `self` ends.
    pub fn then(&mut self, other: Trace) {
        let shift = self.rounds;
        self.events.extend(other.events.into_iter().map(|(r, l, w)| (r + shift, l, w)));
        self.uniform.extend(other.uniform.into_iter().map(|(s, len, w)| (s + shift, len, w)));
        self.rounds += other.rounds;
    }

    /// Words per link direction from sparse events, plus the words every link
    /// carries from uniform segments.
    pub fn link_totals(&self, links: usize) -> (Vec<u64>, u64) {
        let mut per = vec![0u64; links];
        for &(_, l, w) in &self.events {
            per[l as usize] += w as u64;
        }
        let uniform = self.uniform.iter().map(|&(_, len, w)| len * w as u64).sum();
        (per, uniform)
    }

    /// Maximum number of words over any single link direction.
    pub fn congestion(&self, links: usize) -> u64 {
        let (per, uniform) = self.link_totals(links);
        uniform + per.into_iter().max().unwrap_or(0)
    }

    pub fn total_words(&self, links: usize) -> u64 {
        let (per, uniform) = self.link_totals(links);
        per.into_iter().sum::<u64>() + uniform * links as u64
    }

    /// Largest number of words any link carries in a single round.
    pub fn max_words_per_round(&self) -> u64 {
        let mut per_round: HashMap<u64, u64> = HashMap::new();
        for &(s, len, w) in &self.uniform {
            for r in s..s + len {
                *per_round.entry(r).or_default() += w as u64;
            }
        }
        let mut sparse: HashMap<(u64, LinkId), u64> = HashMap::new();
        for &(r, l, w) in &self.events {
            *sparse.entry((r, l)).or_default() += w as u64;
        }
        let sparse_max = sparse.iter().map(|(&(r, _), &w)| w + per_round.get(&r).copied().unwrap_or(0)).max().unwrap_or(0);
        sparse_max.max(per_round.values().copied().max().unwrap_or(0))
    }
}

/// Engine context: the communication topology and per-link bandwidth.
#[derive(Clone, Copy)]
pub struct Sim<'a> {
    pub topo: &'a Topology,
    pub bandwidth: usize,
}

impl<'a> Sim<'a> {
    pub fn new(topo: &'a Topology, bandwidth: usize) -> Self {
        assert!(bandwidth >= 1, "bandwidth must be at least one word");
        Sim { topo, bandwidth }
    }

    /// Runs `proto` until no message is in flight and it reports inactive.
    pub fn execute<P: Protocol>(&self, proto: &mut P) -> Trace {
        let links = self.topo.num_links();
        let mut queues: Vec<VecDeque<(P::Msg, usize)>> = (0..links).map(|_| VecDeque::new()).collect();
        let mut busy: BTreeSet<LinkId> = BTreeSet::new();
        let mut trace = Trace::default();
        let mut out = Outbox { sends: Vec::new() };
        proto.start(&mut out);
        self.enqueue(proto, &mut out, &mut queues, &mut busy);
        let mut round = 0u64;
        while !busy.is_empty() || proto.active() {
            round += 1;
            let mut inbox = Vec::new();
            let mut drained = Vec::new();
            for &link in &busy {
                let queue = &mut queues[link as usize];
                let mut budget = self.bandwidth;
                let mut sent = 0usize;
                while budget > 0 {
                    let Some(front) = queue.front_mut() else { break };
                    let take = front.1.min(budget);
                    front.1 -= take;
                    budget -= take;
                    sent += take;
                    if front.1 == 0 {
                        let (msg, _) = queue.pop_front().expect("front exists");
                        let (from, to) = self.topo.link(link);
                        inbox.push(Delivery { from, to, msg });
                    }
                }
                assert!(sent <= self.bandwidth, "bandwidth exceeded on link {link} in round {round}");
                BANDWIDTH_CHECKS.fetch_add(1, Ordering::Relaxed);
                if sent > 0 {
                    trace.events.push((round - 1, link, sent as u32));
                }
                if queue.is_empty() {
                    drained.push(link);
                }
            }
            for link in drained {
                busy.remove(&link);
            }
            inbox.sort_by_key(|d| (d.to, d.from));
            proto.on_round(RoundCtx { round, bandwidth: self.bandwidth }, inbox, &mut out);
            self.enqueue(proto, &mut out, &mut queues, &mut busy);
        }
        trace.rounds = round;
        trace
    }

    fn enqueue<P: Protocol>(
        &self,
        proto: &P,
        out: &mut Outbox<P::Msg>,
        queues: &mut [VecDeque<(P::Msg, usize)>],
        busy: &mut BTreeSet<LinkId>,
    ) {
        for (from, to, msg) in out.sends.drain(..) {
            let link =
                self.topo.link_id(from, to).unwrap_or_else(|| panic!("{from} and {to} are not neighbours in the communication network"));
            let words = proto.words(&msg).max(1);
            queues[link as usize].push_back((msg, words));
            busy.insert(link);
        }
    }
}
