use std::collections::HashMap;
use std::fmt::Write as _;

use super::engine::Trace;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhaseRecord {
    pub phase: String,
    pub rounds: u64,
    pub peak_congestion: u64,
    pub total_words: u64,
}

/// What a single charge added to a ledger.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LedgerDelta {
    pub rounds: u64,
    pub peak_congestion: u64,
    pub total_words: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct PhaseAcc {
    rounds: u64,
    link_words: Vec<u64>,
    uniform: u64,
}

/// Round counter and per-link word counters of a run, with a per-phase
/// breakdown.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostLedger {
    rounds: u64,
    link_words: Vec<u64>,
    uniform_words: u64,
    phase_order: Vec<String>,
    phases: HashMap<String, PhaseAcc>,
    warnings: Vec<String>,
}

impl CostLedger {
    pub fn new(links: usize) -> Self {
        CostLedger {
            rounds: 0,
            link_words: vec![0; links],
            uniform_words: 0,
            phase_order: Vec::new(),
            phases: HashMap::new(),
            warnings: Vec::new(),
        }
    }

    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    pub fn num_links(&self) -> usize {
        self.link_words.len()
    }

    /// Words sent over link direction `link` so far.
    pub fn words_on(&self, link: usize) -> u64 {
        self.link_words[link] + self.uniform_words
    }

    pub fn peak_congestion(&self) -> u64 {
        if self.link_words.is_empty() {
            return 0;
        }
        self.uniform_words + self.link_words.iter().copied().max().unwrap_or(0)
    }

    pub fn total_words(&self) -> u64 {
        self.link_words.iter().sum::<u64>() + self.uniform_words * self.link_words.len() as u64
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn warn(&mut self, msg: impl Into<String>) {
        self.warnings.push(msg.into());
    }

    /// Adds `rounds` rounds, `link_words[l]` words on each link and
    /// `uniform` further words on every link, attributed to `phase`.
    pub fn charge(&mut self, phase: &str, rounds: u64, link_words: &[u64], uniform: u64) -> LedgerDelta {
        assert_eq!(link_words.len(), self.link_words.len(), "link count mismatch");
        self.rounds += rounds;
        self.uniform_words += uniform;
        for (acc, w) in self.link_words.iter_mut().zip(link_words) {
            *acc += w;
        }
        let links = self.link_words.len();
        let acc = self.phases.entry(phase.to_string()).or_insert_with(|| {
            self.phase_order.push(phase.to_string());
            PhaseAcc { rounds: 0, link_words: vec![0; links], uniform: 0 }
        });
        acc.rounds += rounds;
        acc.uniform += uniform;
        for (a, w) in acc.link_words.iter_mut().zip(link_words) {
            *a += w;
        }
        let peak = if links == 0 { 0 } else { uniform + link_words.iter().copied().max().unwrap_or(0) };
        LedgerDelta { rounds, peak_congestion: peak, total_words: link_words.iter().sum::<u64>() + uniform * links as u64 }
    }

    pub fn charge_trace(&mut self, phase: &str, trace: &Trace) -> LedgerDelta {
        let (per, uniform) = trace.link_totals(self.link_words.len());
        self.charge(phase, trace.rounds, &per, uniform)
    }

    /// One record per phase in first-charged order.
    pub fn phases(&self) -> Vec<PhaseRecord> {
        self.phase_order
            .iter()
            .map(|name| {
                let acc = &self.phases[name];
                let links = acc.link_words.len() as u64;
                let peak = if links == 0 { 0 } else { acc.uniform + acc.link_words.iter().copied().max().unwrap_or(0) };
                PhaseRecord {
                    phase: name.clone(),
                    rounds: acc.rounds,
                    peak_congestion: peak,
                    total_words: acc.link_words.iter().sum::<u64>() + acc.uniform * links,
                }
            })
            .collect()
    }

    pub fn phase(&self, name: &str) -> Option<PhaseRecord> {
        self.phases().into_iter().find(|p| p.phase == name)
    }

    /// CSV with header `phase,rounds,peak_congestion,total_words` and a final
    /// `total` row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("phase,rounds,peak_congestion,total_words\n");
        for p in self.phases() {
            let _ = writeln!(out, "{},{},{},{}", p.phase, p.rounds, p.peak_congestion, p.total_words);
        }
        let _ = writeln!(out, "total,{},{},{}", self.rounds, self.peak_congestion(), self.total_words());
        out
    }
}
