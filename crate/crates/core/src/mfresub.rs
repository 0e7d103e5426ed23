//! Footprint-oriented resubstitution on a scheduled netlist.
//!
//! Looks at the operations held in memory at the first peak cycle and tries
//! to release one of them, either by merging it with an equivalent member
//! (case 1) or by rebuilding its only pending consumer from other available
//! signals (case 2). Operation order is kept, so the result needs no
//! re-scheduling.

use std::collections::HashSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::opt::resub::match_triple;
use crate::schedule::ScheduledNetlist;
use crate::sim::{check_candidate_equal, default_patterns, simulate, support_sets, Candidate, SimMatch, Simulation, Validator};
use crate::xmg::{Edge, NodeId, XmgNode};

pub const DEFAULT_N_TRIAL: usize = 500_000;
/// Seed of the simulation patterns used to screen candidates.
const PATTERN_SEED: u64 = 0x6d66;

/// Operations held in memory at the end of the first peak cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeakSet {
    pub p: usize,
    pub members: Vec<NodeId>,
}

pub fn first_peak(design: &ScheduledNetlist) -> Option<PeakSet> {
    let p = design.trace().first_peak()?;
    let members = design.live_after(p);
    debug_assert_eq!(members.len(), design.trace().at(p));
    Some(PeakSet { p, members })
}

/// One applied resubstitution, in ids of the netlist it was applied to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Resub {
    /// `replaced` was merged into an earlier member.
    Merge { replaced: NodeId, by: Edge },
    /// The only pending consumer `fanout` of `freed` was rebuilt as `gate`.
    Rebuild { freed: NodeId, fanout: NodeId, gate: XmgNode },
}

/// Outcome classes over (size, MF) before and after.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResubCategory {
    NoResub,
    NoChange,
    TradeOff,
    LessMf,
    LessSize,
    BothLess,
}

impl ResubCategory {
    pub const ALL: [ResubCategory; 6] = [
        ResubCategory::NoResub,
        ResubCategory::NoChange,
        ResubCategory::TradeOff,
        ResubCategory::LessMf,
        ResubCategory::LessSize,
        ResubCategory::BothLess,
    ];

    /// Any MF increase is a trade-off.
    pub fn classify(fired: bool, before: (usize, usize), after: (usize, usize)) -> ResubCategory {
        let (s0, m0) = before;
        let (s1, m1) = after;
        if !fired {
            ResubCategory::NoResub
        } else if m1 > m0 || s1 > s0 {
            ResubCategory::TradeOff
        } else {
            match (s1 < s0, m1 < m0) {
                (true, true) => ResubCategory::BothLess,
                (true, false) => ResubCategory::LessSize,
                (false, true) => ResubCategory::LessMf,
                (false, false) => ResubCategory::NoChange,
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ResubCategory::NoResub => "no resub",
            ResubCategory::NoChange => "no change",
            ResubCategory::TradeOff => "trade off",
            ResubCategory::LessMf => "less MF",
            ResubCategory::LessSize => "less size",
            ResubCategory::BothLess => "both less",
        }
    }

    pub fn is_improvement(self) -> bool {
        matches!(self, ResubCategory::LessMf | ResubCategory::LessSize | ResubCategory::BothLess)
    }
}

impl fmt::Display for ResubCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug)]
pub struct MfResubOutcome {
    pub design: ScheduledNetlist,
    pub category: ResubCategory,
    pub steps: Vec<Resub>,
}

fn pattern_sim(design: &ScheduledNetlist) -> Simulation {
    let net = design.netlist();
    simulate(net, &default_patterns(net.num_pis(), PATTERN_SEED)).expect("pattern count matches")
}

/// Merge the first peak member equivalent (up to complement) to an earlier
/// member into it.
pub fn mfresub_case1(design: &ScheduledNetlist) -> Option<(ScheduledNetlist, Resub)> {
    let peak = first_peak(design)?;
    let sim = pattern_sim(design);
    case1(design, &peak, &sim, &Validator::default())
}

fn case1(design: &ScheduledNetlist, peak: &PeakSet, sim: &Simulation, validator: &Validator) -> Option<(ScheduledNetlist, Resub)> {
    let net = design.netlist();
    for (jx, &j) in peak.members.iter().enumerate() {
        for &i in &peak.members[..jx] {
            let by = match check_candidate_equal(sim.get(j), sim.get(i)) {
                SimMatch::Equal => Edge::plain(i),
                SimMatch::Complement => !Edge::plain(i),
                SimMatch::Neither => continue,
            };
            if !validator.check(net, Edge::plain(j), &Candidate::Signal(by)).is_equivalent() {
                continue;
            }
            if let Ok(out) = net.substitute(j, by) {
                return Some((ScheduledNetlist::in_order(out), Resub::Merge { replaced: j, by }));
            }
        }
    }
    None
}

/// Rebuild the only pending consumer of some peak member without it, from
/// other peak members, operations scheduled before that consumer, the PIs
/// it depends on and the constant.
pub fn mfresub_case2(design: &ScheduledNetlist, n_trial: usize, seed: u64) -> Option<(ScheduledNetlist, Resub)> {
    let peak = first_peak(design)?;
    let sim = pattern_sim(design);
    case2(design, &peak, &sim, &Validator::default(), n_trial, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn case2(
    design: &ScheduledNetlist,
    peak: &PeakSet,
    sim: &Simulation,
    validator: &Validator,
    n_trial: usize,
    rng: &mut ChaCha8Rng,
) -> Option<(ScheduledNetlist, Resub)> {
    let net = design.netlist();
    let p = peak.p;
    let fanouts = net.fanout_lists();
    let is_po = net.po_flags();
    let support = support_sets(net);
    for &j in &peak.members {
        if is_po[j.index()] {
            continue;
        }
        let pending: Vec<NodeId> = fanouts[j.index()].iter().copied().filter(|&c| net.cycle_of(c).unwrap() > p).collect();
        let [f] = pending[..] else { continue };
        let f_cycle = net.cycle_of(f).unwrap();

        let target_support = &support[f.index()];
        let mut divisors: Vec<NodeId> = std::iter::once(NodeId::CONST0)
            .chain(target_support.iter().map(|k| NodeId(k as u32 + 1)))
            .chain(peak.members.iter().copied().filter(|&d| d != j))
            .chain((p + 1..f_cycle).map(|t| net.node_at_cycle(t).unwrap()))
            .filter(|&d| !net.is_op(d) || support[d.index()].is_subset(target_support))
            .collect();
        divisors.sort();
        divisors.dedup();

        let target = sim.get(f);
        let mut accept = |g: &XmgNode| validator.check(net, Edge::plain(f), &Candidate::Gate(g.kind, g.fanins)).is_equivalent();
        let found = for_each_triple(divisors.len(), n_trial, rng, |[a, b, c]| {
            match_triple(sim, target, [divisors[a], divisors[b], divisors[c]], &mut accept)
        });
        if let Some(gate) = found {
            if let Ok(out) = net.replace_node(f, gate.clone()) {
                return Some((ScheduledNetlist::in_order(out), Resub::Rebuild { freed: j, fanout: f, gate }));
            }
        }
    }
    None
}

/// Visit every index triple `a < b < c` below `n` in lexicographic order
/// when there are at most `n_trial` of them, otherwise `n_trial` distinct
/// triples drawn uniformly. Stops at the first `Some`.
fn for_each_triple<T>(n: usize, n_trial: usize, rng: &mut ChaCha8Rng, mut visit: impl FnMut([usize; 3]) -> Option<T>) -> Option<T> {
    if n < 3 {
        return None;
    }
    let total = (n as u128) * (n as u128 - 1) * (n as u128 - 2) / 6;
    if total <= n_trial as u128 {
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    if let Some(t) = visit([a, b, c]) {
                        return Some(t);
                    }
                }
            }
        }
        return None;
    }
    let mut seen: HashSet<[usize; 3]> = HashSet::with_capacity(n_trial.min(1 << 20));
    while seen.len() < n_trial {
        let mut t = [rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n)];
        t.sort_unstable();
        if t[0] == t[1] || t[1] == t[2] || !seen.insert(t) {
            continue;
        }
        if let Some(r) = visit(t) {
            return Some(r);
        }
    }
    None
}

/// Apply case 1, else case 2, to the design and repeat on the result until
/// neither finds anything.
pub fn mfresub(design: &ScheduledNetlist, n_trial: usize, seed: u64) -> MfResubOutcome {
    let validator = Validator::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = design.clone();
    let mut steps = Vec::new();
    let mut seen: HashSet<u64> = HashSet::from([cur.netlist().structural_hash()]);
    // Case 2 keeps the size, so a cycle of rebuilds is conceivable; stop at
    // the first repeated netlist.
    while let Some(peak) = first_peak(&cur) {
        let sim = pattern_sim(&cur);
        let next = case1(&cur, &peak, &sim, &validator).or_else(|| case2(&cur, &peak, &sim, &validator, n_trial, &mut rng));
        let Some((next, step)) = next else { break };
        if !seen.insert(next.netlist().structural_hash()) {
            break;
        }
        steps.push(step);
        cur = next;
    }
    let category = ResubCategory::classify(!steps.is_empty(), (design.size(), design.mf()), (cur.size(), cur.mf()));
    MfResubOutcome { design: cur, category, steps }
}
