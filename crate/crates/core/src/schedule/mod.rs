//! Execution order, row assignment and memory-usage traces.
//!
//! A scheduled netlist is stored re-indexed so that the operation with id
//! `num_pis + t` runs at clock cycle `t`. A result occupies a row from its
//! cycle until its last consumer runs; the consumer may overwrite it in
//! place. PO drivers keep their rows to the end. Ordinary PIs live in their
//! own rows and are not counted; temporary inputs (sub-netlist PIs standing
//! for parent results) are counted and freed like operation results.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::xmg::{NodeId, XmgError, XmgNetlist};

mod exact;
mod heuristic;
mod interpret;
mod window;

pub use exact::{schedule_exact, DEFAULT_NODE_LIMIT};
pub use heuristic::schedule_heuristic;
pub use interpret::{interpret, InterpretError};
pub use window::{peak_window, PeakWindow};

/// Netlists up to this size go to the exact engine by default.
pub const DEFAULT_EXACT_THRESHOLD: usize = 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScheduleError {
    #[error("order is not a permutation of the operations")]
    NotAPermutation,
    #[error("node {node} scheduled before its fan-in {fanin}")]
    NotTopological { node: NodeId, fanin: NodeId },
    #[error("temporary input {0} is not a PI")]
    NotATemporary(NodeId),
    #[error("netlist has {size} operations, exact engine limit is {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error(transparent)]
    Netlist(#[from] XmgError),
}

/// Occupied rows after each clock cycle; index 0 is cycle 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoryUsageTrace {
    pub usage: Vec<usize>,
}

impl MemoryUsageTrace {
    pub fn new(usage: Vec<usize>) -> MemoryUsageTrace {
        MemoryUsageTrace { usage }
    }

    pub fn len(&self) -> usize {
        self.usage.len()
    }

    pub fn is_empty(&self) -> bool {
        self.usage.is_empty()
    }

    /// Usage after cycle `t` (1-based).
    pub fn at(&self, t: usize) -> usize {
        self.usage[t - 1]
    }

    pub fn max(&self) -> usize {
        self.usage.iter().copied().max().unwrap_or(0)
    }

    /// First cycle reaching the maximum.
    pub fn first_peak(&self) -> Option<usize> {
        let m = self.max();
        self.usage.iter().position(|&u| u == m).map(|i| i + 1)
    }
}

/// Result of replaying one order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Liveness {
    pub mf: usize,
    pub trace: MemoryUsageTrace,
    /// Slot of each scheduled operation, in order. Slot `s` is the `s`-th
    /// row after the PI rows.
    pub slots: Vec<u32>,
    /// Slots initially held by temporary inputs, ascending by id.
    pub temporary_slots: Vec<(NodeId, u32)>,
}

/// Cycle at which each value is last read, over operations and
/// temporaries. `usize::MAX` marks PO drivers.
fn last_uses(net: &XmgNetlist, cycle: &[usize]) -> Vec<Option<usize>> {
    let mut last = vec![None; net.num_ids()];
    for id in net.op_ids() {
        let t = cycle[id.index()];
        for f in net.node(id).unwrap().fanins {
            let slot = &mut last[f.node().index()];
            *slot = Some(slot.map_or(t, |u: usize| u.max(t)));
        }
    }
    for po in net.pos() {
        last[po.node().index()] = Some(usize::MAX);
    }
    last
}

/// Replay `order` and compute memory usage, footprint and row slots.
pub fn liveness_mf(net: &XmgNetlist, order: &[NodeId], temporaries: &BTreeSet<NodeId>) -> Result<Liveness, ScheduleError> {
    if order.len() != net.size() {
        return Err(ScheduleError::NotAPermutation);
    }
    for &tmp in temporaries {
        if !net.is_pi(tmp) {
            return Err(ScheduleError::NotATemporary(tmp));
        }
    }
    let mut cycle = vec![0usize; net.num_ids()];
    for (i, &id) in order.iter().enumerate() {
        if !net.is_op(id) || cycle[id.index()] != 0 {
            return Err(ScheduleError::NotAPermutation);
        }
        cycle[id.index()] = i + 1;
    }
    for &id in order {
        for f in net.node(id).unwrap().fanins {
            let n = f.node();
            if net.is_op(n) && cycle[n.index()] >= cycle[id.index()] {
                return Err(ScheduleError::NotTopological { node: id, fanin: n });
            }
        }
    }
    let last = last_uses(net, &cycle);
    let counted = |id: NodeId| net.is_op(id) || temporaries.contains(&id);

    let mut slot_of = vec![u32::MAX; net.num_ids()];
    let mut free: BinaryHeap<Reverse<u32>> = BinaryHeap::new();
    let mut next = 0u32;
    let mut alloc = |free: &mut BinaryHeap<Reverse<u32>>| match free.pop() {
        Some(Reverse(s)) => s,
        None => {
            next += 1;
            next - 1
        }
    };
    let mut live = 0usize;
    let mut temporary_slots = Vec::new();
    for &tmp in temporaries {
        if last[tmp.index()].is_some() {
            let s = alloc(&mut free);
            slot_of[tmp.index()] = s;
            temporary_slots.push((tmp, s));
            live += 1;
        }
    }
    let mut mf = live;
    let mut usage = Vec::with_capacity(order.len());
    let mut slots = Vec::with_capacity(order.len());
    for (i, &id) in order.iter().enumerate() {
        let t = i + 1;
        let mut fanins: Vec<NodeId> = net.node(id).unwrap().fanins.iter().map(|f| f.node()).collect();
        fanins.sort();
        fanins.dedup();
        for n in fanins {
            if counted(n) && last[n.index()] == Some(t) {
                free.push(Reverse(slot_of[n.index()]));
                live -= 1;
            }
        }
        let s = alloc(&mut free);
        slot_of[id.index()] = s;
        slots.push(s);
        live += 1;
        usage.push(live);
        mf = mf.max(live);
        if last[id.index()].is_none() {
            // Dangling result: written, never read.
            free.push(Reverse(s));
            live -= 1;
        }
    }
    debug_assert_eq!(next as usize, mf, "lowest-free assignment must not exceed the live maximum");
    Ok(Liveness { mf, trace: MemoryUsageTrace::new(usage), slots, temporary_slots })
}

/// A netlist whose operation ids equal clock cycles, with its row slots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScheduledNetlist {
    netlist: XmgNetlist,
    slots: Vec<u32>,
    mf: usize,
    trace: MemoryUsageTrace,
    temporaries: BTreeSet<NodeId>,
}

impl ScheduledNetlist {
    /// Re-index `net` by `order` and compute liveness.
    pub fn from_order(net: &XmgNetlist, order: &[NodeId], temporaries: &BTreeSet<NodeId>) -> Result<ScheduledNetlist, ScheduleError> {
        let live = liveness_mf(net, order, temporaries)?;
        let netlist = net.reorder(order)?;
        Ok(ScheduledNetlist { netlist, slots: live.slots, mf: live.mf, trace: live.trace, temporaries: temporaries.clone() })
    }

    /// Treat the current id order as the schedule.
    pub fn in_order(net: XmgNetlist) -> ScheduledNetlist {
        ScheduledNetlist::in_order_with(net, BTreeSet::new())
    }

    pub fn in_order_with(net: XmgNetlist, temporaries: BTreeSet<NodeId>) -> ScheduledNetlist {
        let order: Vec<NodeId> = net.op_ids().collect();
        let live = liveness_mf(&net, &order, &temporaries).expect("id order is topological");
        ScheduledNetlist { netlist: net, slots: live.slots, mf: live.mf, trace: live.trace, temporaries }
    }

    pub fn netlist(&self) -> &XmgNetlist {
        &self.netlist
    }

    pub fn into_netlist(self) -> XmgNetlist {
        self.netlist
    }

    pub fn size(&self) -> usize {
        self.netlist.size()
    }

    pub fn mf(&self) -> usize {
        self.mf
    }

    pub fn trace(&self) -> &MemoryUsageTrace {
        &self.trace
    }

    pub fn temporaries(&self) -> &BTreeSet<NodeId> {
        &self.temporaries
    }

    /// Row slot of the operation executed at `cycle`.
    pub fn slot_at(&self, cycle: usize) -> u32 {
        self.slots[cycle - 1]
    }

    pub fn slots(&self) -> &[u32] {
        &self.slots
    }

    /// Row in a single array: PI `k` in row `k`, slot `s` in row
    /// `num_pis + 1 + s`. The constant has no row.
    pub fn row_of(&self, id: NodeId) -> Option<usize> {
        if self.netlist.is_pi(id) {
            Some(id.index())
        } else {
            self.netlist.cycle_of(id).map(|t| self.netlist.num_pis() + 1 + self.slots[t - 1] as usize)
        }
    }

    /// Operations (and temporaries) holding a row at the end of `cycle`.
    /// Its size equals `trace().at(cycle)`.
    pub fn live_after(&self, cycle: usize) -> Vec<NodeId> {
        let net = &self.netlist;
        let cycles: Vec<usize> = (0..net.num_ids()).map(|i| i.saturating_sub(net.num_pis())).collect();
        let last = last_uses(net, &cycles);
        let later = |id: NodeId| last[id.index()].is_some_and(|u| u > cycle);
        let mut out: Vec<NodeId> = self.temporaries.iter().copied().filter(|&t| later(t)).collect();
        out.extend(net.op_ids().take(cycle).filter(|&id| later(id) || cycles[id.index()] == cycle));
        out
    }
}

/// Input to the scheduling engines.
#[derive(Clone, Debug)]
pub struct ScheduleRequest {
    pub netlist: XmgNetlist,
    pub temporary_inputs: BTreeSet<NodeId>,
    pub mf_bound: Option<usize>,
}

impl ScheduleRequest {
    pub fn new(netlist: XmgNetlist) -> ScheduleRequest {
        ScheduleRequest { netlist, temporary_inputs: BTreeSet::new(), mf_bound: None }
    }

    pub fn with_bound(mut self, bound: Option<usize>) -> ScheduleRequest {
        self.mf_bound = bound;
        self
    }

    pub fn with_temporaries(mut self, temporaries: BTreeSet<NodeId>) -> ScheduleRequest {
        self.temporary_inputs = temporaries;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScheduleOutcome {
    Scheduled(ScheduledNetlist),
    /// No schedule within the requested bound was found.
    BoundExceeded,
}

impl ScheduleOutcome {
    pub fn scheduled(self) -> Option<ScheduledNetlist> {
        match self {
            ScheduleOutcome::Scheduled(s) => Some(s),
            ScheduleOutcome::BoundExceeded => None,
        }
    }
}

/// Exact engine up to `exact_threshold` operations, heuristic above.
pub fn schedule(req: &ScheduleRequest, exact_threshold: usize) -> Result<ScheduleOutcome, ScheduleError> {
    if req.netlist.size() <= exact_threshold.min(64) {
        schedule_exact(req, exact_threshold.min(64))
    } else {
        schedule_heuristic(req)
    }
}

#[cfg(test)]
mod tests;
