use std::collections::BTreeSet;

use super::{liveness_mf, ScheduleError, ScheduleOutcome, ScheduleRequest, ScheduledNetlist};
use crate::xmg::{NodeId, XmgNetlist};

/// Greedy order: repeatedly run the ready operation that leaves the fewest
/// rows occupied; ties go to the one freeing the most rows, then to the
/// smallest id. The input id order is also evaluated and the better of the
/// two is returned (greedy wins ties).
///
/// With a bound, `BoundExceeded` means neither candidate order met it; it is
/// not a proof that no order does.
pub fn schedule_heuristic(req: &ScheduleRequest) -> Result<ScheduleOutcome, ScheduleError> {
    let net = &req.netlist;
    let temps = &req.temporary_inputs;
    let greedy = greedy_order(net, temps, req.mf_bound);
    let identity: Vec<NodeId> = net.op_ids().collect();
    let id_mf = liveness_mf(net, &identity, temps)?.mf;
    let best = match greedy {
        Some(order) => {
            let g_mf = liveness_mf(net, &order, temps)?.mf;
            if g_mf <= id_mf {
                order
            } else {
                identity
            }
        }
        None => identity,
    };
    let sched = ScheduledNetlist::from_order(net, &best, temps)?;
    if req.mf_bound.is_some_and(|b| sched.mf() > b) {
        return Ok(ScheduleOutcome::BoundExceeded);
    }
    Ok(ScheduleOutcome::Scheduled(sched))
}

/// Greedy order, or `None` if the running footprint exceeded `bound`.
pub(crate) fn greedy_order(net: &XmgNetlist, temps: &BTreeSet<NodeId>, bound: Option<usize>) -> Option<Vec<NodeId>> {
    let n = net.num_ids();
    let fanouts = net.fanout_lists();
    let po = net.po_flags();
    // Remaining unexecuted consumers per value.
    let mut remaining: Vec<usize> = fanouts.iter().map(|f| f.len()).collect();
    let mut missing = vec![0usize; n];
    let distinct = |id: NodeId| {
        let mut f: Vec<NodeId> = net.node(id).unwrap().fanins.iter().map(|e| e.node()).collect();
        f.sort();
        f.dedup();
        f
    };
    let fanin_sets: Vec<Vec<NodeId>> =
        (0..n).map(|i| if net.is_op(NodeId(i as u32)) { distinct(NodeId(i as u32)) } else { Vec::new() }).collect();
    let mut ready = BTreeSet::new();
    for id in net.op_ids() {
        missing[id.index()] = fanin_sets[id.index()].iter().filter(|f| net.is_op(**f)).count();
        if missing[id.index()] == 0 {
            ready.insert(id);
        }
    }
    let counted = |id: NodeId| (net.is_op(id) || temps.contains(&id)) && !po[id.index()];
    let mut live = temps.iter().filter(|t| !fanouts[t.index()].is_empty()).count();
    if bound.is_some_and(|b| live > b) {
        return None;
    }
    let mut order = Vec::with_capacity(net.size());
    while let Some(&first) = ready.iter().next() {
        let mut best = first;
        let mut best_key = (usize::MAX, 0usize);
        for &id in &ready {
            let kills = fanin_sets[id.index()].iter().filter(|&&f| counted(f) && remaining[f.index()] == 1).count();
            let after = live + 1 - kills;
            if (after, usize::MAX - kills) < best_key {
                best_key = (after, usize::MAX - kills);
                best = id;
            }
        }
        ready.remove(&best);
        order.push(best);
        live = best_key.0;
        if bound.is_some_and(|b| live > b) {
            return None;
        }
        if fanouts[best.index()].is_empty() && !po[best.index()] {
            live -= 1;
        }
        for &f in &fanin_sets[best.index()] {
            remaining[f.index()] -= 1;
        }
        for &c in &fanouts[best.index()] {
            missing[c.index()] -= 1;
            if missing[c.index()] == 0 {
                ready.insert(c);
            }
        }
    }
    Some(order)
}
