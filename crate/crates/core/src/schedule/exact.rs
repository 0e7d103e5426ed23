use std::collections::HashSet;

use super::heuristic::greedy_order;
use super::{liveness_mf, ScheduleError, ScheduleOutcome, ScheduleRequest, ScheduledNetlist};
use crate::xmg::NodeId;

pub const DEFAULT_NODE_LIMIT: usize = 24;

/// Per-operation masks over operation positions (bit `i` = id
/// `first_op + i`).
struct Problem {
    n: usize,
    /// Operation fan-ins.
    fanins: Vec<u64>,
    /// Consumers of each operation.
    consumers: Vec<u64>,
    po: Vec<bool>,
    /// Consumer masks of the temporaries that have consumers.
    temp_consumers: Vec<u64>,
}

impl Problem {
    fn full(&self) -> u64 {
        if self.n == 64 {
            !0
        } else {
            (1u64 << self.n) - 1
        }
    }

    /// Rows occupied once exactly the operations in `done` have run.
    fn live(&self, done: u64) -> usize {
        let mut count = self.temp_consumers.iter().filter(|&&c| c & !done != 0).count();
        let mut rest = done;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if self.po[i] || self.consumers[i] & !done != 0 {
                count += 1;
            }
        }
        count
    }

    /// Usage reported for the cycle that runs `i` after `done`.
    fn usage_running(&self, done: u64, i: usize) -> usize {
        let after = done | 1 << i;
        let dangling = !self.po[i] && self.consumers[i] == 0;
        self.live(after) + dangling as usize
    }

    fn ready(&self, done: u64) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&i| done >> i & 1 == 0 && self.fanins[i] & !done == 0)
    }
}

struct Search<'a> {
    p: &'a Problem,
    bound: usize,
    failed: HashSet<u64>,
    path: Vec<usize>,
}

impl Search<'_> {
    fn dfs(&mut self, done: u64) -> bool {
        if done == self.p.full() {
            return true;
        }
        if self.failed.contains(&done) {
            return false;
        }
        let mut kids: Vec<(usize, usize)> =
            self.p.ready(done).map(|i| (self.p.usage_running(done, i), i)).filter(|&(u, _)| u <= self.bound).collect();
        kids.sort();
        for (_, i) in kids {
            self.path.push(i);
            if self.dfs(done | 1 << i) {
                return true;
            }
            self.path.pop();
        }
        self.failed.insert(done);
        false
    }
}

/// Minimum-footprint order by iterative deepening over the footprint bound,
/// with a memo of failed executed-sets per bound. `BoundExceeded` is exact:
/// it is returned only when no order meets `mf_bound`.
pub fn schedule_exact(req: &ScheduleRequest, node_limit: usize) -> Result<ScheduleOutcome, ScheduleError> {
    let net = &req.netlist;
    let n = net.size();
    let limit = node_limit.min(64);
    if n > limit {
        return Err(ScheduleError::TooLarge { size: n, limit });
    }
    let temps = &req.temporary_inputs;
    for &t in temps {
        if !net.is_pi(t) {
            return Err(ScheduleError::NotATemporary(t));
        }
    }
    let first = net.first_op().index();
    let pos = |id: NodeId| id.index() - first;
    let fanouts = net.fanout_lists();
    let po_flags = net.po_flags();
    let temp_list: Vec<NodeId> = temps.iter().copied().filter(|t| !fanouts[t.index()].is_empty()).collect();
    let mut p = Problem { n, fanins: vec![0; n], consumers: vec![0; n], po: vec![false; n], temp_consumers: vec![0; temp_list.len()] };
    for id in net.op_ids() {
        let i = pos(id);
        p.po[i] = po_flags[id.index()];
        for f in net.node(id).unwrap().fanins {
            let src = f.node();
            if net.is_op(src) {
                p.fanins[i] |= 1 << pos(src);
                p.consumers[pos(src)] |= 1 << i;
            } else if let Some(t) = temp_list.iter().position(|&t| t == src) {
                p.temp_consumers[t] |= 1 << i;
            }
        }
    }

    let to_ids = |path: &[usize]| -> Vec<NodeId> { path.iter().map(|&i| NodeId((first + i) as u32)).collect() };
    let mut incumbent = greedy_order(net, temps, None).expect("unbounded greedy always completes");
    let mut upper = liveness_mf(net, &incumbent, temps)?.mf;
    let identity: Vec<NodeId> = net.op_ids().collect();
    let id_mf = liveness_mf(net, &identity, temps)?.mf;
    if id_mf < upper {
        (incumbent, upper) = (identity, id_mf);
    }
    let lower = p.live(0).max(p.live(p.full())).max((n > 0) as usize);
    let cap = req.mf_bound.map_or(upper, |b| b.min(upper));
    for bound in lower..=cap {
        if bound == upper {
            break;
        }
        let mut s = Search { p: &p, bound, failed: HashSet::new(), path: Vec::with_capacity(n) };
        if p.live(0) <= bound && s.dfs(0) {
            let order = to_ids(&s.path);
            return Ok(ScheduleOutcome::Scheduled(ScheduledNetlist::from_order(net, &order, temps)?));
        }
    }
    if req.mf_bound.is_some_and(|b| b < upper) {
        return Ok(ScheduleOutcome::BoundExceeded);
    }
    Ok(ScheduleOutcome::Scheduled(ScheduledNetlist::from_order(net, &incumbent, temps)?))
}
