//! Oracles shared by unit tests. Deliberately naive: one pattern at a time,
//! straight from the gate definitions.

use crate::xmg::{GateKind, XmgNetlist};

pub fn naive_eval(net: &XmgNetlist, pis: &[bool]) -> Vec<bool> {
    let mut val = vec![false; net.num_ids()];
    for (k, &v) in pis.iter().enumerate() {
        val[k + 1] = v;
    }
    for id in net.op_ids() {
        let node = net.node(id).unwrap();
        let x: Vec<bool> = node.fanins.iter().map(|e| val[e.node().index()] != e.is_complemented()).collect();
        val[id.index()] = match node.kind {
            GateKind::Maj => (x[0] as u8 + x[1] as u8 + x[2] as u8) >= 2,
            GateKind::Xor => (x[0] as u8 + x[1] as u8 + x[2] as u8) % 2 == 1,
        };
    }
    net.pos().iter().map(|e| val[e.node().index()] != e.is_complemented()).collect()
}

pub fn bits(value: usize, n: usize) -> Vec<bool> {
    (0..n).map(|k| (value >> k) & 1 == 1).collect()
}

/// Exhaustive PO truth tables, one row per input assignment.
pub fn truth_table(net: &XmgNetlist) -> Vec<Vec<bool>> {
    assert!(net.num_pis() <= 16);
    (0..1usize << net.num_pis()).map(|v| naive_eval(net, &bits(v, net.num_pis()))).collect()
}

/// Netlist shaped like the small compiler example: nine PIs, five
/// operations, one PO. Ops in id order are N1..N5.
pub fn five_op_example() -> XmgNetlist {
    use crate::xmg::{Edge, XmgBuilder};
    let mut b = XmgBuilder::raw("five_op_example", 9);
    let x: Vec<Edge> = (0..9).map(|k| b.pi(k)).collect();
    let n1 = b.maj(x[0], x[1], Edge::ZERO);
    let n2 = b.xor(x[2], x[3], Edge::ZERO);
    let n3 = b.maj(n2, x[4], x[6]);
    let n4 = b.maj(n1, !n2, x[7]);
    let n5 = b.xor(n3, n4, x[8]);
    b.add_po(n5);
    b.build()
}

/// x1..x3, N1 = MAJ(x1,x2,0), N2 = XOR(x1,x2,x3), N3 = MAJ(N1,!N2,x3).
pub fn three_op_example() -> XmgNetlist {
    use crate::xmg::{Edge, XmgBuilder};
    let mut b = XmgBuilder::raw("three_op_example", 3);
    let (x1, x2, x3) = (b.pi(0), b.pi(1), b.pi(2));
    let n1 = b.maj(x1, x2, Edge::ZERO);
    let n2 = b.xor(x1, x2, x3);
    let n3 = b.maj(n1, !n2, x3);
    b.add_po(n3);
    b.build()
}

/// Footprint of an order straight from the definition: after each cycle,
/// count results already computed that are POs or still have an unexecuted
/// consumer (the result computed in that cycle always counts).
pub fn naive_mf(net: &XmgNetlist, order: &[crate::NodeId], temps: &std::collections::BTreeSet<crate::NodeId>) -> (usize, Vec<usize>) {
    use crate::NodeId;
    let at = |id: NodeId| order.iter().position(|&o| o == id);
    let consumers = |v: NodeId| -> Vec<usize> {
        order.iter().enumerate().filter(|(_, &o)| net.node(o).unwrap().fanins.iter().any(|f| f.node() == v)).map(|(i, _)| i).collect()
    };
    let is_po = |v: NodeId| net.pos().iter().any(|p| p.node() == v);
    let mut usage = Vec::new();
    let initial = temps.iter().filter(|&&t| !consumers(t).is_empty()).count();
    for t in 0..order.len() {
        let mut live = 0;
        for &tmp in temps {
            if consumers(tmp).iter().any(|&c| c > t) {
                live += 1;
            }
        }
        for &o in &order[..=t] {
            if at(o) == Some(t) || is_po(o) || consumers(o).iter().any(|&c| c > t) {
                live += 1;
            }
        }
        usage.push(live);
    }
    (usage.iter().copied().max().unwrap_or(0).max(initial), usage)
}

/// Every topological order of the operations.
pub fn all_orders(net: &XmgNetlist) -> Vec<Vec<crate::NodeId>> {
    use crate::NodeId;
    fn rec(net: &XmgNetlist, done: &mut Vec<NodeId>, out: &mut Vec<Vec<NodeId>>) {
        if done.len() == net.size() {
            out.push(done.clone());
            return;
        }
        let ready: Vec<NodeId> = net
            .op_ids()
            .filter(|id| !done.contains(id))
            .filter(|&id| net.node(id).unwrap().fanins.iter().all(|f| !net.is_op(f.node()) || done.contains(&f.node())))
            .collect();
        for id in ready {
            done.push(id);
            rec(net, done, out);
            done.pop();
        }
    }
    let mut out = Vec::new();
    rec(net, &mut Vec::new(), &mut out);
    out
}

/// Minimum footprint over all topological orders, by dynamic programming
/// over executed sets: best[S] = min over the last operation `o` of
/// max(best[S - o], usage of the cycle running `o`). Usage is evaluated from
/// the definition on each set.
pub fn brute_force_min_mf(net: &XmgNetlist, temps: &std::collections::BTreeSet<crate::NodeId>) -> usize {
    use crate::NodeId;
    let ops: Vec<NodeId> = net.op_ids().collect();
    let n = ops.len();
    assert!(n <= 16);
    let idx = |id: NodeId| ops.iter().position(|&o| o == id);
    let consumers: Vec<u32> = (0..net.num_ids())
        .map(|v| {
            ops.iter()
                .enumerate()
                .filter(|(_, &o)| net.node(o).unwrap().fanins.iter().any(|f| f.node().index() == v))
                .fold(0u32, |m, (i, _)| m | 1 << i)
        })
        .collect();
    let is_po = |v: NodeId| net.pos().iter().any(|p| p.node() == v);
    let usage = |set: u32, just: usize| -> usize {
        let mut live = temps.iter().filter(|t| consumers[t.index()] & !set != 0).count();
        for (i, &o) in ops.iter().enumerate() {
            if set >> i & 1 == 1 && (i == just || is_po(o) || consumers[o.index()] & !set != 0) {
                live += 1;
            }
        }
        live
    };
    let preds: Vec<u32> =
        ops.iter().map(|&o| net.node(o).unwrap().fanins.iter().filter_map(|f| idx(f.node())).fold(0u32, |m, i| m | 1 << i)).collect();
    let initial = temps.iter().filter(|t| consumers[t.index()] != 0).count();
    let mut best = vec![usize::MAX; 1 << n];
    best[0] = initial;
    for set in 1u32..(1 << n) {
        for i in 0..n {
            let prev = set & !(1 << i);
            if set >> i & 1 == 1 && best[prev as usize] != usize::MAX && preds[i] & !prev == 0 {
                let v = best[prev as usize].max(usage(set, i));
                best[set as usize] = best[set as usize].min(v);
            }
        }
    }
    best[(1 << n) - 1]
}
