//! Seeded random netlists for tests, benchmarks and fuzzing.

use rand::Rng;

use crate::xmg::{Edge, GateKind, NodeId, XmgBuilder, XmgNetlist};

/// Shape of a random netlist.
#[derive(Clone, Copy, Debug)]
pub struct RandomShape {
    pub num_pis: usize,
    pub num_nodes: usize,
    /// Probability that a fan-in is the constant.
    pub const_prob: f64,
    /// Fan-ins are drawn from the most recent `locality` signals.
    pub locality: usize,
}

impl RandomShape {
    pub fn new(num_pis: usize, num_nodes: usize) -> RandomShape {
        RandomShape { num_pis, num_nodes, const_prob: 0.2, locality: 8 }
    }
}

/// Random XMG without dangling logic. Every sink becomes a PO; a few extra
/// internal nodes are exposed as POs too. Gates are created raw (no hashing
/// or folding), so the result may contain redundancy on purpose.
pub fn random_xmg<R: Rng>(rng: &mut R, shape: RandomShape) -> XmgNetlist {
    assert!(shape.num_pis > 0);
    let mut b = XmgBuilder::raw("random", shape.num_pis);
    let mut signals: Vec<Edge> = (0..shape.num_pis).map(|k| b.pi(k)).collect();
    for _ in 0..shape.num_nodes {
        let kind = if rng.gen_bool(0.5) { GateKind::Maj } else { GateKind::Xor };
        let mut fanins = [Edge::ZERO; 3];
        for slot in fanins.iter_mut() {
            let e = if rng.gen_bool(shape.const_prob) {
                Edge::ZERO
            } else {
                let lo = signals.len().saturating_sub(shape.locality.max(1));
                signals[rng.gen_range(lo..signals.len())]
            };
            *slot = e.complement_if(rng.gen_bool(0.3));
        }
        let e = b.gate(kind, fanins);
        signals.push(e);
    }
    let num_ids = 1 + shape.num_pis + shape.num_nodes;
    let mut used = vec![false; num_ids];
    for k in 0..shape.num_nodes {
        let id = NodeId((shape.num_pis + 1 + k) as u32);
        for f in b.node(id).unwrap().fanins {
            used[f.node().index()] = true;
        }
    }
    for k in 0..shape.num_nodes {
        let id = NodeId((shape.num_pis + 1 + k) as u32);
        if !used[id.index()] || rng.gen_bool(0.1) {
            b.add_po(Edge::new(id, rng.gen_bool(0.3)));
        }
    }
    if shape.num_nodes == 0 {
        b.add_po(b.pi(0));
    }
    b.build_unswept()
}
