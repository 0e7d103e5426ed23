//! Window resubstitution: re-express a node with divisors from its bounded
//! fan-in window, either directly (0 added gates) or through one new gate.
//!
//! Candidates are filtered by simulation and then proven by the validator
//! before any edit. Edits keep every surviving node's function, so the
//! simulation of the input netlist stays valid throughout the pass.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::sim::{
    check_candidate_equal, check_candidate_op, default_patterns, simulate, Candidate, SimMatch, SimVector, Simulation, Validation,
    Validator,
};
use crate::xmg::{Edge, Editor, GateKind, NodeId, XmgNetlist, XmgNode};

/// Window size cap in nodes, root excluded.
pub(crate) const WINDOW_NODES: usize = 12;
/// Divisors considered when adding one gate, the constant included.
const GATE_DIVISORS: usize = 16;
/// Chance of trying a one-gate replacement that saves nothing.
const ZERO_GAIN_PROB: f64 = 0.1;
/// Counterexamples added per root before giving up on it.
const MAX_REFINEMENTS: usize = 8;

pub(crate) fn window_resub(net: &XmgNetlist, one_gate: bool, seed: u64) -> XmgNetlist {
    if net.size() == 0 {
        return net.clone();
    }
    let mut sim = simulate(net, &default_patterns(net.num_pis(), seed)).expect("pattern count matches");
    let validator = Validator::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ed = Editor::new(net);
    let roots: Vec<NodeId> = net.op_ids().collect();
    for root in roots {
        if ed.node(root).is_none() {
            continue;
        }
        let mffc: HashSet<NodeId> = ed.mffc_with_kept(root, &[]).into_iter().collect();
        let divisors = window_divisors(&ed, root, &mffc);
        let try_gate = one_gate && (mffc.len() >= 2 || rng.gen_bool(ZERO_GAIN_PROB));
        let current = ed.node(root).unwrap().clone();
        let near: Vec<NodeId> = divisors.iter().rev().take(GATE_DIVISORS).rev().copied().collect();

        // A refuted candidate's counterexample joins the patterns, which
        // rules out the same false match and usually its neighbours.
        let mut refinements = 0;
        let found = loop {
            let cand = direct_match(&sim, root, &divisors).map(Candidate::Signal).or_else(|| {
                let g = if try_gate { find_gate(&sim, sim.get(root), &near, &current) } else { None };
                g.map(|g| Candidate::Gate(g.kind, g.fanins))
            });
            let Some(cand) = cand else { break None };
            match validator.check_with_counterexample(net, Edge::plain(root), &cand) {
                (Validation::Equivalent, _) => break Some(cand),
                (_, Some(cex)) if refinements < MAX_REFINEMENTS => {
                    sim.add_pattern(net, &cex);
                    refinements += 1;
                }
                _ => break None,
            }
        };
        match found {
            Some(Candidate::Signal(e)) => {
                ed.substitute(root, e);
            }
            Some(Candidate::Gate(kind, fanins)) => {
                ed.replace_gate(root, XmgNode { kind, fanins });
            }
            None => {}
        }
    }
    ed.finish()
}

/// Highest divisor equal to `root` or its complement on the simulation.
fn direct_match(sim: &Simulation, root: NodeId, divisors: &[NodeId]) -> Option<Edge> {
    let target = sim.get(root);
    divisors.iter().rev().find_map(|&d| match check_candidate_equal(target, sim.get(d)) {
        SimMatch::Equal => Some(Edge::plain(d)),
        SimMatch::Complement => Some(!Edge::plain(d)),
        SimMatch::Neither => None,
    })
}

/// Constant, window leaves and window nodes outside the MFFC of `root`,
/// ascending by id.
fn window_divisors(ed: &Editor, root: NodeId, mffc: &HashSet<NodeId>) -> Vec<NodeId> {
    let mut window = vec![root];
    let mut seen: HashSet<NodeId> = HashSet::from([root]);
    let mut leaves = Vec::new();
    let mut i = 0;
    while i < window.len() {
        let id = window[i];
        i += 1;
        for f in ed.node(id).unwrap().fanins {
            let n = f.node();
            if n == NodeId::CONST0 || !seen.insert(n) {
                continue;
            }
            if ed.is_op(n) && window.len() <= WINDOW_NODES {
                window.push(n);
            } else {
                leaves.push(n);
            }
        }
    }
    let mut out: Vec<NodeId> =
        std::iter::once(NodeId::CONST0).chain(leaves).chain(window.into_iter().skip(1)).filter(|n| !mffc.contains(n)).collect();
    out.sort();
    out
}

/// First gate over `divs` matching `target` on the simulation, other than
/// the gate the root already has.
fn find_gate(sim: &Simulation, target: &SimVector, divs: &[NodeId], current: &XmgNode) -> Option<XmgNode> {
    let n = divs.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let hit = match_triple(sim, target, [divs[i], divs[j], divs[k]], |g| g != current);
                if hit.is_some() {
                    return hit;
                }
            }
        }
    }
    None
}

/// First MAJ or XOR over the (possibly complemented) triple that matches
/// `target` on the simulation and that `accept` confirms. XOR is tried
/// first. Output polarity needs no separate pass: MAJ is self-dual and an
/// XOR's parity moves onto a fan-in.
pub(crate) fn match_triple(
    sim: &Simulation,
    target: &SimVector,
    ids: [NodeId; 3],
    mut accept: impl FnMut(&XmgNode) -> bool,
) -> Option<XmgNode> {
    let [a, b, c] = ids.map(|d| sim.get(d));
    if let Some(flip) = xor_match(target, a, b, c) {
        let g = XmgNode { kind: GateKind::Xor, fanins: [Edge::new(ids[0], flip), Edge::plain(ids[1]), Edge::plain(ids[2])] };
        if accept(&g) {
            return Some(g);
        }
    }
    for combo in 0u8..8 {
        let cpl = [combo & 1 != 0, combo & 2 != 0, combo & 4 != 0];
        if check_candidate_op(target, GateKind::Maj, [(a, cpl[0]), (b, cpl[1]), (c, cpl[2])]) {
            let g = XmgNode { kind: GateKind::Maj, fanins: [0, 1, 2].map(|t| Edge::new(ids[t], cpl[t])) };
            if accept(&g) {
                return Some(g);
            }
        }
    }
    None
}

/// Whether `a ^ b ^ c` equals `target` (`Some(false)`) or its complement
/// (`Some(true)`) on every pattern.
fn xor_match(target: &SimVector, a: &SimVector, b: &SimVector, c: &SimVector) -> Option<bool> {
    let (mut equal, mut compl) = (true, true);
    for w in 0..target.words().len() {
        let m = target.tail_mask(w);
        let x = (a.words()[w] ^ b.words()[w] ^ c.words()[w] ^ target.words()[w]) & m;
        equal &= x == 0;
        compl &= x == m;
        if !equal && !compl {
            return None;
        }
    }
    Some(!equal)
}
