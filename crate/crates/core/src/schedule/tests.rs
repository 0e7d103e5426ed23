use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::edp::{place, CostModel};
use crate::io::{emit_instructions, InstructionSequence, Operand};
use crate::random::{random_xmg, RandomShape};
use crate::test_util::{all_orders, bits, brute_force_min_mf, five_op_example, naive_eval, naive_mf, three_op_example};
use crate::xmg::{Edge, XmgBuilder};

fn ids(net: &XmgNetlist, cycles: &[usize]) -> Vec<NodeId> {
    cycles.iter().map(|&t| NodeId((net.num_pis() + t) as u32)).collect()
}

fn random_net(seed: u64, pis: usize, nodes: usize) -> XmgNetlist {
    random_xmg(&mut ChaCha8Rng::seed_from_u64(seed), RandomShape::new(pis, nodes))
}

fn none() -> BTreeSet<NodeId> {
    BTreeSet::new()
}

#[test]
fn five_op_orders() {
    let net = five_op_example();
    let good = liveness_mf(&net, &ids(&net, &[1, 2, 4, 3, 5]), &none()).unwrap();
    assert_eq!(good.mf, 2);
    assert_eq!(good.trace.usage, vec![1, 2, 2, 2, 1]);
    let bad = liveness_mf(&net, &ids(&net, &[1, 2, 3, 4, 5]), &none()).unwrap();
    assert_eq!(bad.mf, 3);
    assert_eq!(brute_force_min_mf(&net, &none()), 2);
}

#[test]
fn five_op_third_instruction() {
    let net = five_op_example();
    let s = ScheduledNetlist::from_order(&net, &ids(&net, &[1, 2, 4, 3, 5]), &none()).unwrap();
    let model = CostModel::default();
    let seq = emit_instructions(&s, &place(&s, &model).unwrap());
    assert_eq!(seq.instructions[2].to_string(), "3: R10 <- MAJ(R10, !R11, R8)");
    assert_eq!(seq.copy_count(), 0);
}

#[test]
fn three_op_trace() {
    let net = three_op_example();
    let l = liveness_mf(&net, &ids(&net, &[1, 2, 3]), &none()).unwrap();
    assert_eq!(l.trace.usage, vec![1, 2, 1]);
    assert_eq!(l.mf, 2);
    let other = liveness_mf(&net, &ids(&net, &[2, 1, 3]), &none()).unwrap();
    assert_eq!(other.mf, 2);
    let exact = schedule_exact(&ScheduleRequest::new(net), DEFAULT_NODE_LIMIT).unwrap().scheduled().unwrap();
    assert_eq!(exact.mf(), 2);
}

#[test]
fn liveness_rejects_bad_orders() {
    let net = three_op_example();
    assert_eq!(
        liveness_mf(&net, &ids(&net, &[3, 1, 2]), &none()).unwrap_err(),
        ScheduleError::NotTopological { node: NodeId(6), fanin: NodeId(4) }
    );
    assert_eq!(liveness_mf(&net, &ids(&net, &[1, 2]), &none()).unwrap_err(), ScheduleError::NotAPermutation);
    assert_eq!(liveness_mf(&net, &ids(&net, &[1, 1, 3]), &none()).unwrap_err(), ScheduleError::NotAPermutation);
    let bad_tmp = BTreeSet::from([NodeId(5)]);
    assert_eq!(liveness_mf(&net, &ids(&net, &[1, 2, 3]), &bad_tmp).unwrap_err(), ScheduleError::NotATemporary(NodeId(5)));
}

#[test]
fn chain_needs_one_row() {
    let mut b = XmgBuilder::raw("chain", 3);
    let mut e = b.pi(0);
    for k in 0..5 {
        let other = b.pi(1 + k % 2);
        e = b.maj(e, other, Edge::ZERO);
    }
    b.add_po(e);
    let s = schedule_heuristic(&ScheduleRequest::new(b.build())).unwrap().scheduled().unwrap();
    assert_eq!(s.mf(), 1);
}

#[test]
fn binary_tree_of_majorities() {
    let mut b = XmgBuilder::raw("tree", 8);
    let leaves: Vec<Edge> = (0..4)
        .map(|k| {
            let (x, y) = (b.pi(2 * k), b.pi(2 * k + 1));
            b.maj(x, y, Edge::ZERO)
        })
        .collect();
    let m1 = b.maj(leaves[0], leaves[1], Edge::ZERO);
    let m2 = b.maj(leaves[2], leaves[3], Edge::ZERO);
    let root = b.maj(m1, m2, Edge::ZERO);
    b.add_po(root);
    let net = b.build();
    assert_eq!(brute_force_min_mf(&net, &none()), 3);
    let s = schedule_heuristic(&ScheduleRequest::new(net)).unwrap().scheduled().unwrap();
    assert_eq!(s.mf(), 3);
}

#[test]
fn dp_oracle_agrees_with_order_enumeration() {
    for seed in 0..30 {
        let net = random_net(seed, 4, 6);
        let enumerated = all_orders(&net).iter().map(|o| naive_mf(&net, o, &none()).0).min().unwrap();
        assert_eq!(brute_force_min_mf(&net, &none()), enumerated, "seed {seed}");
    }
}

#[test]
fn exact_is_optimal_and_heuristic_is_not_better() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for seed in 0..150 {
        let n = rng.gen_range(1..=10);
        let net = random_net(seed, rng.gen_range(2..6), n);
        let oracle = brute_force_min_mf(&net, &none());
        let exact = schedule_exact(&ScheduleRequest::new(net.clone()), DEFAULT_NODE_LIMIT).unwrap().scheduled().unwrap();
        let heur = schedule_heuristic(&ScheduleRequest::new(net)).unwrap().scheduled().unwrap();
        assert_eq!(exact.mf(), oracle, "seed {seed}");
        assert!(heur.mf() >= exact.mf());
    }
}

#[test]
fn exact_with_temporaries_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for seed in 0..100 {
        let net = random_net(seed, 5, rng.gen_range(2..=9));
        let temps: BTreeSet<NodeId> = (1..=5).filter(|_| rng.gen_bool(0.5)).map(NodeId).collect();
        let req = ScheduleRequest::new(net.clone()).with_temporaries(temps.clone());
        let exact = schedule_exact(&req, DEFAULT_NODE_LIMIT).unwrap().scheduled().unwrap();
        assert_eq!(exact.mf(), brute_force_min_mf(&net, &temps), "seed {seed}");
        assert!(schedule_heuristic(&req).unwrap().scheduled().unwrap().mf() >= exact.mf());
    }
}

#[test]
fn bound_exceeded_iff_no_order_fits() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for seed in 0..150 {
        let net = random_net(seed, 4, rng.gen_range(1..=10));
        let oracle = brute_force_min_mf(&net, &none());
        let bound = rng.gen_range(0..=oracle + 1);
        let req = ScheduleRequest::new(net).with_bound(Some(bound));
        match schedule(&req, DEFAULT_EXACT_THRESHOLD).unwrap() {
            ScheduleOutcome::BoundExceeded => assert!(oracle > bound),
            ScheduleOutcome::Scheduled(s) => {
                assert!(oracle <= bound);
                assert!(s.mf() <= bound);
            }
        }
    }
}

#[test]
fn exact_rejects_oversized() {
    let net = random_net(1, 4, 30);
    let err = schedule_exact(&ScheduleRequest::new(net.clone()), 24).unwrap_err();
    assert_eq!(err, ScheduleError::TooLarge { size: net.size(), limit: 24 });
}

#[test]
fn peak_window_examples() {
    let w = peak_window(&MemoryUsageTrace::new(vec![1, 2, 3, 2, 1]), 0.6).unwrap();
    assert_eq!((w.m, w.p, w.n, w.mf), (2, 3, 4, 3));
    let flat = peak_window(&MemoryUsageTrace::new(vec![2, 2, 2]), 0.6).unwrap();
    assert_eq!((flat.m, flat.p, flat.n), (1, 1, 3));
    let t = MemoryUsageTrace::new(vec![1, 3, 2, 3, 1]);
    let tight = peak_window(&t, 0.999).unwrap();
    assert_eq!((tight.m, tight.p, tight.n), (2, 2, 4));
    let wide = peak_window(&t, 1e-9).unwrap();
    assert_eq!((wide.m, wide.n), (1, 5));
    assert!(peak_window(&MemoryUsageTrace::default(), 0.6).is_none());
}

#[test]
fn first_peak_and_live_set() {
    let net = five_op_example();
    let s = ScheduledNetlist::from_order(&net, &ids(&net, &[1, 2, 3, 4, 5]), &none()).unwrap();
    assert_eq!(s.trace().first_peak(), Some(3));
    let live = s.live_after(3);
    assert_eq!(live.len(), s.mf());
    assert_eq!(live, ids(s.netlist(), &[1, 2, 3]));
}

fn po_words(net: &XmgNetlist, pis: &[u64]) -> Vec<u64> {
    // Reference: scalar evaluation, one pattern (bit) at a time.
    let mut out = vec![0u64; net.pos().len()];
    for bit in 0..64 {
        let input: Vec<bool> = pis.iter().map(|w| (w >> bit) & 1 == 1).collect();
        for (i, v) in naive_eval(net, &input).into_iter().enumerate() {
            out[i] |= (v as u64) << bit;
        }
    }
    out
}

#[test]
fn interpret_e1_all_assignments() {
    let net = three_op_example();
    let s = ScheduledNetlist::in_order(net.clone());
    let seq = emit_instructions(&s, &place(&s, &CostModel::default()).unwrap());
    for v in 0..8 {
        let x = bits(v, 3);
        let words: Vec<u64> = x.iter().map(|&b| if b { !0 } else { 0 }).collect();
        let got = interpret(&seq, &words).unwrap();
        assert_eq!(got[0] & 1 == 1, naive_eval(&net, &x)[0]);
    }
}

#[test]
fn interpret_wire_and_errors() {
    let seq = InstructionSequence {
        rows_per_array: 4,
        arrays: 1,
        pi_rows: vec![1],
        pos: vec![Operand::Row { row: 1, complemented: true }],
        instructions: vec![],
    };
    assert_eq!(interpret(&seq, &[0b1010]).unwrap(), vec![!0b1010u64]);
    let bad = crate::io::parse_instructions(".rows_per_array 4\n.arrays 1\n.pis R1\n.pos R2\n1: R2 <- MAJ(R1, R3, 0)\n").unwrap();
    assert_eq!(interpret(&bad, &[1]).unwrap_err(), InterpretError::ReadBeforeWrite { clock: 1, row: 3 });
    let cross = crate::io::parse_instructions(".rows_per_array 4\n.arrays 2\n.pis R1 R5\n.pos R2\n1: R2 <- MAJ(R1, R5, 0)\n").unwrap();
    assert_eq!(interpret(&cross, &[1, 1]).unwrap_err(), InterpretError::CrossArray { clock: 1, row: 5 });
    let out = crate::io::parse_instructions(".rows_per_array 4\n.arrays 1\n.pis R1\n.pos R9\n").unwrap();
    assert_eq!(interpret(&out, &[1]).unwrap_err(), InterpretError::UnwrittenPo { row: 9 });
}

fn check_trace_endpoints(s: &ScheduledNetlist) {
    let u = &s.trace().usage;
    if u.is_empty() {
        return;
    }
    assert_eq!(u[0], 1);
    assert_eq!(*u.last().unwrap(), s.netlist().po_driver_ops().len());
}

proptest! {
    #[test]
    fn liveness_matches_definition(seed in 0u64..10_000) {
        let net = random_net(seed, 5, 14);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Random topological order: repeatedly pick a random ready node.
        let mut done: Vec<NodeId> = Vec::new();
        while done.len() < net.size() {
            let ready: Vec<NodeId> = net.op_ids()
                .filter(|id| !done.contains(id))
                .filter(|&id| net.node(id).unwrap().fanins.iter().all(|f| !net.is_op(f.node()) || done.contains(&f.node())))
                .collect();
            done.push(ready[rng.gen_range(0..ready.len())]);
        }
        let l = liveness_mf(&net, &done, &none()).unwrap();
        let (mf, usage) = naive_mf(&net, &done, &none());
        prop_assert_eq!(l.mf, mf);
        prop_assert_eq!(&l.trace.usage, &usage);
        let rows: BTreeSet<u32> = l.slots.iter().copied().collect();
        prop_assert_eq!(rows.len(), l.mf);
        let s = ScheduledNetlist::from_order(&net, &done, &none()).unwrap();
        check_trace_endpoints(&s);
    }

    #[test]
    fn emitted_instructions_replay(seed in 0u64..10_000, exact in any::<bool>()) {
        let net = random_net(seed, 8, if exact { 12 } else { 40 });
        let req = ScheduleRequest::new(net.clone());
        let s = if exact {
            schedule_exact(&req, DEFAULT_NODE_LIMIT).unwrap()
        } else {
            schedule_heuristic(&req).unwrap()
        }.scheduled().unwrap();
        check_trace_endpoints(&s);
        let seq = emit_instructions(&s, &place(&s, &CostModel::default()).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pis: Vec<u64> = (0..8).map(|_| rng.gen()).collect();
        prop_assert_eq!(interpret(&seq, &pis).unwrap(), po_words(&net, &pis));
    }

    #[test]
    fn in_order_preserves_function(seed in 0u64..10_000) {
        let net = random_net(seed, 6, 20);
        let s = schedule_heuristic(&ScheduleRequest::new(net.clone())).unwrap().scheduled().unwrap();
        prop_assert_eq!(crate::test_util::truth_table(s.netlist()), crate::test_util::truth_table(&net));
        prop_assert_eq!(ScheduledNetlist::in_order(s.netlist().clone()).mf(), s.mf());
    }
}
