use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::random::{random_xmg, RandomShape};
use crate::test_util::truth_table;
use crate::xmg::{Edge, XmgBuilder};

fn random_net(seed: u64, pis: usize, nodes: usize) -> XmgNetlist {
    random_xmg(&mut ChaCha8Rng::seed_from_u64(seed), RandomShape::new(pis, nodes))
}

fn every_pass(seed: u64) -> Vec<PassId> {
    PassKind::ALL.iter().map(|&k| PassId::new(k, seed)).collect()
}

#[test]
fn pass_names_round_trip() {
    for k in PassKind::ALL {
        assert_eq!(k.name().parse::<PassKind>().unwrap(), k);
    }
    assert!("resyn2".parse::<PassKind>().is_err());
}

#[test]
fn constant_propagate_folds_majority_of_zeros() {
    let mut b = XmgBuilder::raw("c", 1);
    let x1 = b.pi(0);
    let n = b.maj(x1, Edge::ZERO, Edge::ZERO);
    b.add_po(n);
    let out = run_pass(&b.build(), PassId::new(PassKind::ConstantPropagate, 0));
    assert_eq!(out.size(), 0);
    assert_eq!(out.pos()[0], Edge::ZERO);
}

#[test]
fn strash_merges_duplicates() {
    let mut b = XmgBuilder::raw("d", 2);
    let (x1, x2) = (b.pi(0), b.pi(1));
    let p = b.maj(x1, x2, Edge::ZERO);
    let q = b.maj(x1, x2, Edge::ZERO);
    let r = b.xor(p, q, x1);
    b.add_po(r);
    let net = b.build();
    assert_eq!(net.size(), 3);
    assert_eq!(run_pass(&net, PassId::new(PassKind::DedupStrash, 0)).size(), 2);
}

#[test]
fn maj_distributivity_saves_a_gate() {
    // M(M(x1,x2,x3), M(x1,x2,x4), x5) = M(x1, x2, M(x3,x4,x5))
    let mut b = XmgBuilder::raw("dist", 5);
    let x: Vec<Edge> = (0..5).map(|k| b.pi(k)).collect();
    let a = b.maj(x[0], x[1], x[2]);
    let c = b.maj(x[1], x[0], x[3]);
    let o = b.maj(a, c, x[4]);
    b.add_po(o);
    let net = b.build();
    let out = run_pass(&net, PassId::new(PassKind::MajRewrite, 0));
    assert_eq!(out.size(), 2);
    assert_eq!(truth_table(&out), truth_table(&net));
}

#[test]
fn maj_associativity_reuses_existing_gate() {
    // M(x1, x3, M(x2, x3, x4)) with M(x2, x3, x1) already present elsewhere.
    let mut b = XmgBuilder::raw("assoc", 4);
    let x: Vec<Edge> = (0..4).map(|k| b.pi(k)).collect();
    let shared = b.maj(x[1], x[2], x[0]);
    let inner = b.maj(x[1], x[2], x[3]);
    let o = b.maj(x[0], x[2], inner);
    b.add_po(o);
    b.add_po(shared);
    let net = b.build();
    let out = run_pass(&net, PassId::new(PassKind::MajRewrite, 0));
    assert_eq!(out.size(), 2);
    assert_eq!(truth_table(&out), truth_table(&net));
}

#[test]
fn maj_complementary_associativity_folds() {
    // M(x1, x2, M(x1, !x2, x3)) = M(x1, x2, M(x1, x1, x3)) = M(x1, x2, x1) = x1
    let mut b = XmgBuilder::raw("cassoc", 3);
    let x: Vec<Edge> = (0..3).map(|k| b.pi(k)).collect();
    let inner = b.maj(x[0], !x[1], x[2]);
    let o = b.maj(x[0], x[1], inner);
    b.add_po(o);
    let net = b.build();
    let out = run_pass(&net, PassId::new(PassKind::MajRewrite, 0));
    assert_eq!(out.size(), 0);
    assert_eq!(out.pos()[0], x[0]);
}

#[test]
fn xor_cancellation_absorbs_inner_gate() {
    // X(X(x1,x2,x3), x1, x4) = X(x2, x3, x4)
    let mut b = XmgBuilder::raw("xor", 4);
    let x: Vec<Edge> = (0..4).map(|k| b.pi(k)).collect();
    let inner = b.xor(x[0], x[1], x[2]);
    let o = b.xor(!inner, x[0], x[3]);
    b.add_po(o);
    let net = b.build();
    let out = run_pass(&net, PassId::new(PassKind::XorRewrite, 0));
    assert_eq!(out.size(), 1);
    assert_eq!(truth_table(&out), truth_table(&net));
}

#[test]
fn resub0_replaces_redundant_node() {
    // x1 & (x1 & x2) equals x1 & x2.
    let mut b = XmgBuilder::raw("r0", 2);
    let (x1, x2) = (b.pi(0), b.pi(1));
    let n1 = b.maj(x1, x2, Edge::ZERO);
    let n2 = b.maj(x1, n1, Edge::ZERO);
    let n3 = b.xor(n1, n2, x2);
    b.add_po(n3);
    b.add_po(n2);
    let net = b.build();
    let out = run_pass(&net, PassId::new(PassKind::WindowResub0, 1));
    assert!(out.size() < net.size());
    assert_eq!(truth_table(&out), truth_table(&net));
}

#[test]
fn resub1_finds_majority_behind_and_or_tree() {
    // (x1&x2) | (x1&x3) | (x2&x3) built from five AND/OR gates.
    let mut b = XmgBuilder::raw("r1", 3);
    let x: Vec<Edge> = (0..3).map(|k| b.pi(k)).collect();
    let p = b.maj(x[0], x[1], Edge::ZERO);
    let q = b.maj(x[0], x[2], Edge::ZERO);
    let r = b.maj(x[1], x[2], Edge::ZERO);
    let s = b.maj(p, q, Edge::ONE);
    let t = b.maj(s, r, Edge::ONE);
    b.add_po(t);
    let net = b.build();
    let out = run_pass(&net, PassId::new(PassKind::WindowResub1, 3));
    assert_eq!(out.size(), 1);
    assert_eq!(truth_table(&out), truth_table(&net));
}

#[test]
fn every_pass_preserves_function_on_random_netlists() {
    for seed in 0..60 {
        let net = random_net(seed, 6, 14);
        let tt = truth_table(&net);
        for pass in every_pass(seed) {
            let out = run_pass(&net, pass);
            assert_eq!(truth_table(&out), tt, "seed {seed} pass {}", pass.kind);
            assert!(out.size() <= net.size());
            assert_eq!(out.num_pis(), net.num_pis());
        }
    }
}

#[test]
fn passes_are_deterministic() {
    for seed in 0..10 {
        let net = random_net(100 + seed, 8, 40);
        for pass in every_pass(seed) {
            assert_eq!(run_pass(&net, pass), run_pass(&net, pass));
        }
        let a = run_random_sequence(&net, 10, seed);
        let b = run_random_sequence(&net, 10, seed);
        assert_eq!(crate::io::write_xmg(&a), crate::io::write_xmg(&b));
    }
}

#[test]
fn zero_commands_is_cleanup() {
    let net = random_net(7, 6, 30);
    assert_eq!(run_random_sequence(&net, 0, 99), cleanup(&net));
}

#[test]
fn cleanup_is_idempotent() {
    for seed in 0..20 {
        let once = cleanup(&random_net(200 + seed, 7, 40));
        assert_eq!(cleanup(&once), once);
    }
}

#[test]
fn random_passes_cover_pool() {
    let drawn = random_passes(200, 5);
    for k in PassKind::ALL {
        assert!(drawn.iter().any(|p| p.kind == k), "{k} never drawn");
    }
    assert_eq!(random_passes(10, 5), random_passes(10, 5));
}

#[test]
fn int2float_shrinks() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../benchmarks/epfl/int2float.aag");
    let net = crate::io::parse_aiger(&std::fs::read_to_string(path).unwrap()).unwrap();
    let out = run_random_sequence(&net, 10, 1);
    assert!(out.size() < net.size(), "{} vs {}", out.size(), net.size());
    let v = crate::sim::equivalent_netlists(&net, &out, &crate::sim::Validator::default());
    assert!(v.is_equivalent());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_sequence_preserves_function(seed in any::<u64>(), pis in 2usize..9, nodes in 1usize..40, k in 0usize..6) {
        let net = random_net(seed, pis, nodes);
        let out = run_random_sequence(&net, k, seed);
        prop_assert_eq!(truth_table(&out), truth_table(&net));
        prop_assert!(out.size() <= net.size());
    }
}
