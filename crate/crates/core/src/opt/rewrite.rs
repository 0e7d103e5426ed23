//! Local algebraic rewriting over single-fanout gate pairs.
//!
//! MAJ rules:
//! - distributivity, right to left: M(M(x,y,u), M(x,y,v), z) = M(x, y, M(u,v,z))
//! - associativity: M(x, u, M(y,u,z)) = M(z, u, M(y,u,x))
//! - complementary associativity: M(x, u, M(y,!u,z)) = M(x, u, M(y,x,z))
//!
//! XOR rules: absorb single-fanout XOR fan-ins into their consumer when
//! repeated terms cancel, and associativity.
//!
//! Reshaping with no immediate gain is taken when the reshaped inner gate
//! already exists (or folds away), and otherwise with a small seeded
//! probability so different seeds explore different structures.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::xmg::{BuilderOptions, Edge, GateKind, XmgBuilder, XmgNetlist, XmgNode};

const RESHAPE_PROB: f64 = 0.15;

struct Ctx<'a> {
    net: &'a XmgNetlist,
    refs: Vec<u32>,
    rng: ChaCha8Rng,
}

impl Ctx<'_> {
    /// Mapped fan-ins of the gate behind `orig` if it is a `kind` gate used
    /// only once. A complemented edge is pushed into the fan-ins.
    fn single(&self, orig: Edge, map: &[Edge], kind: GateKind) -> Option<[Edge; 3]> {
        let node = self.net.node(orig.node())?;
        if node.kind != kind || self.refs[orig.node().index()] != 1 {
            return None;
        }
        let mut f = node.fanins.map(|e| map[e.node().index()].complement_if(e.is_complemented()));
        if orig.is_complemented() {
            match kind {
                GateKind::Maj => f = f.map(|e| !e),
                GateKind::Xor => f[0] = !f[0],
            }
        }
        Some(f)
    }
}

fn others(i: usize) -> (usize, usize) {
    ((i + 1) % 3, (i + 2) % 3)
}

pub(crate) fn maj_rewrite(net: &XmgNetlist, seed: u64) -> XmgNetlist {
    let mut cx = Ctx { net, refs: net.reference_counts(), rng: ChaCha8Rng::seed_from_u64(seed) };
    net.rebuild(BuilderOptions::default(), |b, node, f, map| {
        if node.kind == GateKind::Maj {
            if let Some(e) = rewrite_maj(&mut cx, b, node, f, map) {
                return e;
            }
        }
        b.gate(node.kind, f)
    })
}

fn rewrite_maj(cx: &mut Ctx, b: &mut XmgBuilder, node: &XmgNode, f: [Edge; 3], map: &[Edge]) -> Option<Edge> {
    let inner: [Option<[Edge; 3]>; 3] = [0, 1, 2].map(|i| cx.single(node.fanins[i], map, GateKind::Maj));

    // Distributivity.
    for i in 0..3 {
        for j in i + 1..3 {
            let (Some(a), Some(c)) = (inner[i], inner[j]) else { continue };
            let z = f[3 - i - j];
            for p in 0..3 {
                for q in p + 1..3 {
                    let (x, y) = (a[p], a[q]);
                    let u = a[3 - p - q];
                    let Some(r) = (0..3).find(|&r| c[r] == x) else { continue };
                    let Some(s) = (0..3).find(|&s| s != r && c[s] == y) else { continue };
                    let v = c[3 - r - s];
                    let t = b.maj(u, v, z);
                    return Some(b.maj(x, y, t));
                }
            }
        }
    }

    for i in 0..3 {
        let Some(g) = inner[i] else { continue };
        let (o1, o2) = others(i);
        for (x, u) in [(f[o1], f[o2]), (f[o2], f[o1])] {
            // Complementary associativity.
            if let Some(k) = (0..3).find(|&k| g[k] == !u) {
                let mut h = g;
                h[k] = x;
                if let Some(t) = b.lookup(GateKind::Maj, h) {
                    return Some(b.maj(x, u, t));
                }
            }
            // Associativity: swap x with one of the other inner fan-ins.
            if let Some(k) = (0..3).find(|&k| g[k] == u) {
                let (k1, k2) = others(k);
                for (y, z) in [(g[k1], g[k2]), (g[k2], g[k1])] {
                    if let Some(t) = b.lookup(GateKind::Maj, [y, u, x]) {
                        return Some(b.maj(z, u, t));
                    }
                }
                if cx.rng.gen_bool(RESHAPE_PROB) {
                    let (y, z) = (g[k1], g[k2]);
                    let t = b.maj(y, u, x);
                    return Some(b.maj(z, u, t));
                }
            }
        }
    }
    None
}

pub(crate) fn xor_rewrite(net: &XmgNetlist, seed: u64) -> XmgNetlist {
    let mut cx = Ctx { net, refs: net.reference_counts(), rng: ChaCha8Rng::seed_from_u64(seed) };
    net.rebuild(BuilderOptions::default(), |b, node, f, map| {
        if node.kind == GateKind::Xor {
            if let Some(e) = rewrite_xor(&mut cx, b, node, f, map) {
                return e;
            }
        }
        b.gate(node.kind, f)
    })
}

/// XOR of `terms` as at most three regular edges plus an output parity,
/// with repeated terms cancelled and constants folded.
fn reduce_terms(terms: &[Edge]) -> (Vec<Edge>, bool) {
    let mut parity = false;
    let mut regs: Vec<Edge> = Vec::new();
    for &t in terms {
        parity ^= t.is_complemented();
        let r = t.regular();
        if r == Edge::ZERO {
            continue;
        }
        if let Some(pos) = regs.iter().position(|&e| e == r) {
            regs.swap_remove(pos);
        } else {
            regs.push(r);
        }
    }
    (regs, parity)
}

fn rewrite_xor(cx: &mut Ctx, b: &mut XmgBuilder, node: &XmgNode, f: [Edge; 3], map: &[Edge]) -> Option<Edge> {
    let inner: [Option<[Edge; 3]>; 3] = [0, 1, 2].map(|i| cx.single(node.fanins[i], map, GateKind::Xor));

    // Absorption: expand every single-fanout XOR fan-in, then each alone.
    let all: Vec<usize> = (0..3).filter(|&i| inner[i].is_some()).collect();
    let mut choices: Vec<Vec<usize>> = Vec::new();
    if all.len() > 1 {
        choices.push(all.clone());
    }
    choices.extend(all.iter().map(|&i| vec![i]));
    for expand in choices {
        let mut terms = Vec::new();
        for i in 0..3 {
            match inner[i] {
                Some(g) if expand.contains(&i) => terms.extend(g),
                _ => terms.push(f[i]),
            }
        }
        let (regs, parity) = reduce_terms(&terms);
        if regs.len() <= 3 {
            let mut t = [Edge::ZERO; 3];
            t[..regs.len()].copy_from_slice(&regs);
            return Some(b.xor(t[0], t[1], t[2]).complement_if(parity));
        }
    }

    // Associativity: X(X(a,b,c), d, e) = X(X(a,b,d), c, e).
    for i in 0..3 {
        let Some(g) = inner[i] else { continue };
        let (o1, o2) = others(i);
        for (d, e) in [(f[o1], f[o2]), (f[o2], f[o1])] {
            for k in 0..3 {
                let (k1, k2) = others(k);
                if let Some(t) = b.lookup(GateKind::Xor, [g[k1], g[k2], d]) {
                    return Some(b.xor(t, g[k], e));
                }
            }
        }
        if cx.rng.gen_bool(RESHAPE_PROB) {
            let k = cx.rng.gen_range(0..3);
            let (k1, k2) = others(k);
            let t = b.xor(g[k1], g[k2], f[o1]);
            return Some(b.xor(t, g[k], f[o2]));
        }
    }
    None
}
