use crate::sat::{Lit, SatResult, Solver};
use crate::xmg::{BuilderOptions, Edge, GateKind, NodeId, XmgBuilder, XmgNetlist};

use super::pi_word;

/// Right-hand side of an equivalence query: an existing signal or a new gate
/// over existing signals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Candidate {
    Signal(Edge),
    Gate(GateKind, [Edge; 3]),
}

impl Candidate {
    fn inputs(&self) -> Vec<Edge> {
        match *self {
            Candidate::Signal(e) => vec![e],
            Candidate::Gate(_, f) => f.to_vec(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Validation {
    Equivalent,
    NotEquivalent,
    /// The solver ran out of budget. Callers treat this as a rejection.
    Undecided,
}

impl Validation {
    pub fn is_equivalent(self) -> bool {
        self == Validation::Equivalent
    }
}

/// Equivalence checker: exhaustive simulation over the joint support when it
/// is small, a SAT miter otherwise.
#[derive(Clone, Copy, Debug)]
pub struct Validator {
    pub exhaustive_limit: usize,
    pub conflict_limit: u64,
}

impl Default for Validator {
    fn default() -> Self {
        Validator { exhaustive_limit: 20, conflict_limit: 100_000 }
    }
}

/// Transitive fan-in of some roots: PIs and operations, both ascending.
struct Cone {
    pis: Vec<NodeId>,
    ops: Vec<NodeId>,
}

fn cone(net: &XmgNetlist, roots: &[Edge]) -> Cone {
    let mut seen = vec![false; net.num_ids()];
    let mut stack: Vec<NodeId> = roots.iter().map(|e| e.node()).collect();
    let (mut pis, mut ops) = (Vec::new(), Vec::new());
    while let Some(id) = stack.pop() {
        if std::mem::replace(&mut seen[id.index()], true) {
            continue;
        }
        if net.is_pi(id) {
            pis.push(id);
        } else if let Some(n) = net.node(id) {
            ops.push(id);
            stack.extend(n.fanins.iter().map(|f| f.node()));
        }
    }
    pis.sort();
    ops.sort();
    Cone { pis, ops }
}

impl Validator {
    /// Decide whether `a` and `b` compute the same function of the PIs.
    pub fn check(&self, net: &XmgNetlist, a: Edge, b: &Candidate) -> Validation {
        self.check_with_counterexample(net, a, b).0
    }

    /// Like `check`, and on `NotEquivalent` also one PI assignment (indexed
    /// by PI position) where the two sides differ.
    pub fn check_with_counterexample(&self, net: &XmgNetlist, a: Edge, b: &Candidate) -> (Validation, Option<Vec<bool>>) {
        if let Candidate::Signal(e) = b {
            if *e == a {
                return (Validation::Equivalent, None);
            }
        }
        let mut roots = b.inputs();
        roots.push(a);
        let cone = cone(net, &roots);
        let witness =
            if cone.pis.len() <= self.exhaustive_limit { self.exhaustive(net, &cone, a, b) } else { self.miter(net, &cone, a, b) };
        match witness {
            Ok(()) => (Validation::Equivalent, None),
            Err(Some(assign)) => {
                let mut input = vec![false; net.num_pis()];
                for (&p, v) in cone.pis.iter().zip(assign) {
                    input[p.index() - 1] = v;
                }
                (Validation::NotEquivalent, Some(input))
            }
            Err(None) => (Validation::Undecided, None),
        }
    }

    /// `Err(Some(values of the cone PIs))` on a difference.
    fn exhaustive(&self, net: &XmgNetlist, cone: &Cone, a: Edge, b: &Candidate) -> Result<(), Option<Vec<bool>>> {
        let k = cone.pis.len();
        let total_words = if k >= 6 { 1usize << (k - 6) } else { 1 };
        let mask = if k >= 6 { !0 } else { (1u64 << (1 << k)) - 1 };
        let block = total_words.min(256);
        let mut slot = vec![usize::MAX; net.num_ids()];
        slot[0] = 0;
        for (i, &p) in cone.pis.iter().enumerate() {
            slot[p.index()] = 1 + i;
        }
        for (i, &o) in cone.ops.iter().enumerate() {
            slot[o.index()] = 1 + k + i;
        }
        let mut val = vec![0u64; (1 + k + cone.ops.len()) * block];
        let read = |val: &[u64], e: Edge, w: usize| {
            let v = val[slot[e.node().index()] * block + w];
            if e.is_complemented() {
                !v
            } else {
                v
            }
        };
        for start in (0..total_words).step_by(block) {
            for (i, _) in cone.pis.iter().enumerate() {
                for w in 0..block {
                    val[(1 + i) * block + w] = pi_word(i, start + w);
                }
            }
            for (i, &o) in cone.ops.iter().enumerate() {
                let n = net.node(o).unwrap();
                for w in 0..block {
                    let x = n.kind.eval_word(read(&val, n.fanins[0], w), read(&val, n.fanins[1], w), read(&val, n.fanins[2], w));
                    val[(1 + k + i) * block + w] = x;
                }
            }
            for w in 0..block {
                let lhs = read(&val, a, w);
                let rhs = match *b {
                    Candidate::Signal(e) => read(&val, e, w),
                    Candidate::Gate(kind, f) => kind.eval_word(read(&val, f[0], w), read(&val, f[1], w), read(&val, f[2], w)),
                };
                let diff = (lhs ^ rhs) & mask;
                if diff != 0 {
                    let t = (start + w) * 64 + diff.trailing_zeros() as usize;
                    return Err(Some((0..k).map(|i| (t >> i) & 1 == 1).collect()));
                }
            }
        }
        Ok(())
    }

    /// `Err(None)` when the solver gives up.
    fn miter(&self, net: &XmgNetlist, cone: &Cone, a: Edge, b: &Candidate) -> Result<(), Option<Vec<bool>>> {
        let mut solver = Solver::new();
        let mut var = vec![u32::MAX; net.num_ids()];
        var[0] = solver.new_var();
        solver.add_clause(&[Lit::neg(var[0])]);
        for &p in &cone.pis {
            var[p.index()] = solver.new_var();
        }
        let lit = |var: &[u32], e: Edge| Lit::new(var[e.node().index()], e.is_complemented());
        for &o in &cone.ops {
            let n = net.node(o).unwrap();
            let y = solver.new_var();
            var[o.index()] = y;
            let f = n.fanins.map(|e| lit(&var, e));
            encode_gate(&mut solver, n.kind, f, Lit::pos(y));
        }
        let lhs = lit(&var, a);
        let rhs = match *b {
            Candidate::Signal(e) => lit(&var, e),
            Candidate::Gate(kind, f) => {
                let y = Lit::pos(solver.new_var());
                encode_gate(&mut solver, kind, f.map(|e| lit(&var, e)), y);
                y
            }
        };
        solver.add_clause(&[lhs, rhs]);
        solver.add_clause(&[!lhs, !rhs]);
        match solver.solve(self.conflict_limit) {
            SatResult::Unsat => Ok(()),
            SatResult::Sat => Err(Some(cone.pis.iter().map(|p| solver.model_value(var[p.index()])).collect())),
            SatResult::Unknown => Err(None),
        }
    }
}

/// Tseitin clauses for `y = kind(f)`.
pub(crate) fn encode_gate(s: &mut Solver, kind: GateKind, f: [Lit; 3], y: Lit) {
    match kind {
        GateKind::Maj => {
            for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                s.add_clause(&[!f[i], !f[j], y]);
                s.add_clause(&[f[i], f[j], !y]);
            }
        }
        GateKind::Xor => {
            for m in 0..8u32 {
                let bit = |i: u32| (m >> i) & 1 == 1;
                let parity = bit(0) ^ bit(1) ^ bit(2);
                // Rule out (f = m, y != parity).
                let lits: Vec<Lit> =
                    (0..3).map(|i| if bit(i) { !f[i as usize] } else { f[i as usize] }).chain([if parity { y } else { !y }]).collect();
                s.add_clause(&lits);
            }
        }
    }
}

/// `validate_equivalence` with the default validator.
pub fn validate_equivalence(net: &XmgNetlist, a: Edge, b: &Candidate) -> Validation {
    Validator::default().check(net, a, b)
}

/// PO-by-PO equivalence of two netlists over the same PIs.
pub fn equivalent_netlists(x: &XmgNetlist, y: &XmgNetlist, validator: &Validator) -> Validation {
    if x.num_pis() != y.num_pis() || x.pos().len() != y.pos().len() {
        return Validation::NotEquivalent;
    }
    let mut b = XmgBuilder::with_options("miter", x.num_pis(), BuilderOptions { hash: true, simplify: false });
    let px = import(&mut b, x);
    let py = import(&mut b, y);
    for (&e, &f) in px.iter().zip(&py) {
        b.add_po(e);
        b.add_po(f);
    }
    let joint = b.build_unswept();
    let mut result = Validation::Equivalent;
    for (&e, &f) in px.iter().zip(&py) {
        match validator.check(&joint, e, &Candidate::Signal(f)) {
            Validation::Equivalent => {}
            Validation::NotEquivalent => return Validation::NotEquivalent,
            Validation::Undecided => result = Validation::Undecided,
        }
    }
    result
}

fn import(b: &mut XmgBuilder, net: &XmgNetlist) -> Vec<Edge> {
    let mut map: Vec<Edge> = Vec::with_capacity(net.num_ids());
    map.push(Edge::ZERO);
    map.extend((0..net.num_pis()).map(|k| b.pi(k)));
    let tr = |map: &[Edge], e: Edge| map[e.node().index()].complement_if(e.is_complemented());
    for id in net.op_ids() {
        let n = net.node(id).unwrap();
        let f = n.fanins.map(|e| tr(&map, e));
        map.push(b.gate(n.kind, f));
    }
    net.pos().iter().map(|&e| tr(&map, e)).collect()
}

/// Exhaustive function of one signal over its dependent PIs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruthTable {
    /// Dependent PIs; entry `t` assigns bit `k` of `t` to `pis[k]`.
    pub pis: Vec<NodeId>,
    /// `2^pis.len()` bits packed little-endian into words.
    pub bits: Vec<u64>,
}

impl TruthTable {
    /// Truth table of `e` over its structural support, or `None` when the
    /// support exceeds `max_pis`.
    pub fn of(net: &XmgNetlist, e: Edge, max_pis: usize) -> Option<TruthTable> {
        let cone = cone(net, &[e]);
        let k = cone.pis.len();
        if k > max_pis {
            return None;
        }
        let words = if k >= 6 { 1usize << (k - 6) } else { 1 };
        let mask = if k >= 6 { !0 } else { (1u64 << (1 << k)) - 1 };
        let mut slot = vec![usize::MAX; net.num_ids()];
        for (i, &p) in cone.pis.iter().enumerate() {
            slot[p.index()] = i;
        }
        for (i, &o) in cone.ops.iter().enumerate() {
            slot[o.index()] = k + i;
        }
        let mut bits = vec![0u64; words];
        let mut val = vec![0u64; k + cone.ops.len()];
        for (w, out) in bits.iter_mut().enumerate() {
            for i in 0..k {
                val[i] = pi_word(i, w);
            }
            let read = |val: &[u64], e: Edge| {
                let v = if e.node() == NodeId::CONST0 { 0 } else { val[slot[e.node().index()]] };
                if e.is_complemented() {
                    !v
                } else {
                    v
                }
            };
            for (i, &o) in cone.ops.iter().enumerate() {
                let n = net.node(o).unwrap();
                val[k + i] = n.kind.eval_word(read(&val, n.fanins[0]), read(&val, n.fanins[1]), read(&val, n.fanins[2]));
            }
            *out = read(&val, e) & mask;
        }
        Some(TruthTable { pis: cone.pis, bits })
    }

    pub fn get(&self, t: usize) -> bool {
        (self.bits[t / 64] >> (t % 64)) & 1 == 1
    }
}
