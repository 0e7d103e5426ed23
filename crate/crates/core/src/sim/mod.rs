//! Bit-parallel simulation, candidate checks and equivalence validation.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::xmg::{GateKind, NodeId, XmgError, XmgNetlist};

mod validate;

pub use validate::{equivalent_netlists, validate_equivalence, Candidate, TruthTable, Validation, Validator};

/// Netlists with at most this many PIs are simulated exhaustively.
pub const EXHAUSTIVE_SIM_PIS: usize = 10;
/// Random patterns used above the exhaustive limit (plus all-zero and all-one).
pub const RANDOM_PATTERNS: usize = 1024;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("expected {expected} PI patterns, got {got}")]
    PatternCount { expected: usize, got: usize },
    #[error("pattern widths differ ({0} vs {1})")]
    WidthMismatch(usize, usize),
}

/// One bit per input pattern, packed into 64-bit words. Bits past `width`
/// are always zero.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SimVector {
    words: Vec<u64>,
    width: usize,
}

impl SimVector {
    pub fn zeros(width: usize) -> SimVector {
        SimVector { words: vec![0; width.div_ceil(64).max(1)], width }
    }

    pub fn ones(width: usize) -> SimVector {
        let mut v = SimVector { words: vec![!0; width.div_ceil(64).max(1)], width };
        v.mask_tail();
        v
    }

    pub fn from_bits(bits: &[bool]) -> SimVector {
        let mut v = SimVector::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.words[i / 64] |= 1 << (i % 64);
            }
        }
        v
    }

    pub fn from_words(words: Vec<u64>, width: usize) -> SimVector {
        assert!(words.len() == width.div_ceil(64).max(1));
        let mut v = SimVector { words, width };
        v.mask_tail();
        v
    }

    fn mask_tail(&mut self) {
        let rem = self.width % 64;
        if rem != 0 {
            *self.words.last_mut().unwrap() &= (1u64 << rem) - 1;
        }
        if self.width == 0 {
            self.words[0] = 0;
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn bit(&self, i: usize) -> bool {
        assert!(i < self.width);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn complement(&self) -> SimVector {
        let mut v = SimVector { words: self.words.iter().map(|w| !w).collect(), width: self.width };
        v.mask_tail();
        v
    }

    pub(crate) fn tail_mask(&self, word: usize) -> u64 {
        let rem = self.width % 64;
        if word + 1 == self.words.len() && rem != 0 {
            (1u64 << rem) - 1
        } else if self.width == 0 {
            0
        } else {
            !0
        }
    }
}

/// Default pattern set for a netlist with `num_pis` inputs: exhaustive up to
/// [`EXHAUSTIVE_SIM_PIS`], otherwise all-zero, all-one and
/// [`RANDOM_PATTERNS`] seeded random patterns.
pub fn default_patterns(num_pis: usize, seed: u64) -> Vec<SimVector> {
    if num_pis <= EXHAUSTIVE_SIM_PIS {
        exhaustive_patterns(num_pis)
    } else {
        random_patterns(num_pis, RANDOM_PATTERNS, seed)
    }
}

/// Standard binary counting: pattern `t` assigns bit `k` of `t` to PI `k`.
pub fn exhaustive_patterns(num_pis: usize) -> Vec<SimVector> {
    let width = 1usize << num_pis;
    (0..num_pis).map(|k| SimVector::from_words((0..width.div_ceil(64)).map(|w| pi_word(k, w)).collect(), width)).collect()
}

/// Word `w` of PI `k` under standard binary counting.
#[inline]
pub(crate) fn pi_word(k: usize, w: usize) -> u64 {
    const LOW: [u64; 6] = [
        0xAAAA_AAAA_AAAA_AAAA,
        0xCCCC_CCCC_CCCC_CCCC,
        0xF0F0_F0F0_F0F0_F0F0,
        0xFF00_FF00_FF00_FF00,
        0xFFFF_0000_FFFF_0000,
        0xFFFF_FFFF_0000_0000,
    ];
    if k < 6 {
        LOW[k]
    } else if (w >> (k - 6)) & 1 == 1 {
        !0
    } else {
        0
    }
}

/// Pattern 0 is all-zero, pattern 1 all-one, the rest are uniform random.
pub fn random_patterns(num_pis: usize, count: usize, seed: u64) -> Vec<SimVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = count + 2;
    (0..num_pis)
        .map(|_| {
            let mut words: Vec<u64> = (0..width.div_ceil(64)).map(|_| rng.gen()).collect();
            words[0] = (words[0] & !0b11) | 0b10;
            SimVector::from_words(words, width)
        })
        .collect()
}

/// Simulation values for every node id (constant, PIs, operations).
#[derive(Clone, Debug)]
pub struct Simulation {
    values: Vec<SimVector>,
    width: usize,
}

impl Simulation {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn get(&self, id: NodeId) -> &SimVector {
        &self.values[id.index()]
    }

    pub fn values(&self) -> &[SimVector] {
        &self.values
    }

    /// Append one pattern, evaluating `net` (the netlist this simulation
    /// was computed on) under `input`.
    pub fn add_pattern(&mut self, net: &XmgNetlist, input: &[bool]) {
        assert_eq!(input.len(), net.num_pis());
        let mut val = vec![false; net.num_ids()];
        val[1..=input.len()].copy_from_slice(input);
        for id in net.op_ids() {
            let n = net.node(id).unwrap();
            let [a, b, c] = n.fanins.map(|e| val[e.node().index()] != e.is_complemented());
            val[id.index()] = n.kind.eval(a, b, c);
        }
        let (w, bit) = (self.width / 64, self.width % 64);
        for (v, &x) in self.values.iter_mut().zip(&val) {
            if w == v.words.len() {
                v.words.push(0);
            }
            v.words[w] |= (x as u64) << bit;
            v.width += 1;
        }
        self.width += 1;
    }

    /// Value of an edge, applying its complement.
    pub fn edge(&self, e: crate::Edge) -> SimVector {
        let v = self.get(e.node());
        if e.is_complemented() {
            v.complement()
        } else {
            v.clone()
        }
    }
}

/// Simulate every node of `net` under the given PI patterns.
pub fn simulate(net: &XmgNetlist, patterns: &[SimVector]) -> Result<Simulation, SimError> {
    if patterns.len() != net.num_pis() {
        return Err(SimError::PatternCount { expected: net.num_pis(), got: patterns.len() });
    }
    let width = patterns.first().map_or(1, |p| p.width);
    if let Some(p) = patterns.iter().find(|p| p.width != width) {
        return Err(SimError::WidthMismatch(width, p.width));
    }
    let mut values = Vec::with_capacity(net.num_ids());
    values.push(SimVector::zeros(width));
    values.extend(patterns.iter().cloned());
    for id in net.op_ids() {
        let node = net.node(id).unwrap();
        let n = values[0].words.len();
        let mut out = SimVector { words: vec![0; n], width };
        let [a, b, c] = node.fanins.map(|e| (&values[e.node().index()].words, flip(e.is_complemented())));
        for w in 0..n {
            out.words[w] = node.kind.eval_word(a.0[w] ^ a.1, b.0[w] ^ b.1, c.0[w] ^ c.1);
        }
        out.mask_tail();
        values.push(out);
    }
    Ok(Simulation { values, width })
}

#[inline]
fn flip(c: bool) -> u64 {
    if c {
        !0
    } else {
        0
    }
}

/// Outcome of comparing two simulation vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SimMatch {
    Equal,
    Complement,
    Neither,
}

/// Compare two vectors over the simulated patterns. A match is only a
/// necessary condition for equivalence.
pub fn check_candidate_equal(root: &SimVector, div: &SimVector) -> SimMatch {
    assert_eq!(root.width, div.width, "width mismatch");
    let mut equal = true;
    let mut compl = true;
    for (w, (&a, &b)) in root.words.iter().zip(&div.words).enumerate() {
        let m = root.tail_mask(w);
        let x = (a ^ b) & m;
        equal &= x == 0;
        compl &= x == m;
        if !equal && !compl {
            return SimMatch::Neither;
        }
    }
    if equal {
        SimMatch::Equal
    } else {
        SimMatch::Complement
    }
}

/// True iff `kind` applied to the (optionally complemented) triple reproduces
/// `target` on every simulated pattern.
pub fn check_candidate_op(target: &SimVector, kind: GateKind, triple: [(&SimVector, bool); 3]) -> bool {
    for (v, _) in triple {
        assert_eq!(v.width, target.width, "width mismatch");
    }
    let [a, b, c] = triple.map(|(v, cpl)| (&v.words, flip(cpl)));
    target.words.iter().enumerate().all(|(w, &t)| {
        let m = target.tail_mask(w);
        (kind.eval_word(a.0[w] ^ a.1, b.0[w] ^ b.1, c.0[w] ^ c.1) ^ t) & m == 0
    })
}

/// Set of PIs, as a bitset over PI positions.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct PiSet(Vec<u64>);

impl PiSet {
    pub fn empty(num_pis: usize) -> PiSet {
        PiSet(vec![0; num_pis.div_ceil(64)])
    }

    /// Insert PI position `k` (0-based).
    pub fn insert(&mut self, k: usize) {
        self.0[k / 64] |= 1 << (k % 64);
    }

    pub fn contains(&self, k: usize) -> bool {
        (self.0[k / 64] >> (k % 64)) & 1 == 1
    }

    pub fn union_with(&mut self, other: &PiSet) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a |= b;
        }
    }

    pub fn is_subset(&self, other: &PiSet) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    /// PI positions in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(i, &w)| (0..64).filter(move |b| (w >> b) & 1 == 1).map(move |b| i * 64 + b))
    }
}

/// Structural support of every node id.
pub fn support_sets(net: &XmgNetlist) -> Vec<PiSet> {
    let mut sets = Vec::with_capacity(net.num_ids());
    sets.push(PiSet::empty(net.num_pis()));
    for k in 0..net.num_pis() {
        let mut s = PiSet::empty(net.num_pis());
        s.insert(k);
        sets.push(s);
    }
    for id in net.op_ids() {
        let mut s = PiSet::empty(net.num_pis());
        for f in net.node(id).unwrap().fanins {
            s.union_with(&sets[f.node().index()]);
        }
        sets.push(s);
    }
    sets
}

/// PIs with a directed path to `node`.
pub fn dependent_pis(net: &XmgNetlist, node: NodeId) -> Result<BTreeSet<NodeId>, XmgError> {
    if !net.contains(node) {
        return Err(XmgError::UnknownNode(node));
    }
    let mut seen = vec![false; node.index() + 1];
    let mut stack = vec![node];
    let mut out = BTreeSet::new();
    while let Some(id) = stack.pop() {
        if std::mem::replace(&mut seen[id.index()], true) {
            continue;
        }
        if net.is_pi(id) {
            out.insert(id);
        } else if let Some(n) = net.node(id) {
            stack.extend(n.fanins.iter().map(|f| f.node()));
        }
    }
    Ok(out)
}
