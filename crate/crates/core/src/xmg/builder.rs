use std::collections::HashMap;

use super::{Edge, GateKind, NodeId, XmgNetlist, XmgNode};

/// What the builder does with each new gate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BuilderOptions {
    /// Reuse an existing node with the same normalized fan-ins.
    pub hash: bool,
    /// Fold trivial gates: repeated, complementary or constant fan-ins.
    pub simplify: bool,
}

impl Default for BuilderOptions {
    fn default() -> Self {
        BuilderOptions { hash: true, simplify: true }
    }
}

/// Incremental netlist construction in topological order.
///
/// ```
/// use imcc::xmg::{Edge, XmgBuilder};
///
/// let mut b = XmgBuilder::new("and2", 2);
/// let (x1, x2) = (b.pi(0), b.pi(1));
/// let n = b.maj(x1, x2, Edge::ZERO);
/// b.add_po(n);
/// assert_eq!(b.build().size(), 1);
/// ```
#[derive(Clone, Debug)]
pub struct XmgBuilder {
    name: String,
    num_pis: usize,
    nodes: Vec<XmgNode>,
    pos: Vec<Edge>,
    options: BuilderOptions,
    table: HashMap<XmgNode, NodeId>,
}

impl XmgBuilder {
    pub fn new(name: impl Into<String>, num_pis: usize) -> XmgBuilder {
        XmgBuilder::with_options(name, num_pis, BuilderOptions::default())
    }

    pub fn with_options(name: impl Into<String>, num_pis: usize, options: BuilderOptions) -> XmgBuilder {
        XmgBuilder { name: name.into(), num_pis, nodes: Vec::new(), pos: Vec::new(), options, table: HashMap::new() }
    }

    /// Builder without simplification or hashing: every gate call creates
    /// exactly one node.
    pub fn raw(name: impl Into<String>, num_pis: usize) -> XmgBuilder {
        XmgBuilder::with_options(name, num_pis, BuilderOptions { hash: false, simplify: false })
    }

    pub fn pi(&self, k: usize) -> Edge {
        assert!(k < self.num_pis, "PI {k} out of range");
        Edge::plain(NodeId(k as u32 + 1))
    }

    pub fn num_pis(&self) -> usize {
        self.num_pis
    }

    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, id: NodeId) -> Option<&XmgNode> {
        id.index().checked_sub(self.num_pis + 1).and_then(|i| self.nodes.get(i))
    }

    pub fn maj(&mut self, a: Edge, b: Edge, c: Edge) -> Edge {
        self.gate(GateKind::Maj, [a, b, c])
    }

    pub fn xor(&mut self, a: Edge, b: Edge, c: Edge) -> Edge {
        self.gate(GateKind::Xor, [a, b, c])
    }

    pub fn gate(&mut self, kind: GateKind, fanins: [Edge; 3]) -> Edge {
        let next = NodeId((self.num_pis + 1 + self.nodes.len()) as u32);
        for f in fanins {
            assert!(f.node() < next, "fan-in {} not yet built", f.node());
        }
        if self.options.simplify {
            if let Some(e) = simplify(kind, fanins) {
                return e;
            }
        }
        if !self.options.hash {
            self.nodes.push(XmgNode { kind, fanins });
            return Edge::plain(next);
        }
        let (node, out_compl) = normalize(kind, fanins);
        if let Some(&id) = self.table.get(&node) {
            return Edge::new(id, out_compl);
        }
        self.table.insert(node, next);
        self.nodes.push(node);
        Edge::new(next, out_compl)
    }

    /// The edge `gate` would return without creating a node, if any.
    pub fn lookup(&self, kind: GateKind, fanins: [Edge; 3]) -> Option<Edge> {
        if self.options.simplify {
            if let Some(e) = simplify(kind, fanins) {
                return Some(e);
            }
        }
        if !self.options.hash {
            return None;
        }
        let (node, out_compl) = normalize(kind, fanins);
        self.table.get(&node).map(|&id| Edge::new(id, out_compl))
    }

    pub fn add_po(&mut self, e: Edge) {
        self.pos.push(e);
    }

    /// Finish, dropping nodes no PO depends on.
    pub fn build(self) -> XmgNetlist {
        XmgNetlist::from_parts_unchecked(self.name, self.num_pis, self.nodes, self.pos).sweep_dangling()
    }

    /// Finish without sweeping dangling nodes.
    pub fn build_unswept(self) -> XmgNetlist {
        XmgNetlist::from_parts_unchecked(self.name, self.num_pis, self.nodes, self.pos)
    }
}

/// Trivial identities: a gate with two equal or two complementary fan-ins
/// collapses to a single edge.
pub(crate) fn simplify(kind: GateKind, f: [Edge; 3]) -> Option<Edge> {
    for (i, j, k) in [(0, 1, 2), (0, 2, 1), (1, 2, 0)] {
        if f[i] == f[j] {
            return Some(match kind {
                GateKind::Maj => f[i],
                GateKind::Xor => f[k],
            });
        }
        if f[i] == !f[j] {
            return Some(match kind {
                GateKind::Maj => f[k],
                GateKind::Xor => !f[k],
            });
        }
    }
    None
}

/// Canonical form used for hashing. Returns the node and whether the
/// caller must complement the resulting edge.
pub(crate) fn normalize(kind: GateKind, mut f: [Edge; 3]) -> (XmgNode, bool) {
    let mut out = false;
    match kind {
        GateKind::Maj => {
            // MAJ is self-dual: keep at most one complemented fan-in.
            if f.iter().filter(|e| e.is_complemented()).count() >= 2 {
                f = f.map(|e| !e);
                out = true;
            }
        }
        GateKind::Xor => {
            for e in f.iter_mut() {
                out ^= e.is_complemented();
                *e = e.regular();
            }
        }
    }
    f.sort();
    (XmgNode { kind, fanins: f }, out)
}
