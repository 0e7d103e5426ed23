//! XOR-majority graphs.
//!
//! Node 0 is the constant-zero node, nodes `1..=num_pis` are the primary
//! inputs and every following node is a 3-input MAJ or XOR operation whose
//! fan-ins all have smaller ids. Inversion lives on edges and primary
//! outputs only, matching hardware that reads the negated value of a row
//! for free.

mod builder;
mod edit;

use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::Not;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use builder::{BuilderOptions, XmgBuilder};
pub(crate) use edit::Editor;

/// Dense node index. See the module docs for the id layout.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct NodeId(pub u32);

impl NodeId {
    pub const CONST0: NodeId = NodeId(0);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A possibly complemented reference to a node, packed as `2 * id + complement`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct Edge(u32);

impl Edge {
    pub const ZERO: Edge = Edge(0);
    pub const ONE: Edge = Edge(1);

    #[inline]
    pub fn new(node: NodeId, complemented: bool) -> Edge {
        Edge((node.0 << 1) | complemented as u32)
    }

    #[inline]
    pub fn plain(node: NodeId) -> Edge {
        Edge::new(node, false)
    }

    #[inline]
    pub fn node(self) -> NodeId {
        NodeId(self.0 >> 1)
    }

    #[inline]
    pub fn is_complemented(self) -> bool {
        self.0 & 1 == 1
    }

    #[inline]
    pub fn is_const(self) -> bool {
        self.0 >> 1 == 0
    }

    /// Complement the edge when `flip` is set.
    #[inline]
    pub fn complement_if(self, flip: bool) -> Edge {
        Edge(self.0 ^ flip as u32)
    }

    /// The edge with the complement flag cleared.
    #[inline]
    pub fn regular(self) -> Edge {
        Edge(self.0 & !1)
    }

    #[inline]
    pub fn raw(self) -> u32 {
        self.0
    }
}

impl Not for Edge {
    type Output = Edge;

    #[inline]
    fn not(self) -> Edge {
        Edge(self.0 ^ 1)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum GateKind {
    Maj,
    Xor,
}

impl GateKind {
    pub fn name(self) -> &'static str {
        match self {
            GateKind::Maj => "MAJ",
            GateKind::Xor => "XOR",
        }
    }

    /// Evaluate the gate on three bits.
    #[inline]
    pub fn eval(self, a: bool, b: bool, c: bool) -> bool {
        match self {
            GateKind::Maj => (a & b) | (a & c) | (b & c),
            GateKind::Xor => a ^ b ^ c,
        }
    }

    /// Evaluate the gate on 64 packed patterns.
    #[inline]
    pub fn eval_word(self, a: u64, b: u64, c: u64) -> u64 {
        match self {
            GateKind::Maj => (a & b) | (a & c) | (b & c),
            GateKind::Xor => a ^ b ^ c,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct XmgNode {
    pub kind: GateKind,
    pub fanins: [Edge; 3],
}

impl XmgNode {
    pub fn maj(a: Edge, b: Edge, c: Edge) -> XmgNode {
        XmgNode { kind: GateKind::Maj, fanins: [a, b, c] }
    }

    pub fn xor(a: Edge, b: Edge, c: Edge) -> XmgNode {
        XmgNode { kind: GateKind::Xor, fanins: [a, b, c] }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum XmgError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("node {0} is not an operation node")]
    NotAnOperation(NodeId),
    #[error("node {node} has fan-in {fanin} that is not strictly earlier")]
    NonTopological { node: NodeId, fanin: NodeId },
    #[error("primary output {index} references unknown node {node}")]
    BadOutput { index: usize, node: NodeId },
    #[error("replacement {replacement} lies inside the MFFC of {old}")]
    ReplacementInMffc { old: NodeId, replacement: NodeId },
    #[error("replacement {replacement} is not earlier than consumer {consumer} of {old}")]
    ReplacementAfterConsumer { old: NodeId, replacement: NodeId, consumer: NodeId },
    #[error("order is not a permutation of the operation nodes")]
    BadOrder,
}

/// Consumers of a node: operation fan-outs in ascending id order, and whether
/// some primary output references it.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Fanouts {
    pub nodes: Vec<NodeId>,
    pub is_po: bool,
}

/// An immutable XOR-majority graph.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct XmgNetlist {
    name: String,
    num_pis: usize,
    nodes: Vec<XmgNode>,
    pos: Vec<Edge>,
}

impl XmgNetlist {
    /// Build a netlist from raw parts, checking topological indexing.
    pub fn new(name: impl Into<String>, num_pis: usize, nodes: Vec<XmgNode>, pos: Vec<Edge>) -> Result<XmgNetlist, XmgError> {
        let first_op = num_pis + 1;
        for (i, node) in nodes.iter().enumerate() {
            let id = NodeId((first_op + i) as u32);
            for f in node.fanins {
                if f.node() >= id {
                    return Err(XmgError::NonTopological { node: id, fanin: f.node() });
                }
            }
        }
        let total = first_op + nodes.len();
        for (index, po) in pos.iter().enumerate() {
            if po.node().index() >= total {
                return Err(XmgError::BadOutput { index, node: po.node() });
            }
        }
        Ok(XmgNetlist { name: name.into(), num_pis, nodes, pos })
    }

    pub(crate) fn from_parts_unchecked(name: String, num_pis: usize, nodes: Vec<XmgNode>, pos: Vec<Edge>) -> XmgNetlist {
        debug_assert!(XmgNetlist::new(name.clone(), num_pis, nodes.clone(), pos.clone()).is_ok());
        XmgNetlist { name, num_pis, nodes, pos }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> XmgNetlist {
        self.name = name.into();
        self
    }

    pub fn num_pis(&self) -> usize {
        self.num_pis
    }

    /// Number of operation nodes.
    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    /// Total number of node ids, including the constant and the PIs.
    pub fn num_ids(&self) -> usize {
        1 + self.num_pis + self.nodes.len()
    }

    pub fn pos(&self) -> &[Edge] {
        &self.pos
    }

    pub fn nodes(&self) -> &[XmgNode] {
        &self.nodes
    }

    /// Edge for PI `k` (zero-based).
    pub fn pi(&self, k: usize) -> Edge {
        assert!(k < self.num_pis, "PI {k} out of range");
        Edge::plain(NodeId(k as u32 + 1))
    }

    pub fn first_op(&self) -> NodeId {
        NodeId(self.num_pis as u32 + 1)
    }

    pub fn is_const(&self, id: NodeId) -> bool {
        id.0 == 0
    }

    pub fn is_pi(&self, id: NodeId) -> bool {
        id.0 >= 1 && id.index() <= self.num_pis
    }

    pub fn is_op(&self, id: NodeId) -> bool {
        id.index() > self.num_pis && id.index() < self.num_ids()
    }

    pub fn contains(&self, id: NodeId) -> bool {
        id.index() < self.num_ids()
    }

    /// The operation node with the given id.
    pub fn node(&self, id: NodeId) -> Option<&XmgNode> {
        if self.is_op(id) {
            Some(&self.nodes[id.index() - self.num_pis - 1])
        } else {
            None
        }
    }

    /// Operation ids in ascending order.
    pub fn op_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        let first = self.num_pis as u32 + 1;
        (0..self.nodes.len() as u32).map(move |i| NodeId(first + i))
    }

    /// One-based position of an operation in index order. For a scheduled
    /// netlist this is the clock cycle at which it executes.
    pub fn cycle_of(&self, id: NodeId) -> Option<usize> {
        self.is_op(id).then(|| id.index() - self.num_pis)
    }

    pub fn node_at_cycle(&self, cycle: usize) -> Option<NodeId> {
        (cycle >= 1 && cycle <= self.nodes.len()).then(|| NodeId((self.num_pis + cycle) as u32))
    }

    /// Per-id count of references from operation fan-ins and POs.
    pub fn reference_counts(&self) -> Vec<u32> {
        let mut refs = vec![0u32; self.num_ids()];
        for node in &self.nodes {
            for f in node.fanins {
                refs[f.node().index()] += 1;
            }
        }
        for po in &self.pos {
            refs[po.node().index()] += 1;
        }
        refs
    }

    /// Consumer lists for every id (deduplicated, ascending).
    pub fn fanout_lists(&self) -> Vec<Vec<NodeId>> {
        let mut out = vec![Vec::new(); self.num_ids()];
        for id in self.op_ids() {
            let node = self.node(id).unwrap();
            for (k, f) in node.fanins.iter().enumerate() {
                if node.fanins[..k].iter().any(|g| g.node() == f.node()) {
                    continue;
                }
                out[f.node().index()].push(id);
            }
        }
        out
    }

    /// Per-id flag telling whether some PO references the node.
    pub fn po_flags(&self) -> Vec<bool> {
        let mut flags = vec![false; self.num_ids()];
        for po in &self.pos {
            flags[po.node().index()] = true;
        }
        flags
    }

    pub fn fanouts(&self, id: NodeId) -> Result<Fanouts, XmgError> {
        if !self.contains(id) {
            return Err(XmgError::UnknownNode(id));
        }
        let mut nodes = Vec::new();
        for op in self.op_ids().skip_while(|&op| op <= id) {
            if self.node(op).unwrap().fanins.iter().any(|f| f.node() == id) {
                nodes.push(op);
            }
        }
        let is_po = self.pos.iter().any(|po| po.node() == id);
        Ok(Fanouts { nodes, is_po })
    }

    /// Maximum fanout-free cone of `root`: the root plus every operation
    /// used only (transitively) through it.
    pub fn mffc(&self, root: NodeId) -> Result<BTreeSet<NodeId>, XmgError> {
        if !self.contains(root) {
            return Err(XmgError::UnknownNode(root));
        }
        if !self.is_op(root) {
            return Err(XmgError::NotAnOperation(root));
        }
        let mut refs = self.reference_counts();
        let mut cone = BTreeSet::new();
        let mut stack = vec![root];
        cone.insert(root);
        while let Some(id) = stack.pop() {
            for f in self.node(id).unwrap().fanins {
                let n = f.node();
                if !self.is_op(n) {
                    continue;
                }
                refs[n.index()] -= 1;
                if refs[n.index()] == 0 && cone.insert(n) {
                    stack.push(n);
                }
            }
        }
        Ok(cone)
    }

    /// Redirect every consumer of `old` to `replacement` (composing
    /// complements) and remove the MFFC of `old`. Surviving nodes keep their
    /// relative order.
    pub fn substitute(&self, old: NodeId, replacement: Edge) -> Result<XmgNetlist, XmgError> {
        if !self.contains(old) {
            return Err(XmgError::UnknownNode(old));
        }
        if !self.is_op(old) {
            return Err(XmgError::NotAnOperation(old));
        }
        if !self.contains(replacement.node()) {
            return Err(XmgError::UnknownNode(replacement.node()));
        }
        if replacement == Edge::plain(old) {
            return Ok(self.clone());
        }
        let cone = self.mffc(old)?;
        if cone.contains(&replacement.node()) {
            return Err(XmgError::ReplacementInMffc { old, replacement: replacement.node() });
        }
        let fanouts = self.fanouts(old)?;
        if let Some(&consumer) = fanouts.nodes.iter().find(|&&c| c <= replacement.node()) {
            return Err(XmgError::ReplacementAfterConsumer { old, replacement: replacement.node(), consumer });
        }
        let mut editor = Editor::new(self);
        editor.substitute(old, replacement);
        Ok(editor.finish())
    }

    /// Replace the gate at `old` by `node` in place and sweep whatever part of
    /// the old cone is no longer referenced.
    pub fn replace_node(&self, old: NodeId, node: XmgNode) -> Result<XmgNetlist, XmgError> {
        if !self.contains(old) {
            return Err(XmgError::UnknownNode(old));
        }
        if !self.is_op(old) {
            return Err(XmgError::NotAnOperation(old));
        }
        for f in node.fanins {
            if f.node() >= old {
                return Err(XmgError::NonTopological { node: old, fanin: f.node() });
            }
        }
        let mut editor = Editor::new(self);
        editor.replace_gate(old, node);
        Ok(editor.finish())
    }

    /// Merge structurally identical nodes. MAJ fan-ins are sorted; XOR
    /// fan-ins are stripped of complements (parity moves to the output) and
    /// sorted. Unreferenced nodes are dropped.
    pub fn strash(&self) -> XmgNetlist {
        self.rebuild(BuilderOptions { hash: true, simplify: false }, |b, node, fanins, _| b.gate(node.kind, fanins))
    }

    /// Drop operation nodes that no PO depends on.
    pub fn sweep_dangling(&self) -> XmgNetlist {
        let mut live = vec![false; self.num_ids()];
        for po in &self.pos {
            live[po.node().index()] = true;
        }
        for id in self.op_ids().collect::<Vec<_>>().into_iter().rev() {
            if live[id.index()] {
                for f in self.node(id).unwrap().fanins {
                    live[f.node().index()] = true;
                }
            }
        }
        if self.op_ids().all(|id| live[id.index()]) {
            return self.clone();
        }
        let keep: Vec<NodeId> = self.op_ids().filter(|id| live[id.index()]).collect();
        self.retain_ordered(&keep)
    }

    /// True when every operation node is in the transitive fan-in of a PO.
    pub fn is_swept(&self) -> bool {
        self.sweep_dangling().size() == self.size()
    }

    /// Keep only the listed operation nodes (ascending, closed under fan-in)
    /// and re-index densely.
    pub(crate) fn retain_ordered(&self, keep: &[NodeId]) -> XmgNetlist {
        let mut map: Vec<Option<Edge>> = vec![None; self.num_ids()];
        for id in 0..=self.num_pis {
            map[id] = Some(Edge::plain(NodeId(id as u32)));
        }
        let mut nodes = Vec::with_capacity(keep.len());
        for &id in keep {
            let node = self.node(id).unwrap();
            let fanins = node
                .fanins
                .map(|f| map[f.node().index()].expect("retained set not closed under fan-in").complement_if(f.is_complemented()));
            let new_id = NodeId((self.num_pis + 1 + nodes.len()) as u32);
            nodes.push(XmgNode { kind: node.kind, fanins });
            map[id.index()] = Some(Edge::plain(new_id));
        }
        let pos =
            self.pos.iter().map(|po| map[po.node().index()].expect("PO driver removed").complement_if(po.is_complemented())).collect();
        XmgNetlist::from_parts_unchecked(self.name.clone(), self.num_pis, nodes, pos)
    }

    /// Re-index operation nodes to follow `order`, which must be a
    /// topological permutation of all operation nodes.
    pub fn reorder(&self, order: &[NodeId]) -> Result<XmgNetlist, XmgError> {
        if order.len() != self.size() {
            return Err(XmgError::BadOrder);
        }
        let mut map: Vec<Option<Edge>> = vec![None; self.num_ids()];
        for id in 0..=self.num_pis {
            map[id] = Some(Edge::plain(NodeId(id as u32)));
        }
        let mut nodes = Vec::with_capacity(order.len());
        for &id in order {
            if !self.is_op(id) || map[id.index()].is_some() {
                return Err(XmgError::BadOrder);
            }
            let node = self.node(id).unwrap();
            let mut fanins = [Edge::ZERO; 3];
            for (slot, f) in node.fanins.iter().enumerate() {
                fanins[slot] =
                    map[f.node().index()].ok_or(XmgError::NonTopological { node: id, fanin: f.node() })?.complement_if(f.is_complemented());
            }
            let new_id = NodeId((self.num_pis + 1 + nodes.len()) as u32);
            nodes.push(XmgNode { kind: node.kind, fanins });
            map[id.index()] = Some(Edge::plain(new_id));
        }
        let pos = self.pos.iter().map(|po| map[po.node().index()].unwrap().complement_if(po.is_complemented())).collect();
        Ok(XmgNetlist::from_parts_unchecked(self.name.clone(), self.num_pis, nodes, pos))
    }

    /// Rebuild the netlist through a fresh builder, mapping every operation
    /// with `f` in index order. `f` receives the builder, the old node, its
    /// mapped fan-ins and the old-id to new-edge map built so far. Dangling
    /// results are swept.
    pub(crate) fn rebuild<F>(&self, options: BuilderOptions, mut f: F) -> XmgNetlist
    where
        F: FnMut(&mut XmgBuilder, &XmgNode, [Edge; 3], &[Edge]) -> Edge,
    {
        let mut b = XmgBuilder::with_options(self.name.clone(), self.num_pis, options);
        let mut map: Vec<Edge> = Vec::with_capacity(self.num_ids());
        for id in 0..=self.num_pis {
            map.push(Edge::plain(NodeId(id as u32)));
        }
        for node in &self.nodes {
            let fanins = node.fanins.map(|e| map[e.node().index()].complement_if(e.is_complemented()));
            let out = f(&mut b, node, fanins, &map);
            map.push(out);
        }
        for po in &self.pos {
            b.add_po(map[po.node().index()].complement_if(po.is_complemented()));
        }
        b.build()
    }

    /// Stable structural fingerprint (independent of the name).
    pub fn structural_hash(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.num_pis.hash(&mut h);
        self.nodes.hash(&mut h);
        self.pos.hash(&mut h);
        h.finish()
    }

    /// Ids of operation nodes that drive some PO, deduplicated.
    pub fn po_driver_ops(&self) -> BTreeSet<NodeId> {
        self.pos.iter().map(|e| e.node()).filter(|&n| self.is_op(n)).collect()
    }

    /// Evaluate all POs for one input assignment.
    pub fn eval(&self, pis: &[bool]) -> Vec<bool> {
        assert_eq!(pis.len(), self.num_pis);
        let mut val = Vec::with_capacity(self.num_ids());
        val.push(false);
        val.extend_from_slice(pis);
        for node in &self.nodes {
            let v = node.fanins.map(|e| val[e.node().index()] ^ e.is_complemented());
            val.push(node.kind.eval(v[0], v[1], v[2]));
        }
        self.pos.iter().map(|e| val[e.node().index()] ^ e.is_complemented()).collect()
    }
}

#[cfg(test)]
mod tests;
