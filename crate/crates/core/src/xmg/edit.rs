use super::{Edge, NodeId, XmgNetlist, XmgNode};

/// Mutable working copy of a netlist with reference counts and lazy fan-out
/// lists. Node ids stay stable while editing; `finish` compacts.
///
/// Edits must keep the graph topological: a replacement edge always points
/// to a node that precedes every consumer it is wired into.
#[derive(Clone, Debug)]
pub(crate) struct Editor {
    name: String,
    num_pis: usize,
    nodes: Vec<XmgNode>,
    alive: Vec<bool>,
    refs: Vec<u32>,
    fanouts: Vec<Vec<NodeId>>,
    pos: Vec<Edge>,
}

impl Editor {
    pub fn new(netlist: &XmgNetlist) -> Editor {
        let refs = netlist.reference_counts();
        let fanouts = netlist.fanout_lists();
        Editor {
            name: netlist.name.clone(),
            num_pis: netlist.num_pis,
            nodes: netlist.nodes.clone(),
            alive: vec![true; netlist.nodes.len()],
            refs,
            fanouts,
            pos: netlist.pos.clone(),
        }
    }

    fn slot(&self, id: NodeId) -> Option<usize> {
        id.index().checked_sub(self.num_pis + 1).filter(|&i| i < self.nodes.len())
    }

    pub fn is_op(&self, id: NodeId) -> bool {
        self.slot(id).is_some()
    }

    pub fn is_alive(&self, id: NodeId) -> bool {
        self.slot(id).map_or(true, |i| self.alive[i])
    }

    pub fn node(&self, id: NodeId) -> Option<&XmgNode> {
        self.slot(id).filter(|&i| self.alive[i]).map(|i| &self.nodes[i])
    }

    pub fn num_ids(&self) -> usize {
        1 + self.num_pis + self.nodes.len()
    }

    /// Live consumers of `id`, deduplicated.
    pub fn consumers(&self, id: NodeId) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = self.fanouts[id.index()]
            .iter()
            .copied()
            .filter(|&c| self.node(c).is_some_and(|n| n.fanins.iter().any(|f| f.node() == id)))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Nodes that would be removed if `root` lost all its references,
    /// excluding those still needed by `keep` fan-ins.
    pub fn mffc_with_kept(&mut self, root: NodeId, keep: &[Edge]) -> Vec<NodeId> {
        for k in keep {
            self.refs[k.node().index()] += 1;
        }
        let mut cone = vec![root];
        let mut touched = Vec::new();
        let mut i = 0;
        while i < cone.len() {
            let id = cone[i];
            i += 1;
            for f in self.node(id).unwrap().fanins {
                let n = f.node();
                if !self.is_op(n) {
                    continue;
                }
                self.refs[n.index()] -= 1;
                touched.push(n);
                if self.refs[n.index()] == 0 {
                    cone.push(n);
                }
            }
        }
        for n in touched {
            self.refs[n.index()] += 1;
        }
        for k in keep {
            self.refs[k.node().index()] -= 1;
        }
        cone
    }

    fn add_ref(&mut self, e: Edge, consumer: Option<NodeId>) {
        self.refs[e.node().index()] += 1;
        if let Some(c) = consumer {
            self.fanouts[e.node().index()].push(c);
        }
    }

    /// Drop one reference to `id`; delete it (and recursively its fan-ins)
    /// when it becomes unreferenced. Returns the number of deleted nodes.
    fn release(&mut self, id: NodeId) -> usize {
        self.refs[id.index()] -= 1;
        if self.refs[id.index()] == 0 && self.is_op(id) && self.is_alive(id) {
            self.kill(id)
        } else {
            0
        }
    }

    fn kill(&mut self, id: NodeId) -> usize {
        let slot = self.slot(id).unwrap();
        self.alive[slot] = false;
        let mut removed = 1;
        for f in self.nodes[slot].fanins {
            removed += self.release(f.node());
        }
        removed
    }

    /// Rewire all consumers of `old` to `replacement` and delete the part of
    /// the cone of `old` that becomes unreferenced.
    pub fn substitute(&mut self, old: NodeId, replacement: Edge) -> usize {
        debug_assert!(self.node(old).is_some());
        for c in self.consumers(old) {
            debug_assert!(c > replacement.node());
            let slot = self.slot(c).unwrap();
            for k in 0..3 {
                let f = self.nodes[slot].fanins[k];
                if f.node() == old {
                    self.nodes[slot].fanins[k] = replacement.complement_if(f.is_complemented());
                    self.add_ref(replacement, Some(c));
                    self.refs[old.index()] -= 1;
                }
            }
        }
        for k in 0..self.pos.len() {
            let po = self.pos[k];
            if po.node() == old {
                self.pos[k] = replacement.complement_if(po.is_complemented());
                self.add_ref(replacement, None);
                self.refs[old.index()] -= 1;
            }
        }
        debug_assert_eq!(self.refs[old.index()], 0);
        self.kill(old)
    }

    /// Replace the gate stored at `id` in place. Fan-ins of the new gate are
    /// referenced before the old ones are released, so shared logic survives.
    pub fn replace_gate(&mut self, id: NodeId, node: XmgNode) -> usize {
        let slot = self.slot(id).unwrap();
        debug_assert!(self.alive[slot]);
        for f in node.fanins {
            debug_assert!(f.node() < id);
            self.add_ref(f, Some(id));
        }
        let old = std::mem::replace(&mut self.nodes[slot], node);
        let mut removed = 0;
        for f in old.fanins {
            removed += self.release(f.node());
        }
        removed
    }

    /// Compact to a netlist, re-indexing surviving nodes in order.
    pub fn finish(self) -> XmgNetlist {
        let mut map: Vec<Option<Edge>> = vec![None; self.num_ids()];
        for id in 0..=self.num_pis {
            map[id] = Some(Edge::plain(NodeId(id as u32)));
        }
        let mut nodes = Vec::with_capacity(self.nodes.len());
        for (slot, node) in self.nodes.iter().enumerate() {
            if !self.alive[slot] {
                continue;
            }
            let fanins =
                node.fanins.map(|f| map[f.node().index()].expect("edit left a dangling reference").complement_if(f.is_complemented()));
            let new_id = NodeId((self.num_pis + 1 + nodes.len()) as u32);
            nodes.push(XmgNode { kind: node.kind, fanins });
            map[self.num_pis + 1 + slot] = Some(Edge::plain(new_id));
        }
        let pos =
            self.pos.iter().map(|po| map[po.node().index()].expect("PO driver removed").complement_if(po.is_complemented())).collect();
        XmgNetlist::from_parts_unchecked(self.name, self.num_pis, nodes, pos)
    }
}
