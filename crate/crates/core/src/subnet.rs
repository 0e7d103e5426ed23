//! Critical sub-netlists: the operations of a scheduled design inside a
//! window of cycles, cut out as a standalone netlist and spliced back after
//! optimization.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::schedule::{PeakWindow, ScheduledNetlist};
use crate::sim::{equivalent_netlists, Validation, Validator};
use crate::xmg::{Edge, NodeId, XmgBuilder, XmgNetlist};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SubnetError {
    #[error("empty window")]
    EmptyWindow,
    #[error("window [{m}, {n}] outside cycles 1..={size}")]
    WindowOutOfRange { m: usize, n: usize, size: usize },
    #[error("replacement has {pis} PIs and {pos} POs, expected {want_pis} and {want_pos}")]
    InterfaceMismatch { pis: usize, pos: usize, want_pis: usize, want_pos: usize },
    #[error("replacement is not equivalent on the boundary ({0:?})")]
    NotEquivalent(Validation),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubNetlist {
    pub netlist: XmgNetlist,
    /// Parent node behind each sub-PI, in sub-PI order (ascending).
    pub boundary_pis: Vec<NodeId>,
    /// Parent operation behind each sub-PO, ascending.
    pub boundary_pos: Vec<NodeId>,
    pub window: PeakWindow,
    /// Sub-PIs (sub ids) that are parent operations read only inside the
    /// window, so their rows can be released during it.
    pub temporaries: BTreeSet<NodeId>,
    /// Rows held in the parent throughout the window by values that are not
    /// the sub-netlist's to release: earlier results still needed after the
    /// window, and earlier PO drivers.
    pub base_load: usize,
}

impl SubNetlist {
    pub fn size(&self) -> usize {
        self.netlist.size()
    }
}

/// Cut the operations scheduled in `window.m..=window.n` out of `design`.
pub fn extract(design: &ScheduledNetlist, window: &PeakWindow) -> Result<SubNetlist, SubnetError> {
    let net = design.netlist();
    let (m, n) = (window.m, window.n);
    if window.is_empty() || m > n {
        return Err(SubnetError::EmptyWindow);
    }
    if m == 0 || n > net.size() {
        return Err(SubnetError::WindowOutOfRange { m, n, size: net.size() });
    }
    let inside = |id: NodeId| net.cycle_of(id).is_some_and(|t| (m..=n).contains(&t));
    let fanouts = net.fanout_lists();
    let is_po = net.po_flags();
    let used_after = |id: NodeId| is_po[id.index()] || fanouts[id.index()].iter().any(|&c| net.cycle_of(c).unwrap() > n);

    let ops: Vec<NodeId> = (m..=n).map(|t| net.node_at_cycle(t).unwrap()).collect();
    let mut inputs: BTreeSet<NodeId> = BTreeSet::new();
    for &id in &ops {
        for f in net.node(id).unwrap().fanins {
            if !f.is_const() && !inside(f.node()) {
                inputs.insert(f.node());
            }
        }
    }
    let boundary_pis: Vec<NodeId> = inputs.into_iter().collect();
    let boundary_pos: Vec<NodeId> = ops.iter().copied().filter(|&id| used_after(id)).collect();

    let mut b = XmgBuilder::raw(format!("{}_sub", net.name()), boundary_pis.len());
    let mut map: Vec<Option<Edge>> = vec![None; net.num_ids()];
    map[0] = Some(Edge::ZERO);
    let mut temporaries = BTreeSet::new();
    for (k, &id) in boundary_pis.iter().enumerate() {
        map[id.index()] = Some(b.pi(k));
        if net.is_op(id) && !used_after(id) {
            temporaries.insert(b.pi(k).node());
        }
    }
    for &id in &ops {
        let node = net.node(id).unwrap();
        let f = node.fanins.map(|e| map[e.node().index()].unwrap().complement_if(e.is_complemented()));
        map[id.index()] = Some(b.gate(node.kind, f));
    }
    for &id in &boundary_pos {
        b.add_po(map[id.index()].unwrap());
    }
    let base_load = net.op_ids().take(m - 1).filter(|&id| used_after(id)).count();
    Ok(SubNetlist { netlist: b.build_unswept(), boundary_pis, boundary_pos, window: *window, temporaries, base_load })
}

/// Replace the window of `design` with `optimized`, which must compute the
/// same boundary functions. Operations are laid out as the parent's
/// pre-window operations, then `optimized` in its own order, then the
/// parent's post-window operations. Parent operations left without
/// consumers are dropped.
pub fn reinsert(design: &ScheduledNetlist, sub: &SubNetlist, optimized: &ScheduledNetlist) -> Result<XmgNetlist, SubnetError> {
    let opt = optimized.netlist();
    if opt.num_pis() != sub.netlist.num_pis() || opt.pos().len() != sub.netlist.pos().len() {
        return Err(SubnetError::InterfaceMismatch {
            pis: opt.num_pis(),
            pos: opt.pos().len(),
            want_pis: sub.netlist.num_pis(),
            want_pos: sub.netlist.pos().len(),
        });
    }
    match equivalent_netlists(&sub.netlist, opt, &Validator::default()) {
        Validation::Equivalent => {}
        v => return Err(SubnetError::NotEquivalent(v)),
    }

    let net = design.netlist();
    let (m, n) = (sub.window.m, sub.window.n);
    let mut b = XmgBuilder::raw(net.name(), net.num_pis());
    let mut map: Vec<Option<Edge>> = vec![None; net.num_ids()];
    for id in 0..=net.num_pis() {
        map[id] = Some(Edge::plain(NodeId(id as u32)));
    }
    let copy = |b: &mut XmgBuilder, map: &mut Vec<Option<Edge>>, id: NodeId| {
        let node = net.node(id).unwrap();
        let f = node.fanins.map(|e| map[e.node().index()].expect("topological").complement_if(e.is_complemented()));
        map[id.index()] = Some(b.gate(node.kind, f));
    };
    for t in 1..m {
        copy(&mut b, &mut map, net.node_at_cycle(t).unwrap());
    }
    let mut sub_map: Vec<Edge> = Vec::with_capacity(opt.num_ids());
    sub_map.push(Edge::ZERO);
    for &pi in &sub.boundary_pis {
        sub_map.push(map[pi.index()].unwrap());
    }
    for id in opt.op_ids() {
        let node = opt.node(id).unwrap();
        let f = node.fanins.map(|e| sub_map[e.node().index()].complement_if(e.is_complemented()));
        sub_map.push(b.gate(node.kind, f));
    }
    for (k, &parent) in sub.boundary_pos.iter().enumerate() {
        let po = opt.pos()[k];
        map[parent.index()] = Some(sub_map[po.node().index()].complement_if(po.is_complemented()));
    }
    for t in n + 1..=net.size() {
        copy(&mut b, &mut map, net.node_at_cycle(t).unwrap());
    }
    for po in net.pos() {
        b.add_po(map[po.node().index()].unwrap().complement_if(po.is_complemented()));
    }
    Ok(b.build())
}

/// Scheduling bound for a design of `new_size` operations to become
/// Pareto-optimal: take the frontier point with the largest size not above
/// `new_size` (smaller MF on ties) and relax one less than its MF by
/// `beta`. `None` means unbounded.
pub fn pareto_mf_bound(frontier: impl IntoIterator<Item = (usize, usize)>, new_size: usize, beta: f64) -> Option<usize> {
    let (_, mf) = frontier.into_iter().filter(|&(size, _)| size <= new_size).max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)))?;
    let bound = beta * (mf as f64 - 1.0);
    Some((bound - 1e-9).ceil().max(0.0) as usize)
}
