//! Line-per-node XMG format:
//!
//! ```text
//! .name example
//! .pis 3
//! .pos 1
//! N1 = MAJ(x1, x2, 0)
//! N2 = XOR(N1, !x3, 0)
//! PO0 = !N2
//! ```
//!
//! `x<k>` is PI `k` (1-based), `N<t>` the operation at position `t`, `0` and
//! `1` the constants and `!` a complemented edge. Operations must appear in
//! order N1, N2, ... and may only read earlier signals.

use std::fmt::Write;

use super::ParseError;
use crate::xmg::{Edge, GateKind, NodeId, XmgNetlist, XmgNode};

pub(crate) fn edge_name(net: &XmgNetlist, e: Edge) -> String {
    let bang = if e.is_complemented() { "!" } else { "" };
    let n = e.node();
    if n == NodeId::CONST0 {
        return if e.is_complemented() { "1".into() } else { "0".into() };
    }
    if net.is_pi(n) {
        format!("{bang}x{}", n.index())
    } else {
        format!("{bang}N{}", n.index() - net.num_pis())
    }
}

pub fn write_xmg(net: &XmgNetlist) -> String {
    let mut out = String::new();
    writeln!(out, ".name {}", net.name()).unwrap();
    writeln!(out, ".pis {}", net.num_pis()).unwrap();
    writeln!(out, ".pos {}", net.pos().len()).unwrap();
    for id in net.op_ids() {
        let n = net.node(id).unwrap();
        let f = n.fanins.map(|e| edge_name(net, e));
        writeln!(out, "N{} = {}({}, {}, {})", id.index() - net.num_pis(), n.kind.name(), f[0], f[1], f[2]).unwrap();
    }
    for (i, &po) in net.pos().iter().enumerate() {
        writeln!(out, "PO{i} = {}", edge_name(net, po)).unwrap();
    }
    out
}

fn header<'a>(line: usize, text: Option<&'a str>, key: &str) -> Result<&'a str, ParseError> {
    text.and_then(|t| t.strip_prefix(key)).map(str::trim).ok_or_else(|| ParseError::new(line, format!("expected '{key}'")))
}

fn parse_edge(line: usize, s: &str, num_pis: usize, num_ops: usize) -> Result<Edge, ParseError> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('!') {
        Some(rest) => (true, rest.trim()),
        None => (false, s),
    };
    let bad = || ParseError::new(line, format!("bad signal '{s}'"));
    let node = match body {
        "0" => NodeId::CONST0,
        "1" => return if neg { Ok(Edge::ZERO) } else { Ok(Edge::ONE) },
        _ if body.starts_with('x') => {
            let k: usize = body[1..].parse().map_err(|_| bad())?;
            if k == 0 || k > num_pis {
                return Err(ParseError::new(line, format!("PI '{body}' out of range")));
            }
            NodeId(k as u32)
        }
        _ if body.starts_with('N') => {
            let t: usize = body[1..].parse().map_err(|_| bad())?;
            if t == 0 || t > num_ops {
                return Err(ParseError::new(line, format!("'{body}' is not defined yet")));
            }
            NodeId((num_pis + t) as u32)
        }
        _ => return Err(bad()),
    };
    Ok(Edge::new(node, neg))
}

pub fn parse_xmg(text: &str) -> Result<XmgNetlist, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.split('#').next().unwrap().trim())).filter(|(_, l)| !l.is_empty());
    let mut next = || lines.next().map_or((0, None), |(i, l)| (i, Some(l)));
    let (ln, l) = next();
    let name = header(ln, l, ".name")?.to_string();
    let (ln, l) = next();
    let num_pis: usize = header(ln, l, ".pis")?.parse().map_err(|_| ParseError::new(ln, "bad PI count"))?;
    let (ln, l) = next();
    let num_pos: usize = header(ln, l, ".pos")?.parse().map_err(|_| ParseError::new(ln, "bad PO count"))?;
    let mut nodes = Vec::new();
    let mut pos = Vec::new();
    loop {
        let (ln, l) = next();
        let Some(l) = l else { break };
        let (lhs, rhs) = l.split_once('=').ok_or_else(|| ParseError::new(ln, "expected '<name> = <expr>'"))?;
        let (lhs, rhs) = (lhs.trim(), rhs.trim());
        if let Some(idx) = lhs.strip_prefix("PO") {
            if idx.parse::<usize>().ok() != Some(pos.len()) {
                return Err(ParseError::new(ln, format!("expected PO{}", pos.len())));
            }
            pos.push(parse_edge(ln, rhs, num_pis, nodes.len())?);
            continue;
        }
        if !pos.is_empty() {
            return Err(ParseError::new(ln, "operations must precede POs"));
        }
        if lhs.strip_prefix('N').and_then(|t| t.parse::<usize>().ok()) != Some(nodes.len() + 1) {
            return Err(ParseError::new(ln, format!("expected N{}", nodes.len() + 1)));
        }
        let (op, args) =
            rhs.strip_suffix(')').and_then(|r| r.split_once('(')).ok_or_else(|| ParseError::new(ln, "expected OP(a, b, c)"))?;
        let kind = match op.trim() {
            "MAJ" => GateKind::Maj,
            "XOR" => GateKind::Xor,
            other => return Err(ParseError::new(ln, format!("unknown operation '{other}'"))),
        };
        let args: Vec<&str> = args.split(',').collect();
        if args.len() != 3 {
            return Err(ParseError::new(ln, "operations take three arguments"));
        }
        let mut f = [Edge::ZERO; 3];
        for (k, a) in args.iter().enumerate() {
            f[k] = parse_edge(ln, a, num_pis, nodes.len())?;
        }
        nodes.push(XmgNode { kind, fanins: f });
    }
    if pos.len() != num_pos {
        return Err(ParseError::new(0, format!("header declares {num_pos} POs, found {}", pos.len())));
    }
    XmgNetlist::new(name, num_pis, nodes, pos).map_err(|e| ParseError::new(0, e.to_string()))
}
