//! Instruction sequences for the memory arrays.
//!
//! Text form:
//!
//! ```text
//! .rows_per_array 256
//! .arrays 1
//! .pis R1 R2 R3
//! .pos R5 !R4 0
//! 1: R4 <- MAJ(R1, R2, 0)
//! 2: R5 <- XOR(R4, !R3, 1)
//! ```
//!
//! Rows are numbered globally from 1; `0` and `1` are constant operands.
//! `COPY` moves one row into another array.

use std::fmt::{self, Write};

use serde::{Deserialize, Serialize};

use super::ParseError;
use crate::edp::ArrayPlacement;
use crate::schedule::ScheduledNetlist;
use crate::xmg::GateKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Opcode {
    Maj,
    Xor,
    Copy,
}

impl Opcode {
    pub fn name(self) -> &'static str {
        match self {
            Opcode::Maj => "MAJ",
            Opcode::Xor => "XOR",
            Opcode::Copy => "COPY",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Opcode::Copy => 1,
            _ => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Operand {
    Row { row: usize, complemented: bool },
    Const(bool),
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Operand::Row { row, complemented } => write!(f, "{}R{row}", if complemented { "!" } else { "" }),
            Operand::Const(b) => write!(f, "{}", b as u8),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instruction {
    pub clock: usize,
    pub op: Opcode,
    pub dest: usize,
    pub src: Vec<Operand>,
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: R{} <- {}(", self.clock, self.dest, self.op.name())?;
        for (i, s) in self.src.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str(")")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstructionSequence {
    pub rows_per_array: usize,
    pub arrays: usize,
    /// Row preloaded with each PI, in PI order.
    pub pi_rows: Vec<usize>,
    pub pos: Vec<Operand>,
    pub instructions: Vec<Instruction>,
}

impl InstructionSequence {
    pub fn copy_count(&self) -> usize {
        self.instructions.iter().filter(|i| i.op == Opcode::Copy).count()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, ".rows_per_array {}", self.rows_per_array).unwrap();
        writeln!(out, ".arrays {}", self.arrays).unwrap();
        let pis: Vec<String> = self.pi_rows.iter().map(|r| format!("R{r}")).collect();
        writeln!(out, ".pis {}", pis.join(" ")).unwrap();
        let pos: Vec<String> = self.pos.iter().map(|o| o.to_string()).collect();
        writeln!(out, ".pos {}", pos.join(" ")).unwrap();
        for i in &self.instructions {
            writeln!(out, "{i}").unwrap();
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instructions serialize")
    }

    pub fn from_json(text: &str) -> Result<InstructionSequence, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// One instruction per operation in cycle order, each preceded by the COPY
/// instructions the placement lists for that cycle.
pub fn emit_instructions(design: &ScheduledNetlist, placement: &ArrayPlacement) -> InstructionSequence {
    let net = design.netlist();
    let operand = |e: crate::Edge, redirect: &[(usize, usize)]| match placement.row_of(design, e.node()) {
        None => Operand::Const(e.is_complemented()),
        Some(r) => {
            let row = redirect.iter().find(|(src, _)| *src == r).map_or(r, |&(_, d)| d);
            Operand::Row { row, complemented: e.is_complemented() }
        }
    };
    let mut instructions = Vec::with_capacity(net.size() + placement.copies.len());
    let mut copies = placement.copies.iter().peekable();
    for id in net.op_ids() {
        let t = net.cycle_of(id).unwrap();
        let mut redirect = Vec::new();
        while let Some(c) = copies.next_if(|c| c.cycle == t) {
            instructions.push(Instruction {
                clock: instructions.len() + 1,
                op: Opcode::Copy,
                dest: c.dest_row,
                src: vec![Operand::Row { row: c.src_row, complemented: false }],
            });
            redirect.push((c.src_row, c.dest_row));
        }
        let node = net.node(id).unwrap();
        instructions.push(Instruction {
            clock: instructions.len() + 1,
            op: match node.kind {
                GateKind::Maj => Opcode::Maj,
                GateKind::Xor => Opcode::Xor,
            },
            dest: placement.slot_row(design.slot_at(t)),
            src: node.fanins.iter().map(|&e| operand(e, &redirect)).collect(),
        });
    }
    InstructionSequence {
        rows_per_array: placement.rows_per_array,
        arrays: placement.arrays,
        pi_rows: (1..=net.num_pis()).map(|k| placement.pi_row(k)).collect(),
        pos: net.pos().iter().map(|&e| operand(e, &[])).collect(),
        instructions,
    }
}

fn parse_operand(line: usize, s: &str) -> Result<Operand, ParseError> {
    let s = s.trim();
    match s {
        "0" => return Ok(Operand::Const(false)),
        "1" => return Ok(Operand::Const(true)),
        _ => {}
    }
    let (complemented, body) = match s.strip_prefix('!') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let row = body
        .strip_prefix('R')
        .and_then(|r| r.parse::<usize>().ok())
        .filter(|&r| r > 0)
        .ok_or_else(|| ParseError::new(line, format!("bad operand '{s}'")))?;
    Ok(Operand::Row { row, complemented })
}

fn parse_row(line: usize, s: &str) -> Result<usize, ParseError> {
    match parse_operand(line, s)? {
        Operand::Row { row, complemented: false } => Ok(row),
        _ => Err(ParseError::new(line, format!("expected a plain row, got '{s}'"))),
    }
}

pub fn parse_instructions(text: &str) -> Result<InstructionSequence, ParseError> {
    let mut seq = InstructionSequence { rows_per_array: 0, arrays: 0, pi_rows: Vec::new(), pos: Vec::new(), instructions: Vec::new() };
    let mut seen = [false; 4];
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('.') {
            let (key, val) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
            let num = || val.trim().parse::<usize>().map_err(|_| ParseError::new(ln, format!("bad value for .{key}")));
            match key {
                "rows_per_array" => (seq.rows_per_array, seen[0]) = (num()?, true),
                "arrays" => (seq.arrays, seen[1]) = (num()?, true),
                "pis" => {
                    seq.pi_rows = val.split_whitespace().map(|s| parse_row(ln, s)).collect::<Result<_, _>>()?;
                    seen[2] = true;
                }
                "pos" => {
                    seq.pos = val.split_whitespace().map(|s| parse_operand(ln, s)).collect::<Result<_, _>>()?;
                    seen[3] = true;
                }
                _ => return Err(ParseError::new(ln, format!("unknown directive .{key}"))),
            }
            continue;
        }
        let (clock, rest) = line.split_once(':').ok_or_else(|| ParseError::new(ln, "expected '<clock>: R<d> <- OP(...)'"))?;
        let clock: usize = clock.trim().parse().map_err(|_| ParseError::new(ln, "bad clock"))?;
        if clock != seq.instructions.len() + 1 {
            return Err(ParseError::new(ln, format!("expected clock {}", seq.instructions.len() + 1)));
        }
        let (dest, expr) = rest.split_once("<-").ok_or_else(|| ParseError::new(ln, "missing '<-'"))?;
        let dest = parse_row(ln, dest)?;
        let (op, args) =
            expr.trim().strip_suffix(')').and_then(|e| e.split_once('(')).ok_or_else(|| ParseError::new(ln, "expected OP(...)"))?;
        let op = match op.trim() {
            "MAJ" => Opcode::Maj,
            "XOR" => Opcode::Xor,
            "COPY" => Opcode::Copy,
            other => return Err(ParseError::new(ln, format!("unknown opcode '{other}'"))),
        };
        let src: Vec<Operand> = args.split(',').map(|a| parse_operand(ln, a)).collect::<Result<_, _>>()?;
        if src.len() != op.arity() {
            return Err(ParseError::new(ln, format!("{} takes {} operands", op.name(), op.arity())));
        }
        seq.instructions.push(Instruction { clock, op, dest, src });
    }
    if let Some(k) = seen.iter().position(|s| !s) {
        let key = ["rows_per_array", "arrays", "pis", "pos"][k];
        return Err(ParseError::new(0, format!("missing .{key}")));
    }
    Ok(seq)
}
