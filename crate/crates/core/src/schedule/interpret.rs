use thiserror::Error;

use crate::io::{InstructionSequence, Opcode, Operand};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InterpretError {
    #[error("expected {expected} PI words, got {got}")]
    PiCount { expected: usize, got: usize },
    #[error("clock {clock}: row {row} is outside the {rows} available rows")]
    RowOutOfRange { clock: usize, row: usize, rows: usize },
    #[error("clock {clock}: row {row} read before it was written")]
    ReadBeforeWrite { clock: usize, row: usize },
    #[error("clock {clock}: operand row {row} is not in the destination array")]
    CrossArray { clock: usize, row: usize },
    #[error("clock {clock}: {op} expects {expected} operands")]
    Arity { clock: usize, op: &'static str, expected: usize },
    #[error("PO reads row {row}, which was never written")]
    UnwrittenPo { row: usize },
}

/// Replay `seq` on modeled arrays. Each row holds one 64-bit word, i.e. 64
/// input patterns side by side; `pis[k]` is the word preloaded into PI
/// `k`'s row. Returns one word per PO.
pub fn interpret(seq: &InstructionSequence, pis: &[u64]) -> Result<Vec<u64>, InterpretError> {
    if pis.len() != seq.pi_rows.len() {
        return Err(InterpretError::PiCount { expected: seq.pi_rows.len(), got: pis.len() });
    }
    let rows = seq.rows_per_array * seq.arrays;
    let mut mem: Vec<Option<u64>> = vec![None; rows + 1];
    let check = |clock: usize, row: usize| {
        if row == 0 || row > rows {
            Err(InterpretError::RowOutOfRange { clock, row, rows })
        } else {
            Ok(())
        }
    };
    for (&row, &v) in seq.pi_rows.iter().zip(pis) {
        check(0, row)?;
        mem[row] = Some(v);
    }
    let array = |row: usize| (row - 1) / seq.rows_per_array.max(1);
    for ins in &seq.instructions {
        let clock = ins.clock;
        if ins.src.len() != ins.op.arity() {
            return Err(InterpretError::Arity { clock, op: ins.op.name(), expected: ins.op.arity() });
        }
        check(clock, ins.dest)?;
        let mut vals = [0u64; 3];
        for (k, s) in ins.src.iter().enumerate() {
            vals[k] = match *s {
                Operand::Const(b) => {
                    if b {
                        !0
                    } else {
                        0
                    }
                }
                Operand::Row { row, complemented } => {
                    check(clock, row)?;
                    if ins.op != Opcode::Copy && array(row) != array(ins.dest) {
                        return Err(InterpretError::CrossArray { clock, row });
                    }
                    let v = mem[row].ok_or(InterpretError::ReadBeforeWrite { clock, row })?;
                    if complemented {
                        !v
                    } else {
                        v
                    }
                }
            };
        }
        let [a, b, c] = vals;
        mem[ins.dest] = Some(match ins.op {
            Opcode::Maj => (a & b) | (a & c) | (b & c),
            Opcode::Xor => a ^ b ^ c,
            Opcode::Copy => a,
        });
    }
    seq.pos
        .iter()
        .map(|po| match *po {
            Operand::Const(b) => Ok(if b { !0 } else { 0 }),
            Operand::Row { row, complemented } => {
                let v = mem.get(row).copied().flatten().ok_or(InterpretError::UnwrittenPo { row })?;
                Ok(if complemented { !v } else { v })
            }
        })
        .collect()
}
