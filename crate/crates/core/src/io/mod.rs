//! Readers and writers: ASCII AIGER input, the XMG text format, instruction
//! sequences and JSON reports.

use thiserror::Error;

mod aiger;
mod instr;
mod report;
mod text;

pub use aiger::parse_aiger;
pub use instr::{emit_instructions, parse_instructions, Instruction, InstructionSequence, Opcode, Operand};
pub use report::{parse_report, write_report, DesignRecord, Report, RoundRecord, TracePoint};
pub use text::{parse_xmg, write_xmg};

/// Parse failure with a 1-based line number (0 when the input ends early).
#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, message: impl Into<String>) -> ParseError {
        ParseError { line, message: message.into() }
    }
}
