//! Iterative logic compiler for SIMD in-memory computing.
//!
//! A combinational function is synthesized into an XOR-majority graph,
//! scheduled onto memory rows, and then improved for several rounds by
//! re-synthesizing the sub-netlist around the memory peak and by
//! footprint-oriented resubstitution. Every explored design is kept on a
//! Pareto frontier over (netlist size, memory footprint) and the final
//! design is chosen from it by array capacity and estimated energy-delay
//! product.

pub mod edp;
pub mod io;
pub mod mfresub;
pub mod opt;
pub mod pareto;
pub mod random;
pub mod sat;
pub mod schedule;
pub mod sim;
pub mod subnet;
pub mod xmg;

pub use edp::{CostModel, EdpBreakdown};
pub use mfresub::{mfresub, MfResubOutcome, ResubCategory};
pub use opt::{PassId, PassKind};
pub use pareto::{run, select_final, Compilation, CompilerConfig, Design, ParetoSet};
pub use schedule::{MemoryUsageTrace, PeakWindow, ScheduledNetlist};
pub use xmg::{Edge, GateKind, NodeId, XmgBuilder, XmgNetlist, XmgNode};

#[cfg(test)]
pub(crate) mod test_util;
