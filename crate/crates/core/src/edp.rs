//! Energy-delay estimates under an instruction cost model, including the
//! COPY instructions needed when a design spans several memory arrays.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::schedule::ScheduledNetlist;
use crate::xmg::NodeId;

/// Rows reserved per array as COPY targets when a design spans arrays. An
/// operation has at most three foreign fan-ins.
pub const SCRATCH_ROWS: usize = 3;

#[derive(Debug, Error)]
pub enum EdpError {
    #[error("invalid cost model: {0}")]
    InvalidModel(String),
    #[error("cannot read cost model {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("cannot parse cost model: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("{rows_per_array} rows per array cannot hold {num_pis} PIs and a result")]
    Infeasible { rows_per_array: usize, num_pis: usize },
}

/// Per-instruction energy and delay, plus the array height.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostModel {
    pub energy_op: f64,
    pub energy_copy: f64,
    pub delay_op: f64,
    pub delay_copy: f64,
    pub rows_per_array: usize,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel { energy_op: 1.0, energy_copy: 10.0, delay_op: 1.0, delay_copy: 1.0, rows_per_array: 256 }
    }
}

impl CostModel {
    /// Copies must cost more energy than operations and take at least as
    /// long; all constants must be positive.
    pub fn validate(&self) -> Result<(), EdpError> {
        let positive = [self.energy_op, self.energy_copy, self.delay_op, self.delay_copy];
        if positive.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(EdpError::InvalidModel("energies and delays must be positive".into()));
        }
        if self.energy_copy <= self.energy_op {
            return Err(EdpError::InvalidModel("energy_copy must exceed energy_op".into()));
        }
        if self.delay_copy < self.delay_op {
            return Err(EdpError::InvalidModel("delay_copy must be at least delay_op".into()));
        }
        if self.rows_per_array <= SCRATCH_ROWS {
            return Err(EdpError::InvalidModel(format!("rows_per_array must exceed {SCRATCH_ROWS}")));
        }
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<CostModel, EdpError> {
        let m: CostModel = toml::from_str(text)?;
        m.validate()?;
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<CostModel, EdpError> {
        let text = std::fs::read_to_string(path).map_err(|source| EdpError::Io { path: path.display().to_string(), source })?;
        CostModel::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("cost model serializes")
    }
}

/// One cross-array transfer, issued right before the operation at `cycle`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CopyRecord {
    pub cycle: usize,
    pub src_row: usize,
    pub dest_row: usize,
}

/// Row layout of a design over one or more arrays. Rows are numbered
/// globally from 1; array `a` holds rows `a * rows_per_array + 1 ..=
/// (a + 1) * rows_per_array`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrayPlacement {
    pub rows_per_array: usize,
    pub arrays: usize,
    pub num_pis: usize,
    pub single: bool,
    pub copies: Vec<CopyRecord>,
}

impl ArrayPlacement {
    fn usable(&self) -> usize {
        if self.single {
            self.rows_per_array
        } else {
            self.rows_per_array - SCRATCH_ROWS
        }
    }

    /// Row of a linear position: PIs first (0-based), then slots.
    fn linear_row(&self, linear: usize) -> usize {
        let u = self.usable();
        (linear / u) * self.rows_per_array + linear % u + 1
    }

    /// Row of PI `k` (1-based, as in node ids).
    pub fn pi_row(&self, k: usize) -> usize {
        self.linear_row(k - 1)
    }

    pub fn slot_row(&self, slot: u32) -> usize {
        self.linear_row(self.num_pis + slot as usize)
    }

    pub fn array_of(&self, row: usize) -> usize {
        (row - 1) / self.rows_per_array
    }

    pub fn scratch_row(&self, array: usize, j: usize) -> usize {
        array * self.rows_per_array + self.usable() + 1 + j
    }

    /// Row holding `id` in `design`, `None` for the constant.
    pub fn row_of(&self, design: &ScheduledNetlist, id: NodeId) -> Option<usize> {
        let net = design.netlist();
        if net.is_pi(id) {
            Some(self.pi_row(id.index()))
        } else {
            net.cycle_of(id).map(|t| self.slot_row(design.slot_at(t)))
        }
    }
}

/// Lay the design out on arrays and list the COPY instructions it needs.
pub fn place(design: &ScheduledNetlist, model: &CostModel) -> Result<ArrayPlacement, EdpError> {
    let net = design.netlist();
    let rpa = model.rows_per_array;
    let num_pis = net.num_pis();
    if rpa < num_pis + 1 || rpa <= SCRATCH_ROWS {
        return Err(EdpError::Infeasible { rows_per_array: rpa, num_pis });
    }
    let needed = num_pis + design.mf();
    if needed <= rpa {
        return Ok(ArrayPlacement { rows_per_array: rpa, arrays: 1, num_pis, single: true, copies: Vec::new() });
    }
    let usable = rpa - SCRATCH_ROWS;
    let mut p = ArrayPlacement { rows_per_array: rpa, arrays: needed.div_ceil(usable), num_pis, single: false, copies: Vec::new() };
    for id in net.op_ids() {
        let t = net.cycle_of(id).unwrap();
        let dest = p.slot_row(design.slot_at(t));
        let home = p.array_of(dest);
        let mut foreign: Vec<usize> = Vec::new();
        for f in net.node(id).unwrap().fanins {
            if let Some(r) = p.row_of(design, f.node()) {
                if p.array_of(r) != home && !foreign.contains(&r) {
                    foreign.push(r);
                }
            }
        }
        for (j, src) in foreign.into_iter().enumerate() {
            p.copies.push(CopyRecord { cycle: t, src_row: src, dest_row: p.scratch_row(home, j) });
        }
    }
    Ok(p)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdpBreakdown {
    pub ops: usize,
    pub copies: usize,
    pub arrays: usize,
    pub energy: f64,
    pub delay: f64,
    pub edp: f64,
}

/// Energy and delay summed over all instructions; EDP is their product.
pub fn edp_from_counts(ops: usize, copies: usize, arrays: usize, model: &CostModel) -> EdpBreakdown {
    let energy = ops as f64 * model.energy_op + copies as f64 * model.energy_copy;
    let delay = ops as f64 * model.delay_op + copies as f64 * model.delay_copy;
    EdpBreakdown { ops, copies, arrays, energy, delay, edp: energy * delay }
}

pub fn estimate_edp(design: &ScheduledNetlist, model: &CostModel) -> Result<EdpBreakdown, EdpError> {
    let p = place(design, model)?;
    Ok(edp_from_counts(design.size(), p.copies.len(), p.arrays, model))
}
