//! Size-reducing optimization passes.
//!
//! Every pass is a pure function of `(netlist, seed)` and never returns a
//! larger netlist than it was given.

pub(crate) mod resub;
mod rewrite;
#[cfg(test)]
mod tests;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::xmg::{BuilderOptions, XmgNetlist};

/// Seed of the resubstitution step inside `cleanup`.
const CLEANUP_SEED: u64 = 0x5eed;
/// Safety cap on cleanup iterations; convergence normally takes two or three.
const CLEANUP_MAX_ITERS: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PassKind {
    ConstantPropagate,
    DedupStrash,
    WindowResub0,
    WindowResub1,
    MajRewrite,
    XorRewrite,
}

impl PassKind {
    pub const ALL: [PassKind; 6] = [
        PassKind::ConstantPropagate,
        PassKind::DedupStrash,
        PassKind::WindowResub0,
        PassKind::WindowResub1,
        PassKind::MajRewrite,
        PassKind::XorRewrite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PassKind::ConstantPropagate => "constant-propagate",
            PassKind::DedupStrash => "dedup-strash",
            PassKind::WindowResub0 => "window-resub-0",
            PassKind::WindowResub1 => "window-resub-1",
            PassKind::MajRewrite => "maj-rewrite",
            PassKind::XorRewrite => "xor-rewrite",
        }
    }
}

impl fmt::Display for PassKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PassKind {
    type Err = String;

    fn from_str(s: &str) -> Result<PassKind, String> {
        PassKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| format!("unknown pass '{s}'"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PassId {
    pub kind: PassKind,
    pub seed: u64,
}

impl PassId {
    pub fn new(kind: PassKind, seed: u64) -> PassId {
        PassId { kind, seed }
    }
}

/// Apply one pass. The result is functionally equivalent to `net` on every
/// PO and never larger.
pub fn run_pass(net: &XmgNetlist, pass: PassId) -> XmgNetlist {
    let out = match pass.kind {
        PassKind::ConstantPropagate => net.rebuild(BuilderOptions { hash: false, simplify: true }, |b, n, f, _| b.gate(n.kind, f)),
        PassKind::DedupStrash => net.strash(),
        PassKind::WindowResub0 => resub::window_resub(net, false, pass.seed),
        PassKind::WindowResub1 => resub::window_resub(net, true, pass.seed),
        PassKind::MajRewrite => rewrite::maj_rewrite(net, pass.seed),
        PassKind::XorRewrite => rewrite::xor_rewrite(net, pass.seed),
    };
    if out.size() > net.size() {
        net.clone()
    } else {
        out
    }
}

/// dedup-strash, constant-propagate and window-resub-0 repeated until the
/// netlist stops changing.
pub fn cleanup(net: &XmgNetlist) -> XmgNetlist {
    let mut cur = net.clone();
    for _ in 0..CLEANUP_MAX_ITERS {
        let mut next = run_pass(&cur, PassId::new(PassKind::DedupStrash, 0));
        next = run_pass(&next, PassId::new(PassKind::ConstantPropagate, 0));
        next = run_pass(&next, PassId::new(PassKind::WindowResub0, CLEANUP_SEED));
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

/// The passes `run_random_sequence` draws for `(k, seed)`.
pub fn random_passes(k: usize, seed: u64) -> Vec<PassId> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..k)
        .map(|_| {
            let kind = PassKind::ALL[rng.gen_range(0..PassKind::ALL.len())];
            PassId::new(kind, rng.gen())
        })
        .collect()
}

/// `k` passes drawn uniformly from the pool, then `cleanup`.
pub fn run_random_sequence(net: &XmgNetlist, k: usize, seed: u64) -> XmgNetlist {
    let mut cur = net.clone();
    for pass in random_passes(k, seed) {
        cur = run_pass(&cur, pass);
    }
    cleanup(&cur)
}
