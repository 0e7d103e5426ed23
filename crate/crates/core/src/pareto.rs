//! The iterative compile loop: keep a Pareto frontier over (size, MF),
//! repeatedly improve a frontier design around its memory peak, and pick
//! the final design.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::edp::{estimate_edp, CostModel};
use crate::io::{DesignRecord, Report, RoundRecord};
use crate::mfresub::{mfresub, DEFAULT_N_TRIAL};
use crate::opt::{cleanup, run_random_sequence};
use crate::schedule::{peak_window, schedule, ScheduleOutcome, ScheduleRequest, ScheduledNetlist, DEFAULT_EXACT_THRESHOLD};
use crate::subnet::{extract, pareto_mf_bound, reinsert};
use crate::xmg::XmgNetlist;

#[derive(Clone, Debug)]
pub struct Design {
    pub scheduled: ScheduledNetlist,
    /// Round that produced the design; `None` for the baseline.
    pub round: Option<usize>,
}

impl Design {
    pub fn new(scheduled: ScheduledNetlist, round: Option<usize>) -> Design {
        Design { scheduled, round }
    }

    pub fn size(&self) -> usize {
        self.scheduled.size()
    }

    pub fn mf(&self) -> usize {
        self.scheduled.mf()
    }

    pub fn point(&self) -> (usize, usize) {
        (self.size(), self.mf())
    }

    /// At most as large on both axes and smaller on one.
    pub fn dominates(&self, other: &Design) -> bool {
        dominates(self.point(), other.point())
    }
}

pub fn dominates(a: (usize, usize), b: (usize, usize)) -> bool {
    a.0 <= b.0 && a.1 <= b.1 && a != b
}

/// Mutually non-dominated designs, sorted by size then MF. Designs at the
/// same point with different netlists are all kept.
#[derive(Clone, Debug, Default)]
pub struct ParetoSet {
    designs: Vec<Design>,
}

impl ParetoSet {
    pub fn new() -> ParetoSet {
        ParetoSet::default()
    }

    pub fn designs(&self) -> &[Design] {
        &self.designs
    }

    pub fn len(&self) -> usize {
        self.designs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.designs.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.designs.iter().map(Design::point)
    }

    /// Add `d` unless it is dominated or already present; drop members it
    /// dominates. Returns whether it was added.
    pub fn insert(&mut self, d: Design) -> bool {
        let hash = d.scheduled.netlist().structural_hash();
        let rejected =
            self.designs.iter().any(|e| e.dominates(&d) || (e.point() == d.point() && e.scheduled.netlist().structural_hash() == hash));
        if rejected {
            return false;
        }
        self.designs.retain(|e| !d.dominates(e));
        let at = self.designs.partition_point(|e| e.point() <= d.point());
        self.designs.insert(at, d);
        true
    }

    /// True iff every point of `other` is matched or dominated here.
    pub fn weakly_dominates(&self, other: &ParetoSet) -> bool {
        other.points().all(|q| self.points().any(|p| p == q || dominates(p, q)))
    }
}

/// Least-size design with MF within `rows_available`; when none fits, the
/// design with the least estimated EDP. Ties go to the smaller size, then MF.
pub fn select_final<'a>(frontier: &'a ParetoSet, rows_available: usize, model: &CostModel) -> Option<&'a Design> {
    let fits = frontier.designs.iter().filter(|d| d.mf() <= rows_available).min_by_key(|d| d.point());
    fits.or_else(|| {
        let edp = |d: &Design| estimate_edp(&d.scheduled, model).map_or(f64::INFINITY, |b| b.edp);
        frontier.designs.iter().min_by(|a, b| edp(a).total_cmp(&edp(b)).then(a.point().cmp(&b.point())))
    })
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("lambda must lie strictly between 0 and 1, got {0}")]
    Lambda(f64),
    #[error("beta must exceed 1, got {0}")]
    Beta(f64),
    #[error("jobs must be at least 1")]
    Jobs,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompilerConfig {
    pub rounds: usize,
    /// Fraction of the MF below which the peak window stops growing.
    pub lambda: f64,
    /// Relaxation applied to the scheduling bound.
    pub beta: f64,
    /// Random optimization commands per round.
    pub k_cmds: usize,
    pub n_trial: usize,
    pub rows_per_array: usize,
    pub seed: u64,
    pub exact_threshold: usize,
    /// Rounds run concurrently against the same frontier snapshot.
    pub jobs: usize,
}

impl Default for CompilerConfig {
    fn default() -> Self {
        CompilerConfig {
            rounds: 20,
            lambda: 0.6,
            beta: 1.1,
            k_cmds: 10,
            n_trial: DEFAULT_N_TRIAL,
            rows_per_array: 256,
            seed: 0,
            exact_threshold: DEFAULT_EXACT_THRESHOLD,
            jobs: 1,
        }
    }
}

impl CompilerConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return Err(ConfigError::Lambda(self.lambda));
        }
        if !(self.beta > 1.0) {
            return Err(ConfigError::Beta(self.beta));
        }
        if self.jobs == 0 {
            return Err(ConfigError::Jobs);
        }
        Ok(())
    }
}

/// How a round ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RoundStatus {
    /// The picked design has no operations to work on.
    Empty,
    BoundExceeded,
    /// The optimized sub-netlist failed the boundary check.
    SpliceRefused,
    Inserted,
    Dominated,
}

impl fmt::Display for RoundStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RoundStatus::Empty => "empty",
            RoundStatus::BoundExceeded => "bound-exceeded",
            RoundStatus::SpliceRefused => "splice-refused",
            RoundStatus::Inserted => "inserted",
            RoundStatus::Dominated => "dominated",
        })
    }
}

#[derive(Clone, Debug)]
pub struct Compilation {
    pub baseline: Design,
    pub frontier: ParetoSet,
    pub rounds: Vec<RoundRecord>,
}

/// Schedule a whole netlist with no bound.
pub fn schedule_full(net: XmgNetlist, exact_threshold: usize) -> ScheduledNetlist {
    let req = ScheduleRequest::new(net);
    match schedule(&req, exact_threshold) {
        Ok(ScheduleOutcome::Scheduled(s)) => s,
        _ => ScheduledNetlist::in_order(req.netlist),
    }
}

/// Clean up and schedule `net` as the baseline, then run the improvement
/// rounds. With `jobs > 1` the rounds go in batches that all read the same
/// frontier; results are inserted in round order, so the outcome depends on
/// `jobs` but not on thread timing.
pub fn run(net: &XmgNetlist, cfg: &CompilerConfig) -> Result<Compilation, ConfigError> {
    cfg.validate()?;
    let baseline = Design::new(schedule_full(cleanup(net), cfg.exact_threshold), None);
    let mut frontier = ParetoSet::new();
    frontier.insert(baseline.clone());
    let mut rounds = Vec::with_capacity(cfg.rounds);
    let ids: Vec<usize> = (0..cfg.rounds).collect();
    for batch in ids.chunks(cfg.jobs) {
        let results: Vec<(RoundRecord, Option<Design>)> = if batch.len() == 1 {
            vec![round(&frontier, batch[0], cfg)]
        } else {
            let snapshot = &frontier;
            std::thread::scope(|s| {
                let handles: Vec<_> = batch.iter().map(|&r| s.spawn(move || round(snapshot, r, cfg))).collect();
                handles.into_iter().map(|h| h.join().expect("round panicked")).collect()
            })
        };
        for (mut rec, design) in results {
            if let Some(d) = design {
                rec.inserted = frontier.insert(d);
                rec.status = if rec.inserted { RoundStatus::Inserted } else { RoundStatus::Dominated }.to_string();
            }
            rounds.push(rec);
        }
    }
    Ok(Compilation { baseline, frontier, rounds })
}

/// One round against `frontier`; returns the candidate design, if any, for
/// the caller to insert.
fn round(frontier: &ParetoSet, r: usize, cfg: &CompilerConfig) -> (RoundRecord, Option<Design>) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(r as u64 + 1);
    let g = frontier.designs()[rng.gen_range(0..frontier.len())].scheduled.clone();
    let mut rec = RoundRecord {
        round: r,
        baseline: (g.size(), g.mf()),
        window: None,
        sub_size: None,
        bound: None,
        status: RoundStatus::Empty.to_string(),
        spliced: None,
        result: None,
        resub: None,
        inserted: false,
    };
    let Some(window) = peak_window(g.trace(), cfg.lambda) else { return (rec, None) };
    rec.window = Some((window.m, window.p, window.n));
    let sub = extract(&g, &window).expect("window comes from the trace");
    let optimized = run_random_sequence(&sub.netlist, cfg.k_cmds, rng.gen());
    rec.sub_size = Some((sub.size(), optimized.size()));

    let new_size = g.size() - sub.size() + optimized.size();
    let bound = pareto_mf_bound(frontier.points(), new_size, cfg.beta);
    rec.bound = bound;
    // Rows held outside the sub-netlist during the window count against
    // the bound too.
    let sub_bound = match bound {
        Some(b) if b <= sub.base_load => {
            rec.status = RoundStatus::BoundExceeded.to_string();
            return (rec, None);
        }
        b => b.map(|b| b - sub.base_load),
    };
    let req = ScheduleRequest::new(optimized).with_temporaries(sub.temporaries.clone()).with_bound(sub_bound);
    let scheduled_sub = match schedule(&req, cfg.exact_threshold) {
        Ok(ScheduleOutcome::Scheduled(s)) => s,
        _ => {
            rec.status = RoundStatus::BoundExceeded.to_string();
            return (rec, None);
        }
    };
    let Ok(spliced) = reinsert(&g, &sub, &scheduled_sub) else {
        rec.status = RoundStatus::SpliceRefused.to_string();
        return (rec, None);
    };
    let mut spliced = ScheduledNetlist::in_order(spliced);
    rec.spliced = Some((spliced.size(), spliced.mf()));
    if bound.map_or(true, |b| spliced.mf() <= b) {
        let full = schedule_full(spliced.netlist().clone(), cfg.exact_threshold);
        if full.mf() < spliced.mf() {
            spliced = full;
        }
    }

    let out = mfresub(&spliced, cfg.n_trial, rng.gen());
    rec.resub = Some(out.category.name().to_string());
    rec.result = Some((out.design.size(), out.design.mf()));
    (rec, Some(Design::new(out.design, Some(r))))
}

/// Single-array rows left for results once every PI has a row.
pub fn rows_available(rows_per_array: usize, num_pis: usize) -> usize {
    rows_per_array.saturating_sub(num_pis)
}

/// Machine-readable summary: frontier with EDP estimates, the selected
/// design and its usage trace, and the round log.
pub fn build_report(name: &str, seed: u64, comp: &Compilation, model: &CostModel) -> Report {
    let num_pis = comp.baseline.scheduled.netlist().num_pis();
    let selected = select_final(&comp.frontier, rows_available(model.rows_per_array, num_pis), model);
    let designs = comp
        .frontier
        .designs()
        .iter()
        .map(|d| {
            let b = estimate_edp(&d.scheduled, model).ok();
            DesignRecord {
                size: d.size(),
                mf: d.mf(),
                edp: b.as_ref().map(|b| b.edp),
                copies: b.as_ref().map_or(0, |b| b.copies),
                arrays: b.as_ref().map_or(0, |b| b.arrays),
                round: d.round,
            }
        })
        .collect();
    let selected_idx = selected.and_then(|s| comp.frontier.designs().iter().position(|d| std::ptr::eq(d, s)));
    Report {
        name: name.to_string(),
        seed,
        designs,
        selected: selected_idx,
        trace: selected.map_or_else(Vec::new, |s| Report::trace_points(&s.scheduled.trace().usage)),
        rounds: comp.rounds.clone(),
    }
}
