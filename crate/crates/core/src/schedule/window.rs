use serde::{Deserialize, Serialize};

use super::MemoryUsageTrace;

/// Cycle interval `[m, n]` around the memory peak. All cycles are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeakWindow {
    pub m: usize,
    /// First cycle reaching the footprint.
    pub p: usize,
    pub n: usize,
    pub mf: usize,
}

impl PeakWindow {
    pub fn len(&self) -> usize {
        self.n + 1 - self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, cycle: usize) -> bool {
        (self.m..=self.n).contains(&cycle)
    }
}

/// Expand left from the first peak and right from the last peak while
/// usage stays at or above `lambda * mf`. Returns `None` for an empty trace.
///
/// Small `lambda` widens the window towards the whole trace; `lambda` close
/// to 1 shrinks it to the span between the first and last peak.
pub fn peak_window(trace: &MemoryUsageTrace, lambda: f64) -> Option<PeakWindow> {
    let p = trace.first_peak()?;
    let mf = trace.max();
    let last = trace.usage.iter().rposition(|&u| u == mf).unwrap() + 1;
    let threshold = lambda * mf as f64;
    let keep = |t: usize| trace.at(t) as f64 >= threshold;
    let mut m = p;
    while m > 1 && keep(m - 1) {
        m -= 1;
    }
    let mut n = last;
    while n < trace.len() && keep(n + 1) {
        n += 1;
    }
    Some(PeakWindow { m, p, n, mf })
}
