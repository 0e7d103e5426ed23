use serde::{Deserialize, Serialize};

/// One frontier design.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignRecord {
    pub size: usize,
    pub mf: usize,
    /// `None` when the design cannot be placed.
    pub edp: Option<f64>,
    pub copies: usize,
    pub arrays: usize,
    /// Round that produced the design; `None` for the baseline.
    pub round: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TracePoint {
    pub cycle: usize,
    pub usage: usize,
}

/// What happened in one improvement round.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    /// (size, mf) of the design the round started from.
    pub baseline: (usize, usize),
    /// Peak window `(m, p, n)`.
    pub window: Option<(usize, usize, usize)>,
    pub sub_size: Option<(usize, usize)>,
    pub bound: Option<usize>,
    pub status: String,
    /// (size, mf) after reinsertion and after resubstitution.
    pub spliced: Option<(usize, usize)>,
    pub result: Option<(usize, usize)>,
    pub resub: Option<String>,
    pub inserted: bool,
}

/// Machine-readable summary of a compile run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub name: String,
    pub seed: u64,
    pub designs: Vec<DesignRecord>,
    /// Index into `designs` of the selected design.
    pub selected: Option<usize>,
    /// Memory usage per cycle of the selected design.
    pub trace: Vec<TracePoint>,
    pub rounds: Vec<RoundRecord>,
}

impl Report {
    pub fn trace_points(usage: &[usize]) -> Vec<TracePoint> {
        usage.iter().enumerate().map(|(i, &u)| TracePoint { cycle: i + 1, usage: u }).collect()
    }
}

pub fn write_report(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn parse_report(text: &str) -> Result<Report, serde_json::Error> {
    serde_json::from_str(text)
}
