//! `imcc` command-line driver.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use imcc::edp::{estimate_edp, place};
use imcc::io::{emit_instructions, parse_aiger, parse_instructions, parse_report, parse_xmg, write_report, write_xmg, InstructionSequence};
use imcc::pareto::{build_report, schedule_full};
use imcc::schedule::{interpret, schedule, ScheduleOutcome, ScheduleRequest};
use imcc::{CompilerConfig, CostModel, ScheduledNetlist, XmgNetlist};

/// Environment variable naming a cost-model file; `--cost-model` wins.
const COST_MODEL_ENV: &str = "IMCC_COST_MODEL";

#[derive(Parser, Debug)]
#[command(name = "imcc", version, about = "Compile combinational logic for SIMD in-memory computing")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Optimize a netlist and write the selected design, report and trace.
    Compile(CompileArgs),
    /// Schedule a netlist and print its memory usage trace.
    Schedule(ScheduleArgs),
    /// Run footprint-oriented resubstitution on a scheduled netlist.
    Mfresub(MfresubArgs),
    /// Summarize a report written by `compile`.
    ParetoReport { report: PathBuf },
    /// Print energy-delay breakdowns for netlists.
    Edp(EdpArgs),
    /// Replay an instruction file on modeled arrays.
    Interpret(InterpretArgs),
}

#[derive(Args, Debug)]
struct CompileArgs {
    /// AIGER (`.aag`) or XMG text netlist.
    input: PathBuf,
    /// TOML file with compiler settings; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    k_cmds: Option<usize>,
    #[arg(long)]
    n_trial: Option<usize>,
    /// Rows per memory array.
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    exact_threshold: Option<usize>,
    /// Rounds run concurrently.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    cost_model: Option<PathBuf>,
    /// Directory for the output files.
    #[arg(short, long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args, Debug)]
struct ScheduleArgs {
    input: PathBuf,
    /// Give up when no order stays within this many rows.
    #[arg(long)]
    bound: Option<usize>,
    #[arg(long, default_value_t = imcc::schedule::DEFAULT_EXACT_THRESHOLD)]
    exact_threshold: usize,
    /// Write the scheduled netlist here.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MfresubArgs {
    input: PathBuf,
    #[arg(long, default_value_t = imcc::mfresub::DEFAULT_N_TRIAL)]
    n_trial: usize,
    #[arg(long, default_value_t = imcc::schedule::DEFAULT_EXACT_THRESHOLD)]
    exact_threshold: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EdpArgs {
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long)]
    cost_model: Option<PathBuf>,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long, default_value_t = imcc::schedule::DEFAULT_EXACT_THRESHOLD)]
    exact_threshold: usize,
}

#[derive(Args, Debug)]
struct InterpretArgs {
    instructions: PathBuf,
    /// PI values, first character is the first PI. Repeatable.
    #[arg(long = "pi", required = true)]
    pis: Vec<String>,
}

type CliResult<T> = Result<T, String>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    eprintln!("imcc: seed {}", cli.seed);
    match dispatch(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("imcc: error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: &Cli) -> CliResult<String> {
    match &cli.command {
        Command::Compile(a) => compile(a, cli.seed),
        Command::Schedule(a) => schedule_cmd(a),
        Command::Mfresub(a) => mfresub_cmd(a, cli.seed),
        Command::ParetoReport { report } => pareto_report(report),
        Command::Edp(a) => edp_cmd(a),
        Command::Interpret(a) => interpret_cmd(a),
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "design".into(), |s| s.to_string_lossy().into_owned())
}

/// AIGER by extension, XMG text otherwise.
fn load_netlist(path: &Path) -> CliResult<XmgNetlist> {
    let text = read(path)?;
    let net = if path.extension().is_some_and(|e| e == "aag") { parse_aiger(&text) } else { parse_xmg(&text) };
    let net = net.map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(if net.name().is_empty() { net.with_name(stem(path)) } else { net })
}

fn load_cost_model(flag: Option<&Path>) -> CliResult<Option<CostModel>> {
    let path = flag.map(Path::to_path_buf).or_else(|| std::env::var_os(COST_MODEL_ENV).map(PathBuf::from));
    path.map(|p| CostModel::load(&p).map_err(|e| e.to_string())).transpose()
}

fn with_rows(mut model: CostModel, rows: usize) -> CliResult<CostModel> {
    model.rows_per_array = rows;
    model.validate().map_err(|e| e.to_string())?;
    Ok(model)
}

fn compile(a: &CompileArgs, seed: u64) -> CliResult<String> {
    let net = load_netlist(&a.input)?;
    let mut cfg = match &a.config {
        Some(p) => toml::from_str::<CompilerConfig>(&read(p)?).map_err(|e| format!("{}: {e}", p.display()))?,
        None => CompilerConfig::default(),
    };
    cfg.seed = seed;
    macro_rules! over {
        ($($f:ident),*) => { $(if let Some(v) = a.$f { cfg.$f = v; })* };
    }
    over!(rounds, lambda, beta, k_cmds, n_trial, exact_threshold, jobs);
    let model = load_cost_model(a.cost_model.as_deref())?;
    // --rows wins, then the compiler config when no cost model was given.
    let rows = a.rows.or(model.is_none().then_some(cfg.rows_per_array)).unwrap_or_else(|| model.unwrap().rows_per_array);
    let model = with_rows(model.unwrap_or_default(), rows)?;
    cfg.rows_per_array = rows;
    cfg.validate().map_err(|e| e.to_string())?;

    let comp = imcc::run(&net, &cfg).map_err(|e| e.to_string())?;
    let name = stem(&a.input);
    let report = build_report(&name, seed, &comp, &model);
    fs::create_dir_all(&a.out_dir).map_err(|e| format!("cannot create {}: {e}", a.out_dir.display()))?;
    let out = |ext: &str| a.out_dir.join(format!("{name}.{ext}"));
    write(&out("report.json"), &write_report(&report))?;

    let mut msg = String::new();
    writeln!(msg, "baseline size {} mf {}", comp.baseline.size(), comp.baseline.mf()).unwrap();
    writeln!(msg, "frontier {}", points(comp.frontier.points())).unwrap();
    let Some(sel) = report.selected.map(|i| &comp.frontier.designs()[i]) else {
        return Err("no design selected".into());
    };
    writeln!(msg, "selected size {} mf {}", sel.size(), sel.mf()).unwrap();
    let placement = place(&sel.scheduled, &model).map_err(|e| e.to_string())?;
    write(&out("instr"), &emit_instructions(&sel.scheduled, &placement).to_text())?;
    write(&out("xmg"), &write_xmg(sel.scheduled.netlist()))?;
    let mut trace = String::from("cycle,usage\n");
    for t in &report.trace {
        writeln!(trace, "{},{}", t.cycle, t.usage).unwrap();
    }
    write(&out("trace.csv"), &trace)?;
    writeln!(msg, "wrote {}", out("{report.json,instr,xmg,trace.csv}").display()).unwrap();
    Ok(msg)
}

fn points(it: impl Iterator<Item = (usize, usize)>) -> String {
    it.map(|(s, m)| format!("({s},{m})")).collect::<Vec<_>>().join(" ")
}

fn trace_line(s: &ScheduledNetlist) -> String {
    s.trace().usage.iter().map(|u| u.to_string()).collect::<Vec<_>>().join(" ")
}

fn schedule_cmd(a: &ScheduleArgs) -> CliResult<String> {
    let net = load_netlist(&a.input)?;
    let req = ScheduleRequest::new(net).with_bound(a.bound);
    match schedule(&req, a.exact_threshold).map_err(|e| e.to_string())? {
        ScheduleOutcome::BoundExceeded => Err(format!("no order fits in {} rows", a.bound.unwrap_or(0))),
        ScheduleOutcome::Scheduled(s) => {
            if let Some(p) = &a.output {
                write(p, &write_xmg(s.netlist()))?;
            }
            Ok(format!("size {} mf {}\nusage {}\n", s.size(), s.mf(), trace_line(&s)))
        }
    }
}

fn mfresub_cmd(a: &MfresubArgs, seed: u64) -> CliResult<String> {
    let net = load_netlist(&a.input)?;
    let design = schedule_full(net, a.exact_threshold);
    let out = imcc::mfresub(&design, a.n_trial, seed);
    if let Some(p) = &a.output {
        write(p, &write_xmg(out.design.netlist()))?;
    }
    Ok(format!(
        "before size {} mf {}\nafter size {} mf {}\ncategory {}\nsteps {}\n",
        design.size(),
        design.mf(),
        out.design.size(),
        out.design.mf(),
        out.category,
        out.steps.len()
    ))
}

fn pareto_report(path: &Path) -> CliResult<String> {
    let r = parse_report(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut s = String::new();
    writeln!(s, "{} (seed {})", r.name, r.seed).unwrap();
    writeln!(s, "{:>3} {:>7} {:>5} {:>14} {:>6} {:>6}  round", "", "size", "mf", "edp", "copies", "arrays").unwrap();
    for (i, d) in r.designs.iter().enumerate() {
        let mark = if r.selected == Some(i) { "*" } else { "" };
        let edp = d.edp.map_or_else(|| "-".into(), |e| format!("{e:.1}"));
        let round = d.round.map_or_else(|| "baseline".into(), |r| r.to_string());
        writeln!(s, "{mark:>3} {:>7} {:>5} {edp:>14} {:>6} {:>6}  {round}", d.size, d.mf, d.copies, d.arrays).unwrap();
    }
    let inserted = r.rounds.iter().filter(|x| x.inserted).count();
    writeln!(s, "rounds {} inserted {inserted}", r.rounds.len()).unwrap();
    Ok(s)
}

fn edp_cmd(a: &EdpArgs) -> CliResult<String> {
    let model = load_cost_model(a.cost_model.as_deref())?.unwrap_or_default();
    let rows = a.rows.unwrap_or(model.rows_per_array);
    let model = with_rows(model, rows)?;
    let mut s = String::new();
    for p in &a.inputs {
        let design = schedule_full(load_netlist(p)?, a.exact_threshold);
        let b = estimate_edp(&design, &model).map_err(|e| format!("{}: {e}", p.display()))?;
        writeln!(
            s,
            "{}: size {} mf {} ops {} copies {} arrays {} energy {} delay {} edp {}",
            p.display(),
            design.size(),
            design.mf(),
            b.ops,
            b.copies,
            b.arrays,
            b.energy,
            b.delay,
            b.edp
        )
        .unwrap();
    }
    Ok(s)
}

fn load_instructions(path: &Path) -> CliResult<InstructionSequence> {
    let text = read(path)?;
    let seq = if text.trim_start().starts_with('{') {
        InstructionSequence::from_json(&text).map_err(|e| e.to_string())
    } else {
        parse_instructions(&text).map_err(|e| e.to_string())
    };
    seq.map_err(|e| format!("{}: {e}", path.display()))
}

fn interpret_cmd(a: &InterpretArgs) -> CliResult<String> {
    let seq = load_instructions(&a.instructions)?;
    let n = seq.pi_rows.len();
    // Pack up to 64 patterns per replay, one per bit position.
    let mut words = vec![0u64; n];
    let mut patterns = 0;
    let mut out = String::new();
    let mut flush = |words: &mut Vec<u64>, patterns: &mut usize| -> CliResult<()> {
        if *patterns == 0 {
            return Ok(());
        }
        let pos = interpret(&seq, words).map_err(|e| e.to_string())?;
        for bit in 0..*patterns {
            let line: String = pos.iter().map(|w| if (w >> bit) & 1 == 1 { '1' } else { '0' }).collect();
            writeln!(out, "{line}").unwrap();
        }
        words.iter_mut().for_each(|w| *w = 0);
        *patterns = 0;
        Ok(())
    };
    for bits in &a.pis {
        if bits.len() != n || !bits.chars().all(|c| c == '0' || c == '1') {
            return Err(format!("--pi {bits}: expected {n} binary digits"));
        }
        for (k, c) in bits.chars().enumerate() {
            words[k] |= ((c == '1') as u64) << patterns;
        }
        patterns += 1;
        if patterns == 64 {
            flush(&mut words, &mut patterns)?;
        }
    }
    flush(&mut words, &mut patterns)?;
    Ok(out)
}
