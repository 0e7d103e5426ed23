use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const INT2FLOAT: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../benchmarks/epfl/int2float.aag");

fn imcc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_imcc")).args(args).env_remove("IMCC_COST_MODEL").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Direct AND-gate evaluation of an ASCII AIGER file.
fn eval_aiger(text: &str, input: &[bool]) -> Vec<bool> {
    let mut lines = text.lines();
    let hdr: Vec<usize> = lines.next().unwrap().split_whitespace().skip(1).map(|t| t.parse().unwrap()).collect();
    let (m, i, o, a) = (hdr[0], hdr[1], hdr[3], hdr[4]);
    let mut val = vec![false; m + 1];
    for k in 0..i {
        let lit: usize = lines.next().unwrap().trim().parse().unwrap();
        val[lit / 2] = input[k];
    }
    let outs: Vec<usize> = (0..o).map(|_| lines.next().unwrap().trim().parse().unwrap()).collect();
    let lit = |val: &[bool], l: usize| val[l / 2] ^ (l % 2 == 1);
    for _ in 0..a {
        let g: Vec<usize> = lines.next().unwrap().split_whitespace().map(|t| t.parse().unwrap()).collect();
        val[g[0] / 2] = lit(&val, g[1]) && lit(&val, g[2]);
    }
    outs.iter().map(|&l| lit(&val, l)).collect()
}

fn compile_into(dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["compile", INT2FLOAT, "--out-dir", dir.to_str().unwrap(), "--n-trial", "2000"];
    args.extend_from_slice(extra);
    imcc(&args)
}

#[test]
fn compile_baseline_only() {
    let dir = tempfile::tempdir().unwrap();
    let o = compile_into(dir.path(), &["--rounds", "0", "--rows", "256"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("seed 0"));
    let report = fs::read_to_string(dir.path().join("int2float.report.json")).unwrap();
    let r = imcc::io::parse_report(&report).unwrap();
    assert_eq!(r.designs.len(), 1);
    assert_eq!(r.designs[0].round, None);
    assert!(r.rounds.is_empty());
    assert_eq!(r.selected, Some(0));
    for ext in ["instr", "xmg", "trace.csv"] {
        assert!(dir.path().join(format!("int2float.{ext}")).exists(), "{ext}");
    }
    let trace = fs::read_to_string(dir.path().join("int2float.trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), r.designs[0].size + 1);
}

#[test]
fn compile_is_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let flags = ["--rounds", "3", "--seed", "11"];
    assert!(compile_into(a.path(), &flags).status.success());
    assert!(compile_into(b.path(), &flags).status.success());
    for f in ["int2float.report.json", "int2float.instr", "int2float.trace.csv"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let r = fs::read_to_string(a.path().join("int2float.report.json")).unwrap();
    assert_eq!(imcc::io::parse_report(&r).unwrap().seed, 11);
}

#[test]
fn interpret_matches_aiger_evaluation() {
    let dir = tempfile::tempdir().unwrap();
    assert!(compile_into(dir.path(), &["--rounds", "2", "--seed", "3"]).status.success());
    let instr = dir.path().join("int2float.instr");
    let aag = fs::read_to_string(INT2FLOAT).unwrap();
    let patterns: Vec<String> = (0..1u32 << 11).map(|v| (0..11).map(|k| if v >> k & 1 == 1 { '1' } else { '0' }).collect()).collect();
    let mut args = vec!["interpret".to_string(), instr.to_str().unwrap().to_string()];
    for p in &patterns {
        args.push("--pi".into());
        args.push(p.clone());
    }
    let o = Command::new(env!("CARGO_BIN_EXE_imcc")).args(&args).output().unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(lines.len(), patterns.len());
    for (p, line) in patterns.iter().zip(&lines) {
        let input: Vec<bool> = p.chars().map(|c| c == '1').collect();
        let want: String = eval_aiger(&aag, &input).iter().map(|&b| if b { '1' } else { '0' }).collect();
        assert_eq!(line, &want, "input {p}");
    }
}

#[test]
fn errors_exit_nonzero() {
    let o = imcc(&["compile", "/no/such/file.aag"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("cannot read"));

    let o = imcc(&["compile", INT2FLOAT, "--bogus"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("Usage"));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "rounds = \"many\"\n").unwrap();
    let o = compile_into(dir.path(), &["--config", cfg.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("bad.toml"));

    let o = compile_into(dir.path(), &["--lambda", "1.5"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("lambda"));

    let o = imcc(&["interpret", "/no/such.instr", "--pi", "1"]);
    assert!(!o.status.success());
}

#[test]
fn config_file_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "rounds = 2\nk_cmds = 4\n").unwrap();
    let o = compile_into(dir.path(), &["--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = imcc::io::parse_report(&fs::read_to_string(dir.path().join("int2float.report.json")).unwrap()).unwrap();
    assert_eq!(r.rounds.len(), 2);
    // A flag overrides the file.
    let o = compile_into(dir.path(), &["--config", cfg.to_str().unwrap(), "--rounds", "1"]);
    assert!(o.status.success());
    let r = imcc::io::parse_report(&fs::read_to_string(dir.path().join("int2float.report.json")).unwrap()).unwrap();
    assert_eq!(r.rounds.len(), 1);
}

fn small_netlist(dir: &Path) -> PathBuf {
    let p = dir.join("five.xmg");
    fs::write(
        &p,
        ".name five\n.pis 3\n.pos 2\nN1 = MAJ(x1, x2, 0)\nN2 = XOR(x2, x3, 0)\nN3 = MAJ(N1, N2, x3)\nN4 = XOR(N1, x1, 0)\nN5 = MAJ(N3, N4, 1)\nPO0 = N5\nPO1 = !N2\n",
    )
    .unwrap();
    p
}

#[test]
fn schedule_mfresub_and_edp_verbs() {
    let dir = tempfile::tempdir().unwrap();
    let net = small_netlist(dir.path());
    let out = dir.path().join("s.xmg");
    let o = imcc(&["schedule", net.to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("size 5 mf "), "{text}");
    let usage: Vec<usize> = text.lines().nth(1).unwrap().split_whitespace().skip(1).map(|t| t.parse().unwrap()).collect();
    assert_eq!(usage.len(), 5);
    assert_eq!((usage[0], *usage.last().unwrap()), (1, 2));
    assert!(out.exists());

    let o = imcc(&["schedule", net.to_str().unwrap(), "--bound", "1"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("no order fits"));

    let o = imcc(&["mfresub", net.to_str().unwrap(), "--seed", "5", "--n-trial", "1000"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("seed 5"));
    assert!(stdout(&o).contains("category "));

    let model = dir.path().join("model.toml");
    fs::write(&model, "energy_op = 1.0\nenergy_copy = 5.0\ndelay_op = 2.0\ndelay_copy = 2.0\nrows_per_array = 64\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_imcc")).args(["edp", net.to_str().unwrap()]).env("IMCC_COST_MODEL", &model).output().unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    // Single array, five operations: energy 5, delay 10.
    assert!(stdout(&o).contains("ops 5 copies 0 arrays 1 energy 5 delay 10 edp 50"), "{}", stdout(&o));

    fs::write(&model, "energy_op = 1.0\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_imcc")).args(["edp", net.to_str().unwrap()]).env("IMCC_COST_MODEL", &model).output().unwrap();
    assert!(!o.status.success());
}

#[test]
fn pareto_report_summarizes() {
    let dir = tempfile::tempdir().unwrap();
    assert!(compile_into(dir.path(), &["--rounds", "2"]).status.success());
    let o = imcc(&["pareto-report", dir.path().join("int2float.report.json").to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("int2float (seed 0)"));
    assert!(text.contains("baseline") || text.lines().any(|l| l.trim_start().starts_with('*')));
    assert!(text.contains("rounds 2"));
}
