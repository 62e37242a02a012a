//! The `regrobust` command line.
//!
//! Exit codes: 0 success, 1 negative verdict (non-robust, refine, learner
//! budget exhausted), 2 usage, 3 internal error. Diagnostics are single JSON
//! lines on stderr, and every command except `oracle` ends by printing its
//! run manifest there as `{"manifest":{…}}`.
//!
//! A TOML file given with `--config` supplies defaults. Top-level keys fill
//! global options (`seed`, `jobs`) and a table per subcommand fills that
//! subcommand's flags, for example `[certify] delta = "1"`. Flags on the
//! command line win.

use std::ffi::OsString;
use std::fs;
use std::io::{self, BufReader, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::automata::dra::Dra;
use crate::bench::{build_sampler, generate, ground_truth, BenchmarkId};
use crate::certify::{
    run_certification, serve, serve_tcp, CertificationParams, DraOracle, LineOracle, Oracle, OracleHandle, Outcome,
};
use crate::learn::{score, search, synthesize, SampleSet, SearchConfig, SearchSpace, SmtError, SolverCommand, SynthesisConfig};
use crate::metric::{build_metric, evaluate, MetricKind};
use crate::rational::{parse_sequence, Rational};
use crate::robust::{check_robustness, RobustnessQuery, Side};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Internal(_) => 3,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Internal(_) => "internal",
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn internal(e: impl std::fmt::Display) -> CliError {
    CliError::Internal(e.to_string())
}

#[derive(Parser, Debug, Serialize)]
#[command(name = "regrobust", version, about = "Learn, certify and check robustness of register automata")]
pub struct Cli {
    /// TOML file with default flag values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Also write the run manifest to this file.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for parallel restarts.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
pub enum Command {
    /// Learn an automaton from a labelled sample file.
    Learn(LearnArgs),
    /// Certify an automaton against an oracle.
    Certify(CertifyArgs),
    /// Decide delta-robustness at one sequence.
    Robust(RobustArgs),
    /// Exact distance between two sequences.
    Distance(DistanceArgs),
    /// Draw a labelled sample set from a benchmark language.
    Sample(SampleArgs),
    /// Score an automaton on a sample file.
    Eval(EvalArgs),
    /// Serve an automaton over the oracle line protocol.
    Oracle(OracleArgs),
    /// Re-run the command recorded in a manifest.
    Replay { manifest_file: PathBuf },
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq, Eq)]
pub enum Method {
    Smt,
    Localsearch,
}

#[derive(Args, Debug, Serialize)]
pub struct LearnArgs {
    #[arg(long, value_enum)]
    pub method: Method,
    #[arg(long)]
    pub samples: PathBuf,
    /// Write the learned automaton here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    pub max_states: usize,
    #[arg(long, default_value_t = 2)]
    pub max_registers: usize,
    #[arg(long, default_value_t = 1)]
    pub max_constants: usize,
    /// Solver time budget in seconds.
    #[arg(long, default_value_t = 60)]
    pub timeout: u64,
    /// Solver command line, overriding REGROBUST_SOLVER.
    #[arg(long)]
    pub solver: Option<String>,
    #[arg(long, default_value_t = 2)]
    pub states: usize,
    #[arg(long, default_value_t = 1)]
    pub registers: usize,
    /// Constants for local search (and a fixed pool for smt), comma separated.
    #[arg(long)]
    pub constants: Option<String>,
    #[arg(long, default_value_t = 100_000)]
    pub max_iter: u64,
    #[arg(long, default_value_t = 5)]
    pub restarts: usize,
    /// Local search wall-clock budget in seconds.
    #[arg(long, default_value_t = 600)]
    pub max_time: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct CertifyArgs {
    #[arg(long)]
    pub dra: PathBuf,
    /// `dra:FILE`, `bench:ID`, `tcp:HOST:PORT` or a command line.
    #[arg(long)]
    pub oracle: String,
    /// Benchmark whose Markov sampler draws the sequences.
    #[arg(long)]
    pub sampler: BenchmarkId,
    #[arg(long, default_value = "0.2")]
    pub noise: f64,
    #[arg(long, default_value_t = 20)]
    pub max_len: usize,
    #[arg(long)]
    pub metric: String,
    #[arg(long)]
    pub delta: Rational,
    #[arg(long, default_value = "0.95")]
    pub p: Rational,
    #[arg(long, default_value = "0.05")]
    pub epsilon: Rational,
    #[arg(long, default_value = "0.05")]
    pub gamma: Rational,
    #[arg(long, default_value = "0.05")]
    pub eta: Rational,
    #[arg(long)]
    pub stability_dedup: bool,
    /// Seconds to wait for each oracle reply.
    #[arg(long, default_value_t = 30)]
    pub timeout: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct RobustArgs {
    #[arg(long)]
    pub dra: PathBuf,
    #[arg(long)]
    pub metric: String,
    #[arg(long, allow_hyphen_values = true)]
    pub v: String,
    #[arg(long)]
    pub delta: Rational,
    #[arg(long, default_value = "auto")]
    pub side: Side,
}

#[derive(Args, Debug, Serialize)]
pub struct DistanceArgs {
    #[arg(long)]
    pub metric: String,
    #[arg(long, allow_hyphen_values = true)]
    pub v: String,
    #[arg(long, allow_hyphen_values = true)]
    pub w: String,
}

#[derive(Args, Debug, Serialize)]
pub struct SampleArgs {
    #[arg(long)]
    pub benchmark: BenchmarkId,
    #[arg(long)]
    pub pos: usize,
    #[arg(long)]
    pub neg: usize,
    #[arg(long, default_value_t = 50)]
    pub max_len: usize,
    #[arg(long, default_value = "0.5")]
    pub noise: f64,
    /// Write JSONL here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct EvalArgs {
    #[arg(long)]
    pub dra: PathBuf,
    #[arg(long)]
    pub samples: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct OracleArgs {
    #[arg(long, conflicts_with = "benchmark", required_unless_present = "benchmark")]
    pub dra: Option<PathBuf>,
    #[arg(long)]
    pub benchmark: Option<BenchmarkId>,
    /// Listen on this address instead of serving stdin/stdout.
    #[arg(long)]
    pub tcp: Option<String>,
}

/// What a command produced, before it is printed.
struct Report {
    stdout: String,
    code: i32,
    files: Vec<(PathBuf, String)>,
    extra: serde_json::Map<String, Value>,
}

impl Report {
    fn json(v: &Value, code: i32) -> Report {
        Report {
            stdout: format!("{}\n", serde_json::to_string_pretty(v).expect("json")),
            code,
            files: Vec::new(),
            extra: serde_json::Map::new(),
        }
    }

    fn write_file(&mut self, path: &Path, content: &[u8]) -> Result<(), CliError> {
        fs::write(path, content).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        self.files.push((path.to_path_buf(), sha256(content)));
        Ok(())
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub config: Value,
    pub seed: u64,
    pub version: String,
    pub elapsed_ms: u128,
    pub exit_code: i32,
    /// SHA-256 of stdout and of every written file.
    pub outputs: serde_json::Map<String, Value>,
    #[serde(flatten)]
    pub extra: serde_json::Map<String, Value>,
}

fn sha256(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn diagnostic(e: &CliError) {
    let line = json!({ "error": e.kind(), "message": e.to_string() });
    eprintln!("{line}");
}

const SUBCOMMANDS: [&str; 8] = ["learn", "certify", "robust", "distance", "sample", "eval", "oracle", "replay"];

fn flag_present(argv: &[String], key: &str) -> bool {
    let flag = format!("--{key}");
    argv.iter()
        .any(|a| a == &flag || a.starts_with(&format!("{flag}=")))
}

fn config_value(key: &str, v: &toml::Value) -> Result<Option<Vec<String>>, CliError> {
    let flag = format!("--{key}");
    Ok(match v {
        toml::Value::Boolean(true) => Some(vec![flag]),
        toml::Value::Boolean(false) => None,
        toml::Value::String(s) => Some(vec![format!("{flag}={s}")]),
        toml::Value::Integer(i) => Some(vec![format!("{flag}={i}")]),
        toml::Value::Float(f) => Some(vec![format!("{flag}={f}")]),
        toml::Value::Array(items) => {
            let parts: Vec<String> = items
                .iter()
                .map(|x| match x {
                    toml::Value::String(s) => s.clone(),
                    other => other.to_string(),
                })
                .collect();
            Some(vec![format!("{flag}={}", parts.join(","))])
        }
        other => return Err(usage(format!("config key `{key}` has unsupported value {other}"))),
    })
}

fn config_path(argv: &[String]) -> Option<String> {
    argv.iter().enumerate().find_map(|(i, a)| {
        a.strip_prefix("--config=")
            .map(str::to_string)
            .or_else(|| (a == "--config").then(|| argv.get(i + 1).cloned()).flatten())
    })
}

/// Appends config-file values for flags absent from `argv`.
pub fn merge_config(argv: Vec<String>) -> Result<Vec<String>, CliError> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let text = fs::read_to_string(&path).map_err(|e| usage(format!("{path}: {e}")))?;
    let table: toml::Table = text.parse().map_err(|e| usage(format!("{path}: {e}")))?;
    let sub = argv.iter().skip(1).find(|a| SUBCOMMANDS.contains(&a.as_str())).cloned();
    let mut extra = Vec::new();
    for (key, value) in &table {
        let key = key.replace('_', "-");
        match value {
            toml::Value::Table(section) => {
                if Some(&key) != sub.as_ref() {
                    continue;
                }
                for (k, v) in section {
                    let k = k.replace('_', "-");
                    if !flag_present(&argv, &k) {
                        extra.extend(config_value(&k, v)?.into_iter().flatten());
                    }
                }
            }
            v if !flag_present(&argv, &key) => extra.extend(config_value(&key, v)?.into_iter().flatten()),
            _ => {}
        }
    }
    let mut out = argv;
    out.extend(extra);
    Ok(out)
}

/// Parses, runs and reports; returns the process exit code.
pub fn main_with(args: impl IntoIterator<Item = OsString>) -> i32 {
    let argv: Vec<String> = args.into_iter().map(|a| a.to_string_lossy().into_owned()).collect();
    run_argv(argv, &mut io::stdout())
}

fn run_argv(argv: Vec<String>, stdout: &mut dyn Write) -> i32 {
    let argv = match merge_config(argv) {
        Ok(a) => a,
        Err(e) => {
            diagnostic(&e);
            return e.code();
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            diagnostic(&usage(e.render().to_string().trim_end()));
            return 2;
        }
    };
    if let Command::Replay { manifest_file } = &cli.command {
        return match replay_argv(manifest_file) {
            Ok(recorded) => run_argv(recorded, stdout),
            Err(e) => {
                diagnostic(&e);
                e.code()
            }
        };
    }
    if let Some(j) = cli.jobs {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global();
    }
    let start = Instant::now();
    let report = match execute(&cli) {
        Ok(r) => r,
        Err(e) => {
            diagnostic(&e);
            return e.code();
        }
    };
    if stdout.write_all(report.stdout.as_bytes()).and_then(|_| stdout.flush()).is_err() {
        return 3;
    }
    if matches!(cli.command, Command::Oracle(_)) {
        return report.code;
    }
    let mut outputs = serde_json::Map::new();
    outputs.insert("stdout".into(), json!(sha256(report.stdout.as_bytes())));
    for (p, digest) in &report.files {
        outputs.insert(p.display().to_string(), json!(digest));
    }
    let manifest = RunManifest {
        command: command_name(&cli.command).into(),
        argv: argv.clone(),
        config: serde_json::to_value(&cli).unwrap_or(Value::Null),
        seed: cli.seed,
        version: env!("CARGO_PKG_VERSION").into(),
        elapsed_ms: start.elapsed().as_millis(),
        exit_code: report.code,
        outputs,
        extra: report.extra,
    };
    let text = serde_json::to_string(&manifest).expect("manifest serializes");
    eprintln!("{}", json!({ "manifest": manifest }));
    if let Some(path) = &cli.manifest {
        if let Err(e) = fs::write(path, text) {
            diagnostic(&usage(format!("{}: {e}", path.display())));
            return 2;
        }
    }
    report.code
}

fn replay_argv(path: &Path) -> Result<Vec<String>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let m: RunManifest = serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    // The replay must not overwrite the manifest it reads.
    let mut argv = Vec::with_capacity(m.argv.len());
    let mut skip = false;
    for a in m.argv {
        if std::mem::take(&mut skip) {
            continue;
        }
        if a == "--manifest" {
            skip = true;
        } else if !a.starts_with("--manifest=") {
            argv.push(a);
        }
    }
    Ok(argv)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Learn(_) => "learn",
        Command::Certify(_) => "certify",
        Command::Robust(_) => "robust",
        Command::Distance(_) => "distance",
        Command::Sample(_) => "sample",
        Command::Eval(_) => "eval",
        Command::Oracle(_) => "oracle",
        Command::Replay { .. } => "replay",
    }
}

fn read_dra(path: &Path) -> Result<Dra, CliError> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    Dra::from_json(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn read_samples(path: &Path) -> Result<SampleSet, CliError> {
    let file = fs::File::open(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    SampleSet::read_jsonl(BufReader::new(file)).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn metric(text: &str) -> Result<MetricKind, CliError> {
    text.parse().map_err(usage)
}

fn sequence(text: &str) -> Result<Vec<Rational>, CliError> {
    parse_sequence(text).map_err(usage)
}

fn dra_value(dra: &Dra) -> Value {
    serde_json::from_str(&dra.to_json()).expect("automaton json")
}

fn execute(cli: &Cli) -> Result<Report, CliError> {
    match &cli.command {
        Command::Learn(a) => learn(a, cli.seed),
        Command::Certify(a) => certify(a, cli.seed),
        Command::Robust(a) => robust(a),
        Command::Distance(a) => distance(a),
        Command::Sample(a) => sample(a, cli.seed),
        Command::Eval(a) => eval(a),
        Command::Oracle(a) => oracle(a),
        Command::Replay { .. } => unreachable!("handled before execution"),
    }
}

fn learn(a: &LearnArgs, seed: u64) -> Result<Report, CliError> {
    let samples = read_samples(&a.samples)?;
    let constants = a.constants.as_deref().map(sequence).transpose()?;
    let (dra, mut summary) = match a.method {
        Method::Localsearch => {
            let space = SearchSpace::new(a.states, a.registers, constants.unwrap_or_default()).map_err(usage)?;
            let cfg = SearchConfig {
                max_time: Duration::from_secs(a.max_time),
                max_iterations: a.max_iter,
                restarts: a.restarts,
                seed,
            };
            let out = search(&samples, &space, &cfg).map_err(usage)?;
            let restarts: Vec<Value> = out
                .restarts
                .iter()
                .map(|r| json!({ "score": r.score, "iterations": r.iterations }))
                .collect();
            (out.best.dra, json!({ "method": "localsearch", "restarts": restarts }))
        }
        Method::Smt => {
            let mut cfg = SynthesisConfig::new(
                a.max_states,
                a.max_registers,
                a.max_constants,
                Duration::from_secs(a.timeout),
            )
            .map_err(usage)?;
            if let Some(s) = &a.solver {
                cfg.solver = SolverCommand::parse(s).map_err(usage)?;
            }
            cfg.constant_pool = constants;
            match synthesize(&samples, &cfg) {
                Ok(found) => {
                    let p = &found.params;
                    (
                        found.dra,
                        json!({
                            "method": "smt",
                            "solver": cfg.solver.to_string(),
                            "states": p.states,
                            "registers": p.registers,
                            "constants": p.num_constants(),
                            "candidates_tried": found.candidates_tried,
                        }),
                    )
                }
                Err(SmtError::BudgetExhausted { n, k, c }) => {
                    let v = json!({
                        "method": "smt",
                        "status": "budget-exhausted",
                        "last_candidate": { "states": n, "registers": k, "constants": c },
                    });
                    return Ok(Report::json(&v, 1));
                }
                Err(e) => return Err(internal(e)),
            }
        }
    };
    let s = score(&dra, &samples).map_err(usage)?;
    summary["score"] = json!(s);
    summary["dra"] = dra_value(&dra);
    let mut report = Report::json(&summary, 0);
    if let Some(out) = &a.out {
        report.write_file(out, dra.to_json().as_bytes())?;
    }
    Ok(report)
}

/// Builds the oracle named by `endpoint`.
pub fn open_oracle(endpoint: &str, timeout: Duration) -> Result<OracleHandle, CliError> {
    if let Some(path) = endpoint.strip_prefix("dra:") {
        return Ok(OracleHandle::from_dra(read_dra(Path::new(path))?));
    }
    if let Some(id) = endpoint.strip_prefix("bench:") {
        let id: BenchmarkId = id.parse().map_err(usage)?;
        return Ok(OracleHandle::from_dra(ground_truth(id)));
    }
    Ok(OracleHandle::new(LineOracle::open(endpoint, timeout).map_err(usage)?))
}

fn certify(a: &CertifyArgs, seed: u64) -> Result<Report, CliError> {
    let dra = read_dra(&a.dra)?;
    let mut params = CertificationParams::new(
        a.p.clone(),
        a.epsilon.clone(),
        a.gamma.clone(),
        a.delta.clone(),
        metric(&a.metric)?,
    )
    .map_err(usage)?
    .with_eta(a.eta.clone())
    .map_err(usage)?;
    params.stability_dedup = a.stability_dedup;
    let mut oracle = open_oracle(&a.oracle, Duration::from_secs(a.timeout))?;
    let mut sampler = build_sampler(a.sampler, a.noise, a.max_len, seed).map_err(usage)?;
    let res = run_certification(&mut oracle, &dra, &mut sampler, &params).map_err(internal)?;
    let code = match res.outcome {
        Outcome::Accept { .. } => 0,
        _ => 1,
    };
    let mut v = res.to_json();
    v["oracle_queries"] = json!(oracle.queries());
    let mut report = Report::json(&v, code);
    report.extra.insert("oracle".into(), json!(a.oracle));
    Ok(report)
}

fn robust(a: &RobustArgs) -> Result<Report, CliError> {
    let dra = read_dra(&a.dra)?;
    let raa = build_metric(&metric(&a.metric)?);
    let v = sequence(&a.v)?;
    let mut q = RobustnessQuery::new(&dra, &v, &raa, a.delta.clone());
    q.side = a.side;
    let verdict = check_robustness(&q).map_err(usage)?;
    Ok(Report::json(&verdict.to_json(), if verdict.robust { 0 } else { 1 }))
}

fn distance(a: &DistanceArgs) -> Result<Report, CliError> {
    let raa = build_metric(&metric(&a.metric)?);
    let d = evaluate(&raa, &sequence(&a.v)?, &sequence(&a.w)?);
    Ok(Report::json(&json!({ "distance": d }), 0))
}

fn sample(a: &SampleArgs, seed: u64) -> Result<Report, CliError> {
    let mut sampler = build_sampler(a.benchmark, a.noise, a.max_len, seed).map_err(usage)?;
    let set = generate(&mut sampler, a.pos, a.neg).map_err(usage)?;
    let text = set.to_jsonl();
    match &a.out {
        Some(path) => {
            let mut report = Report::json(
                &json!({ "benchmark": a.benchmark, "positives": a.pos, "negatives": a.neg, "out": path }),
                0,
            );
            report.write_file(path, text.as_bytes())?;
            Ok(report)
        }
        None => Ok(Report {
            stdout: text,
            code: 0,
            files: Vec::new(),
            extra: serde_json::Map::new(),
        }),
    }
}

fn eval(a: &EvalArgs) -> Result<Report, CliError> {
    let dra = read_dra(&a.dra)?;
    let samples = read_samples(&a.samples)?;
    let s = score(&dra, &samples).map_err(usage)?;
    let correct = samples
        .iter()
        .filter(|(seq, l)| dra.accepts(seq).is_ok_and(|x| x == *l))
        .count();
    Ok(Report::json(
        &json!({ "score": s, "correct": correct, "total": samples.len() }),
        0,
    ))
}

fn oracle(a: &OracleArgs) -> Result<Report, CliError> {
    let dra = match (&a.dra, a.benchmark) {
        (Some(p), _) => read_dra(p)?,
        (None, Some(id)) => ground_truth(id),
        (None, None) => return Err(usage("--dra or --benchmark is required")),
    };
    match &a.tcp {
        Some(addr) => {
            let listener = TcpListener::bind(addr).map_err(|e| usage(format!("{addr}: {e}")))?;
            let local = listener.local_addr().map_err(internal)?;
            eprintln!("{}", json!({ "listening": local.to_string() }));
            serve_tcp(&dra, listener).map_err(internal)?;
        }
        None => {
            let mut o: Box<dyn Oracle> = Box::new(DraOracle(dra));
            let stdin = io::stdin();
            serve(&mut o, stdin.lock(), io::stdout().lock()).map_err(internal)?;
        }
    }
    Ok(Report {
        stdout: String::new(),
        code: 0,
        files: Vec::new(),
        extra: serde_json::Map::new(),
    })
}
