//! `labs-pce` command-line front end.
//!
//! Every subcommand writes one JSON document (or JSON lines for `bench`)
//! to `--out`, or to stdout when `--out` is omitted. Exit status is 0 on
//! success, 2 on invalid input and 1 on runtime failure.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use labs_pce::baselines::{
    exact_solve, memetic_tabu, pce_warm_start, random_population, skew_symmetric_search, tabu_search, MemeticConfig,
    TabuConfig, WarmStartConfig, DEFAULT_POPULATION, MAX_EXACT_N,
};
use labs_pce::bench::{
    crossover, fit_exponential, ks_two_sample, read_jsonl, run_campaign, shot_bound, tune_sweep, write_csv,
    write_jsonl, CampaignSpec, FitMode, FitOptions, FitResult, Overhead, Parity, ScalingLaw, ShotBudgetQuery,
    SolverTag, SweepSetting, Target,
};
use labs_pce::labs::{canonicalize, is_skew_symmetric};
use labs_pce::pauli::{mub_partition, sample_set_seeded};
use labs_pce::pce::{self, OptimizerConfig};
use labs_pce::seed::derive_seed;
use labs_pce::{BinarySequence, EnergyLevels, EnergyReport, Error, PauliMode, PceConfig, SCHEMA_VERSION};

const OUT_DIR_ENV: &str = "LABS_PCE_OUT_DIR";
const WORKERS_ENV: &str = "LABS_PCE_WORKERS";

#[derive(Parser)]
#[command(name = "labs-pce", version, about = "LABS solvers, Pauli correlation encoding and TTS analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Output {
    /// Output file; relative paths resolve against $LABS_PCE_OUT_DIR when set.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Energy, merit factor and autocorrelations of one sequence.
    Eval {
        #[arg(long)]
        sequence: String,
        #[command(flatten)]
        output: Output,
    },
    /// Exhaustive optimum and lowest energy levels.
    Exact {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        levels: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Best skew-symmetric sequence of odd length.
    Skew {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        output: Output,
    },
    /// PCE variational solver.
    SolvePce(PceArgs),
    /// Tabu search, or memetic tabu with --memetic.
    SolveTabu(TabuArgs),
    /// PCE runs seeding a memetic tabu population.
    WarmStart(WarmStartArgs),
    /// Seeded campaign over instance sizes, written as JSON lines.
    Bench(BenchArgs),
    /// Exponential TTS fit over campaign records.
    Fit(FitArgs),
    /// Two-sample Kolmogorov-Smirnov test.
    Ks(KsArgs),
    /// Smallest setting with no significant improvement beyond it.
    Tune(TuneArgs),
    /// Shots per correlator for a target loss precision.
    ShotBound(ShotArgs),
    /// Instance size where the overhead-adjusted quantum law undercuts the classical one.
    Crossover(CrossoverArgs),
    /// Correlator sets or the full commuting-class partition.
    PauliGen(PauliArgs),
}

#[derive(Args)]
struct LevelArgs {
    /// Ascending reference energies (exact, then next levels); computed
    /// exhaustively for N <= 32 when omitted.
    #[arg(long, value_delimiter = ',')]
    levels: Option<Vec<i64>>,
}

impl LevelArgs {
    fn resolve(&self, n: usize) -> Result<Option<EnergyLevels>, Error> {
        match &self.levels {
            Some(list) => {
                if list.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::InvalidInput("--levels must be strictly ascending".into()));
                }
                EnergyLevels::from_levels(list).map(Some).ok_or_else(|| Error::InvalidInput("--levels is empty".into()))
            }
            None if n <= MAX_EXACT_N && n >= 3 => Ok(Some(exact_solve(n, 3)?.levels())),
            None => Ok(None),
        }
    }
}

#[derive(Args)]
struct PceArgs {
    #[arg(long)]
    n: usize,
    /// JSON solver configuration; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    qubits: Option<usize>,
    #[arg(long)]
    layers: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    pauli_mode: Option<PauliMode>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    max_restarts: Option<usize>,
    /// 0 disables early restarts.
    #[arg(long)]
    patience: Option<usize>,
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    max_evals: Option<u64>,
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    levels: LevelArgs,
    #[command(flatten)]
    output: Output,
}

impl PceArgs {
    fn config(&self) -> Result<PceConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => read_json::<PceConfig>(path)?,
            None => PceConfig::for_qubits(self.qubits.unwrap_or(4)),
        };
        if let (Some(q), Some(_)) = (self.qubits, &self.config) {
            cfg.qubits = q;
        }
        if let Some(v) = self.layers {
            cfg.layers = v;
        }
        if let Some(v) = self.alpha {
            cfg.alpha = v;
        }
        if let Some(v) = self.beta {
            cfg.beta = v;
        }
        if let Some(v) = self.pauli_mode {
            cfg.pauli_mode = v;
        }
        if let Some(v) = self.iterations {
            cfg.iterations = v;
        }
        if let Some(v) = self.max_restarts {
            cfg.max_restarts = v;
        }
        if let Some(v) = self.patience {
            cfg.patience = (v > 0).then_some(v);
        }
        if let Some(step) = self.step {
            cfg.optimizer = match cfg.optimizer {
                OptimizerConfig::Adam { beta1, beta2, epsilon, .. } => OptimizerConfig::Adam { step, beta1, beta2, epsilon },
                OptimizerConfig::GradientDescent { .. } => OptimizerConfig::GradientDescent { step },
            };
        }
        if self.max_evals.is_some() {
            cfg.max_evals = self.max_evals;
        }
        if let Some(v) = self.shots {
            cfg.shots = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct TabuArgs {
    #[arg(long)]
    n: usize,
    /// JSON tabu (or memetic, with --memetic) configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    memetic: bool,
    #[arg(long, default_value_t = DEFAULT_POPULATION)]
    population: usize,
    #[arg(long)]
    max_evals: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    levels: LevelArgs,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct WarmStartArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    pce_runs: Option<usize>,
    #[arg(long)]
    copies: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    levels: LevelArgs,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct BenchArgs {
    /// Campaign specification (JSON), or `{"campaigns": [...]}`.
    #[arg(long)]
    config: PathBuf,
    #[arg(long, env = WORKERS_ENV)]
    workers: Option<usize>,
    /// Overrides the campaign's base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Also write a CSV of the chosen target counter.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long, default_value = "exact")]
    csv_target: Target,
    #[arg(long)]
    record_wall_time: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct FitArgs {
    /// JSON-lines records as written by `bench`.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value = "median")]
    mode: FitMode,
    #[arg(long, default_value = "exact")]
    target: Target,
    #[arg(long, default_value = "all")]
    parity: Parity,
    #[arg(long)]
    solver: Option<SolverTag>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct KsArgs {
    /// Comma-separated sample.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    a: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    b: Option<Vec<f64>>,
    /// JSON file `{"a": [...], "b": [...]}` instead of inline samples.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct TuneArgs {
    /// JSON file `{"settings": [{"value": v, "samples": [...]}, ...]}` in ascending order.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    threshold: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct ShotArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    beta: f64,
    #[arg(long)]
    epsilon: f64,
    #[arg(long)]
    delta: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct CrossoverArgs {
    /// Quantum fit document (output of `fit`); alternative to --cq/--bq.
    #[arg(long)]
    quantum_fit: Option<PathBuf>,
    #[arg(long)]
    classical_fit: Option<PathBuf>,
    #[arg(long)]
    cq: Option<f64>,
    #[arg(long)]
    bq: Option<f64>,
    #[arg(long)]
    cc: Option<f64>,
    #[arg(long)]
    bc: Option<f64>,
    /// Constant overhead factor on the quantum cost.
    #[arg(long, default_value_t = 1.0)]
    k: f64,
    /// Polynomial overhead power on the quantum cost.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    p: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct PauliArgs {
    #[arg(long)]
    qubits: usize,
    /// Set size; omit together with --partition to list every class.
    #[arg(long)]
    count: Option<usize>,
    #[arg(long, default_value = "anticommuting")]
    mode: PauliMode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    partition: bool,
    #[command(flatten)]
    output: Output,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn resolve_out(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn open_out(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Error> {
    match path {
        Some(p) => {
            let full = resolve_out(p);
            if let Some(parent) = full.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(|e| Error::Runtime(format!("{}: {e}", parent.display())))?;
            }
            let f = File::create(&full).map_err(|e| Error::Runtime(format!("{}: {e}", full.display())))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Error> {
    let f = File::open(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    serde_json::from_reader(BufReader::new(f)).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

/// A single campaign, or `{"campaigns": [...]}` run in order.
fn read_campaigns(path: &Path) -> Result<Vec<CampaignSpec>, Error> {
    let doc: Value = read_json(path)?;
    let parse = |v: Value| serde_json::from_value::<CampaignSpec>(v).map_err(|e| invalid(format!("{}: {e}", path.display())));
    match doc {
        Value::Object(mut map) if map.contains_key("campaigns") => match map.remove("campaigns") {
            Some(Value::Array(list)) => list.into_iter().map(parse).collect(),
            _ => Err(invalid(format!("{}: \"campaigns\" must be an array", path.display()))),
        },
        other => Ok(vec![parse(other)?]),
    }
}

/// Writes `{"schema_version", "command", "config", "result"}`.
fn emit<R: Serialize>(output: &Output, command: &str, config: Value, result: &R) -> Result<(), Error> {
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": config,
        "result": result,
    });
    let mut out = open_out(&output.out)?;
    let text = serde_json::to_string_pretty(&doc).map_err(|e| Error::Runtime(e.to_string()))?;
    writeln!(out, "{text}").and_then(|_| out.flush()).map_err(|e| Error::Runtime(e.to_string()))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("configs serialize")
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Eval { sequence, output } => {
            let x: BinarySequence = sequence.parse()?;
            let report = EnergyReport::of(&x);
            let result = json!({
                "sequence": x,
                "n": report.n,
                "energy": report.energy,
                "merit_factor": report.merit_factor,
                "autocorrelations": report.autocorrelations,
                "canonical": canonicalize(&x),
                "skew_symmetric": x.len() % 2 == 1 && is_skew_symmetric(&x),
            });
            emit(&output, "eval", json!({ "sequence": sequence }), &result)
        }
        Command::Exact { n, levels, output } => {
            let r = exact_solve(n, levels)?;
            emit(&output, "exact", json!({ "n": n, "levels": levels }), &r)
        }
        Command::Skew { n, output } => {
            let r = skew_symmetric_search(n)?;
            emit(&output, "skew", json!({ "n": n }), &r)
        }
        Command::SolvePce(args) => {
            let cfg = args.config()?;
            let levels = args.levels.resolve(args.n)?;
            let r = pce::solve(args.n, &cfg, levels)?;
            emit(&args.output, "solve-pce", json!({ "n": args.n, "levels": levels, "solver": cfg }), &r)
        }
        Command::SolveTabu(args) => {
            let levels = args.levels.resolve(args.n)?;
            if args.memetic {
                let mut cfg = match &args.config {
                    Some(p) => read_json::<MemeticConfig>(p)?,
                    None => MemeticConfig::default(),
                };
                if let Some(s) = args.seed {
                    cfg.seed = s;
                }
                if let Some(m) = args.max_evals {
                    cfg.max_evals = m;
                }
                let population = random_population(args.n, args.population, cfg.seed)?;
                let r = memetic_tabu(&population, &cfg, levels)?;
                let config = json!({ "n": args.n, "levels": levels, "population": args.population, "solver": cfg });
                emit(&args.output, "solve-tabu", config, &r)
            } else {
                let mut cfg = match &args.config {
                    Some(p) => read_json::<TabuConfig>(p)?,
                    None => TabuConfig::default(),
                };
                if let Some(s) = args.seed {
                    cfg.seed = s;
                }
                if let Some(m) = args.max_evals {
                    cfg.max_evals = m;
                }
                let r = tabu_search(args.n, &cfg, levels)?;
                emit(&args.output, "solve-tabu", json!({ "n": args.n, "levels": levels, "solver": cfg }), &r)
            }
        }
        Command::WarmStart(args) => {
            let mut cfg = match &args.config {
                Some(p) => read_json::<WarmStartConfig>(p)?,
                None => WarmStartConfig::default(),
            };
            if let Some(v) = args.pce_runs {
                cfg.pce_runs = v;
            }
            if let Some(v) = args.copies {
                cfg.copies = v;
            }
            if let Some(s) = args.seed {
                cfg.pce.seed = s;
                cfg.memetic.seed = derive_seed(s, &[1]);
            }
            let levels = args.levels.resolve(args.n)?;
            let r = pce_warm_start(args.n, &cfg, levels)?;
            emit(&args.output, "warm-start", json!({ "n": args.n, "levels": levels, "solver": cfg }), &r)
        }
        Command::Bench(args) => {
            let specs = read_campaigns(&args.config)?;
            let mut records = Vec::new();
            for mut spec in specs {
                if let Some(s) = args.seed {
                    spec.base_seed = s;
                }
                spec.record_wall_time |= args.record_wall_time;
                records.extend(run_campaign(&spec, args.workers)?);
            }
            let mut out = open_out(&args.output.out)?;
            write_jsonl(&records, &mut out)?;
            out.flush().map_err(|e| Error::Runtime(e.to_string()))?;
            if let Some(csv) = &args.csv {
                write_csv(&records, args.csv_target, open_out(&Some(csv.clone()))?)?;
            }
            Ok(())
        }
        Command::Fit(args) => {
            let f = File::open(&args.input).map_err(|e| invalid(format!("{}: {e}", args.input.display())))?;
            let records = read_jsonl(BufReader::new(f))?;
            let options = FitOptions { mode: args.mode, target: args.target, parity: args.parity, solver: args.solver };
            let fit = fit_exponential(&records, &options)?;
            emit(&args.output, "fit", json!({ "in": args.input, "options": options }), &fit)
        }
        Command::Ks(args) => {
            let (a, b) = match (&args.input, args.a, args.b) {
                (Some(path), None, None) => {
                    let doc: BTreeMap<String, Vec<f64>> = read_json(path)?;
                    let get = |k: &str| doc.get(k).cloned().ok_or_else(|| invalid(format!("missing sample {k:?}")));
                    (get("a")?, get("b")?)
                }
                (None, Some(a), Some(b)) => (a, b),
                _ => return Err(invalid("give either --in or both --a and --b")),
            };
            let r = ks_two_sample(&a, &b)?;
            emit(&args.output, "ks", json!({ "a": a, "b": b }), &r)
        }
        Command::Tune(args) => {
            #[derive(serde::Deserialize)]
            struct Sweep {
                settings: Vec<SweepSetting>,
            }
            let sweep: Sweep = read_json(&args.input)?;
            let r = tune_sweep(&sweep.settings, args.threshold)?;
            emit(&args.output, "tune", json!({ "in": args.input, "threshold": args.threshold }), &r)
        }
        Command::ShotBound(args) => {
            let q = ShotBudgetQuery { n: args.n, alpha: args.alpha, beta: args.beta, epsilon: args.epsilon, delta: args.delta };
            let r = shot_bound(&q)?;
            emit(&args.output, "shot-bound", to_value(&q), &r)
        }
        Command::Crossover(args) => {
            let law = |fit: &Option<PathBuf>, c: Option<f64>, b: Option<f64>, which: &str| -> Result<ScalingLaw, Error> {
                match (fit, c, b) {
                    (Some(path), None, None) => {
                        let doc: Value = read_json(path)?;
                        let inner = doc.get("result").cloned().unwrap_or(doc);
                        let fit: FitResult = serde_json::from_value(inner).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
                        Ok(fit.law())
                    }
                    (None, Some(c), Some(b)) => Ok(ScalingLaw { c, b }),
                    _ => Err(invalid(format!("give the {which} law either as a fit file or as both constants"))),
                }
            };
            let q = law(&args.quantum_fit, args.cq, args.bq, "quantum")?;
            let c = law(&args.classical_fit, args.cc, args.bc, "classical")?;
            let overhead = Overhead { k: args.k, p: args.p };
            let r = crossover(&q, &c, &overhead)?;
            emit(&args.output, "crossover", json!({ "quantum": q, "classical": c, "overhead": overhead }), &r)
        }
        Command::PauliGen(args) => {
            if args.partition {
                let classes = mub_partition(args.qubits)?;
                emit(&args.output, "pauli-gen", json!({ "qubits": args.qubits, "partition": true }), &classes)
            } else {
                let count = args.count.ok_or_else(|| invalid("--count is required unless --partition is given"))?;
                let set = sample_set_seeded(args.mode, args.qubits, count, args.seed)?;
                let config = json!({ "qubits": args.qubits, "count": count, "mode": args.mode, "seed": args.seed });
                emit(&args.output, "pauli-gen", config, &set)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 1 })
        }
    }
}
