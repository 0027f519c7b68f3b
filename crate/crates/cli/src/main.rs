use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use laminar_secretary::bound::{
    optimize_t0, parse_rank_list, ratio_table, ratio_table_csv, selection_prob_lower_bound, BoundQuery,
    MaxRank, DEFAULT_QUADRATURE_TOL, DEFAULT_TRUNCATION,
};
use laminar_secretary::instances::{
    generate, read_instance, write_instance, GeneratorKind, GeneratorSpec, WeightDistribution,
};
use laminar_secretary::sim::{
    lemma_distribution_test, monte_carlo, run_traced, sample_schedule, AlgorithmKind, AlgorithmSpec,
    LemmaTestConfig,
};
use laminar_secretary::{BoundError, InstanceError, SimError};

const EXIT_USAGE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser)]
#[command(name = "lamsec", version, about = "Laminar matroid secretary: simulation and bound analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a laminar matroid instance.
    Generate(GenerateArgs),
    /// Estimate per-element selection frequencies by Monte Carlo.
    Simulate(SimulateArgs),
    /// Certified lower bound on the selection probability for a threshold.
    Bound(BoundArgs),
    /// Threshold maximizing the bound for one rank (CSV).
    Optimize(OptimizeArgs),
    /// Optimized competitive ratio per rank (CSV).
    Figure(FigureArgs),
    /// Kolmogorov-Smirnov check of the qualified-arrival distributions.
    VerifyLemma(VerifyLemmaArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// uniform, partition, chain or random_laminar
    #[arg(long, default_value = "random_laminar")]
    kind: GeneratorKind,
    #[arg(long)]
    n: usize,
    /// Comma-separated capacities (rank for uniform, per block for partition,
    /// innermost first for chain).
    #[arg(long, value_delimiter = ',')]
    capacities: Vec<u32>,
    #[arg(long, default_value_t = 3)]
    depth: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// uniform, exponential or pareto:<shape>
    #[arg(long, default_value = "uniform")]
    weights: WeightDistribution,
    /// Instance file to write; the document goes to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    instance: PathBuf,
    /// paper or mtw
    #[arg(long, default_value = "paper")]
    algorithm: AlgorithmKind,
    #[arg(long, default_value_t = 0.7)]
    t0: f64,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = default_workers())]
    workers: usize,
    /// Write the per-arrival trace of the first trial as JSON lines.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    pretty: bool,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    t0: f64,
    /// Largest rank covered by the bound, or `inf`.
    #[arg(long, default_value = "inf")]
    max_rank: MaxRank,
    #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
    truncation: u32,
    #[arg(long, default_value_t = DEFAULT_QUADRATURE_TOL)]
    tol: f64,
    #[arg(long)]
    pretty: bool,
}

#[derive(Args)]
struct OptimizeArgs {
    #[arg(long)]
    max_rank: MaxRank,
    #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
    truncation: u32,
    #[arg(long, default_value_t = DEFAULT_QUADRATURE_TOL)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FigureArgs {
    /// Ranks such as `1..10`, `1,2,5` or `3`.
    #[arg(long)]
    ranks: String,
    #[arg(long)]
    include_inf: bool,
    #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
    truncation: u32,
    #[arg(long, default_value_t = DEFAULT_QUADRATURE_TOL)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyLemmaArgs {
    #[arg(long)]
    capacity: u32,
    #[arg(long)]
    n: u32,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    pretty: bool,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }

    fn input(message: impl Into<String>) -> Self {
        Self { code: EXIT_INPUT, message: message.into() }
    }
}

impl From<InstanceError> for Failure {
    fn from(e: InstanceError) -> Self {
        let code = match e {
            InstanceError::Infeasible(_) => EXIT_USAGE,
            _ => EXIT_INPUT,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        let code = match e {
            SimError::InvalidParameter(_) => EXIT_USAGE,
            SimError::Pool(_) => EXIT_NUMERIC,
            _ => EXIT_INPUT,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<BoundError> for Failure {
    fn from(e: BoundError) -> Self {
        let code = match e {
            BoundError::Domain(_) => EXIT_USAGE,
            BoundError::Convergence { .. } => EXIT_NUMERIC,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self::input(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Bound(a) => cmd_bound(a),
        Command::Optimize(a) => cmd_optimize(a),
        Command::Figure(a) => cmd_figure(a),
        Command::VerifyLemma(a) => cmd_verify_lemma(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    serde_json::to_writer(&mut out, value).map_err(|e| Failure::input(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

fn emit_text(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display()))),
        None => {
            io::stdout().lock().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn check_t0(t0: f64) -> Result<(), Failure> {
    if t0 > 0.0 && t0 < 1.0 {
        Ok(())
    } else {
        Err(Failure::usage(format!("--t0 must lie strictly between 0 and 1, got {t0}")))
    }
}

#[derive(Serialize)]
struct GenerateSummary<'a> {
    out: &'a Path,
    spec: &'a GeneratorSpec,
    elements: usize,
    sets: usize,
    rank: usize,
}

fn cmd_generate(a: GenerateArgs) -> Result<(), Failure> {
    let spec = GeneratorSpec {
        kind: a.kind,
        n: a.n,
        capacities: a.capacities,
        depth: a.depth,
        seed: a.seed,
        weights: a.weights,
    };
    let m = generate(&spec)?;
    match &a.out {
        None => write_instance(&m, io::stdout().lock())?,
        Some(path) => {
            let file =
                File::create(path).map_err(|e| Failure::input(format!("cannot create {}: {e}", path.display())))?;
            write_instance(&m, BufWriter::new(file))?;
            print_json(&GenerateSummary {
                out: path,
                spec: &spec,
                elements: m.len(),
                sets: m.nodes().len(),
                rank: m.rank(),
            })?;
        }
    }
    Ok(())
}

fn cmd_simulate(a: SimulateArgs) -> Result<(), Failure> {
    check_t0(a.t0)?;
    if a.trials == 0 {
        return Err(Failure::usage("--trials must be at least 1"));
    }
    if a.workers == 0 {
        return Err(Failure::usage("--workers must be at least 1"));
    }
    let file = File::open(&a.instance)
        .map_err(|e| Failure::input(format!("cannot open {}: {e}", a.instance.display())))?;
    let m = read_instance(io::BufReader::new(file))?;
    let spec = AlgorithmSpec::new(a.algorithm, a.t0)?;
    let est = monte_carlo(&m, &spec, a.trials, a.seed, a.workers)?;

    if let Some(path) = &a.trace {
        // trial 0 uses the base seed
        let schedule = sample_schedule(&m, a.seed);
        let (_, records) = run_traced(&m, &schedule, &spec)?;
        let file =
            File::create(path).map_err(|e| Failure::input(format!("cannot create {}: {e}", path.display())))?;
        let mut w = BufWriter::new(file);
        for r in &records {
            serde_json::to_writer(&mut w, r).map_err(|e| Failure::input(e.to_string()))?;
            writeln!(w)?;
        }
        w.flush()?;
    }

    if !a.pretty {
        return print_json(&est);
    }
    let mut out = io::stdout().lock();
    writeln!(out, "algorithm  {} (t0 = {})", est.algorithm.kind, est.algorithm.t0)?;
    writeln!(out, "trials     {} (seed {})", est.trials, est.base_seed)?;
    writeln!(out, "{:>10}  {:>10}  {:>10}", "element", "frequency", "std err")?;
    for (id, p) in &est.per_element_frequency {
        writeln!(out, "{:>10}  {:>10.6}  {:>10.6}", id.to_string(), p, est.std_error_per_element[id])?;
    }
    writeln!(out, "min frequency  {:.6}", est.min_frequency)?;
    writeln!(out, "utility ratio  {:.6} ± {:.6}", est.utility_ratio, est.utility_std_error)?;
    Ok(())
}

fn cmd_bound(a: BoundArgs) -> Result<(), Failure> {
    check_t0(a.t0)?;
    let q = BoundQuery { t0: a.t0, max_rank: a.max_rank, truncation: a.truncation, quadrature_tol: a.tol };
    let r = selection_prob_lower_bound(&q)?;
    if !a.pretty {
        return print_json(&r);
    }
    let mut out = io::stdout().lock();
    writeln!(out, "t0               {}", r.t0)?;
    writeln!(out, "max rank         {}", r.max_rank)?;
    writeln!(out, "truncation       {}", r.truncation)?;
    writeln!(out, "lower bound      {:.10}", r.lower_bound)?;
    writeln!(out, "tail error       {:.3e}", r.tail_error)?;
    writeln!(out, "quadrature error {:.3e}", r.quadrature_error)?;
    writeln!(out, "ratio            {:.6}", r.ratio)?;
    Ok(())
}

fn cmd_optimize(a: OptimizeArgs) -> Result<(), Failure> {
    let o = optimize_t0(a.max_rank, a.truncation, a.tol)?;
    let csv = format!("rank,t0_star,ratio\n{},{:.6},{:.6}\n", o.max_rank, o.t0_star, o.ratio);
    emit_text(&csv, a.out.as_deref())
}

fn cmd_figure(a: FigureArgs) -> Result<(), Failure> {
    let ranks = parse_rank_list(&a.ranks).map_err(|e| Failure::usage(format!("--ranks: {e}")))?;
    let rows = ratio_table(&ranks, a.include_inf, a.truncation, a.tol)?;
    emit_text(&ratio_table_csv(&rows), a.out.as_deref())
}

fn cmd_verify_lemma(a: VerifyLemmaArgs) -> Result<(), Failure> {
    let cfg = LemmaTestConfig { capacity: a.capacity, n_elements: a.n, t: a.t, trials: a.trials, seed: a.seed };
    let r = lemma_distribution_test(&cfg)?;
    if !a.pretty {
        return print_json(&r);
    }
    let verdict = |ok: bool| if ok { "pass" } else { "FAIL" };
    let mut out = io::stdout().lock();
    writeln!(out, "capacity {}  n {}  t {}  trials {}", a.capacity, a.n, a.t, a.trials)?;
    writeln!(out, "effective trials {} (discard rate {:.4})", r.effective_trials, r.discard_rate)?;
    writeln!(out, "95% critical     {:.6}", r.critical_value_95)?;
    writeln!(out, "ks exponential   {:.6}  {}", r.ks_exp, verdict(r.pass_exp))?;
    writeln!(out, "ks gamma         {:.6}  {}", r.ks_gamma, verdict(r.pass_gamma))?;
    Ok(())
}
