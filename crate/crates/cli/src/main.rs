//! Command-line front end: solve, structural checks, graph generation,
//! witness verification, and corpus benchmarking over DIMACS `.col`
//! files.
//!
//! Exit codes for `solve`: 0 SAT, 1 UNSAT, 2 input error or not P5-free,
//! 3 instance budget exceeded. `check`: 0 P5-free, 1 not. `verify`:
//! 0 valid witness, 1 invalid. Everything else: 0 ok, 2 error.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use p5color::solver::SeedPreference;
use p5color::testkit::{self, GenSpec};
use p5color::{
    k_colourable, read_dimacs, solve_list_colouring, verify_colouring, write_dimacs, ColourSet,
    Colouring, Graph, Instance, Method, Outcome, SolveConfig, SolveError, TraceEvent, Validate,
};

#[derive(Parser)]
#[command(
    name = "p5color",
    about = "Exact k-colouring of P5-free graphs",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide k-colourability (or restricted list colourability) of a graph
    Solve(SolveArgs),
    /// Test whether a graph is P5-free; print a certificate if not
    Check { input: PathBuf },
    /// Generate a P5-free graph and write it as DIMACS
    Gen(GenArgs),
    /// Check a colouring file against a graph (and optional lists)
    Verify(VerifyArgs),
    /// Run the solver over a corpus manifest and emit CSV measurements
    Bench(BenchArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// DIMACS .col input
    input: PathBuf,
    /// Number of colours
    #[arg(short, long)]
    k: u32,
    /// Optional per-vertex colour lists ("v: c1 c2 ..." lines, 1-based)
    #[arg(long)]
    lists: Option<PathBuf>,
    /// Dependency-removal method
    #[arg(long, default_value = "two")]
    method: Method,
    /// Scan the input for an induced P5 before solving
    #[arg(long)]
    validate: bool,
    /// Abort after creating this many instances
    #[arg(long, default_value_t = 10_000_000)]
    max_instances: u64,
    /// Parallel branch workers (1 = deterministic)
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Stream branch events to stderr (also enabled by P5COLOR_TRACE)
    #[arg(long)]
    trace: bool,
    /// Suppress the trace stream
    #[arg(long)]
    quiet: bool,
    /// Where to write the colouring (default: <input>.sol)
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Include wall-clock time in the report (off by default so reports
    /// are byte-identical across runs)
    #[arg(long)]
    timings: bool,
    /// Search a dominating P3 before dominating cliques
    #[arg(long)]
    prefer_p3: bool,
}

#[derive(Args)]
struct GenArgs {
    /// Graph family: split, cograph, multipartite, er
    #[arg(long)]
    family: String,
    /// Vertex count (ignored for multipartite)
    #[arg(long, default_value_t = 10)]
    n: usize,
    /// RNG seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Edge density for split / er
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    /// Part sizes for multipartite, e.g. 2,2,2
    #[arg(long)]
    parts: Option<String>,
    /// Output path (stdout when omitted)
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// DIMACS .col graph
    graph: PathBuf,
    /// Colouring file ("v c" lines, 1-based)
    colouring: PathBuf,
    /// Number of colours
    #[arg(short, long)]
    k: u32,
    /// Optional lists file the colouring must respect
    #[arg(long)]
    lists: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Corpus manifest (one generator spec per line)
    #[arg(long)]
    corpus: PathBuf,
    /// Number of colours
    #[arg(short, long)]
    k: u32,
    /// one, two, or both
    #[arg(long, default_value = "both")]
    method: String,
    /// Abort a run after creating this many instances
    #[arg(long, default_value_t = 10_000_000)]
    max_instances: u64,
    /// CSV output path (stdout when omitted)
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Check { input } => cmd_check(&input),
        Command::Gen(args) => cmd_gen(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match run {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn load_graph(path: &Path) -> Result<Graph> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    read_dimacs(&text).with_context(|| format!("cannot parse {}", path.display()))
}

/// Parses a lists file: one `v: c1 c2 ...` line per constrained vertex
/// (1-based), `#` comments, missing vertices keep the full {1..k} list.
fn parse_lists(text: &str, g: &Graph, k: u32) -> Result<Vec<ColourSet>> {
    let mut lists = vec![ColourSet::full(k); g.universe()];
    let mut seen = vec![false; g.universe()];
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (head, tail) = trimmed
            .split_once(':')
            .ok_or_else(|| anyhow!("lists line {line}: expected `v: c1 c2 ...`"))?;
        let v: usize = head
            .trim()
            .parse()
            .map_err(|_| anyhow!("lists line {line}: bad vertex `{head}`"))?;
        if v < 1 || v > g.universe() {
            bail!(
                "lists line {line}: vertex {v} out of range 1..={}",
                g.universe()
            );
        }
        if seen[v - 1] {
            bail!("lists line {line}: vertex {v} listed twice");
        }
        seen[v - 1] = true;
        let mut set = ColourSet::EMPTY;
        for tok in tail.split_whitespace() {
            let c: u32 = tok
                .parse()
                .map_err(|_| anyhow!("lists line {line}: bad colour `{tok}`"))?;
            if c < 1 || c > k {
                bail!("lists line {line}: colour {c} out of range 1..={k}");
            }
            set = set.with(c);
        }
        lists[v - 1] = set;
    }
    Ok(lists)
}

/// Parses a colouring file: `v c` per line, 1-based.
fn parse_colouring(text: &str) -> Result<Colouring> {
    let mut col = Colouring::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let (Some(v), Some(c), None) = (tokens.next(), tokens.next(), tokens.next()) else {
            bail!("colouring line {line}: expected `v c`");
        };
        let v: usize = v
            .parse()
            .map_err(|_| anyhow!("colouring line {line}: bad vertex"))?;
        let c: u32 = c
            .parse()
            .map_err(|_| anyhow!("colouring line {line}: bad colour"))?;
        if v < 1 {
            bail!("colouring line {line}: vertices are 1-based");
        }
        col.insert(v - 1, c);
    }
    Ok(col)
}

fn colouring_text(col: &Colouring) -> String {
    let mut out = String::new();
    for (v, c) in col.iter() {
        let _ = writeln!(out, "{} {}", v + 1, c);
    }
    out
}

fn trace_enabled(flag: bool, quiet: bool) -> bool {
    if quiet {
        return false;
    }
    flag || std::env::var("P5COLOR_TRACE")
        .map(|v| !v.is_empty() && v != "0")
        .unwrap_or(false)
}

/// Outcome of one `solve` run: the machine-readable document printed on
/// stdout. Rendering is fixed-order `key: value` lines, byte-identical
/// across runs unless `millis` is requested.
struct RunReport {
    input: PathBuf,
    k: u32,
    method: Method,
    decision: RunDecision,
    millis: Option<u128>,
}

enum RunDecision {
    Sat {
        colouring_path: PathBuf,
        metrics: p5color::SolveMetrics,
    },
    Unsat {
        metrics: p5color::SolveMetrics,
    },
    NotP5Free {
        origin: p5color::Origin,
        certificate: p5color::P5Certificate,
    },
    BudgetExceeded {
        created: u64,
        budget: u64,
    },
}

impl RunReport {
    fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "p5color solve report");
        let _ = writeln!(out, "input: {}", self.input.display());
        let _ = writeln!(out, "k: {}", self.k);
        let _ = writeln!(out, "method: {}", self.method);
        match &self.decision {
            RunDecision::Sat {
                colouring_path,
                metrics,
            } => {
                let _ = writeln!(out, "decision: sat");
                let _ = writeln!(out, "colouring: {}", colouring_path.display());
                render_metrics(&mut out, metrics);
            }
            RunDecision::Unsat { metrics } => {
                let _ = writeln!(out, "decision: unsat");
                render_metrics(&mut out, metrics);
            }
            RunDecision::NotP5Free {
                origin,
                certificate,
            } => {
                let _ = writeln!(out, "decision: not-p5-free");
                let _ = writeln!(out, "origin: {origin}");
                let _ = writeln!(out, "certificate: {certificate}");
            }
            RunDecision::BudgetExceeded { created, budget } => {
                let _ = writeln!(out, "decision: budget-exceeded");
                let _ = writeln!(out, "created: {created}");
                let _ = writeln!(out, "budget: {budget}");
            }
        }
        if let Some(ms) = self.millis {
            let _ = writeln!(out, "millis: {ms}");
        }
        out
    }

    fn exit_code(&self) -> ExitCode {
        match self.decision {
            RunDecision::Sat { .. } => ExitCode::SUCCESS,
            RunDecision::Unsat { .. } => ExitCode::from(1),
            RunDecision::NotP5Free { .. } => ExitCode::from(2),
            RunDecision::BudgetExceeded { .. } => ExitCode::from(3),
        }
    }
}

fn render_metrics(out: &mut String, m: &p5color::SolveMetrics) {
    let _ = writeln!(out, "instances: {}", m.instances_created);
    let _ = writeln!(out, "max_depth: {}", m.max_depth);
    let _ = writeln!(out, "dominating_searches: {}", m.dominating_searches);
}

fn cmd_solve(args: SolveArgs) -> Result<ExitCode> {
    let graph = load_graph(&args.input)?;
    let instance = match &args.lists {
        None => Instance::full(Arc::new(graph), args.k),
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read {}", path.display()))?;
            let lists = parse_lists(&text, &graph, args.k)?;
            Instance::with_lists(Arc::new(graph), args.k, lists)
        }
    };
    let cfg = SolveConfig {
        method: args.method,
        validate: if args.validate {
            Validate::FullP5Check
        } else {
            Validate::Off
        },
        max_instances: Some(args.max_instances),
        jobs: args.jobs,
        seed_preference: if args.prefer_p3 {
            SeedPreference::P3First
        } else {
            SeedPreference::SmallestCliqueThenP3
        },
        trace: trace_enabled(args.trace, args.quiet)
            .then(|| Arc::new(|ev: &TraceEvent| eprintln!("{ev}")) as _),
    };

    let started = Instant::now();
    let decision = match solve_list_colouring(&instance, &cfg) {
        Ok(decision) => match decision.outcome {
            Outcome::Sat(col) => {
                let colouring_path = args
                    .output
                    .clone()
                    .unwrap_or_else(|| with_sol_extension(&args.input));
                fs::write(&colouring_path, colouring_text(&col))
                    .with_context(|| format!("cannot write {}", colouring_path.display()))?;
                RunDecision::Sat {
                    colouring_path,
                    metrics: decision.metrics,
                }
            }
            Outcome::Unsat => RunDecision::Unsat {
                metrics: decision.metrics,
            },
        },
        Err(SolveError::NotP5Free {
            origin,
            certificate,
        }) => RunDecision::NotP5Free {
            origin,
            certificate,
        },
        Err(SolveError::BudgetExceeded { created, budget }) => {
            RunDecision::BudgetExceeded { created, budget }
        }
    };
    let report = RunReport {
        input: args.input,
        k: args.k,
        method: args.method,
        decision,
        millis: args.timings.then(|| started.elapsed().as_millis()),
    };
    print!("{}", report.render());
    Ok(report.exit_code())
}

fn with_sol_extension(input: &Path) -> PathBuf {
    let mut name = input.as_os_str().to_os_string();
    name.push(".sol");
    PathBuf::from(name)
}

fn cmd_check(input: &Path) -> Result<ExitCode> {
    let graph = load_graph(input)?;
    match p5color::find_induced_p5(&graph) {
        None => {
            println!("p5-free: yes");
            Ok(ExitCode::SUCCESS)
        }
        Some(cert) => {
            println!("p5-free: no");
            println!("certificate: {cert}");
            Ok(ExitCode::from(1))
        }
    }
}

fn cmd_gen(args: GenArgs) -> Result<ExitCode> {
    let spec = match args.family.as_str() {
        "split" => GenSpec::Split {
            n: args.n,
            density: args.density,
            seed: args.seed,
        },
        "cograph" => GenSpec::Cograph {
            n: args.n,
            seed: args.seed,
        },
        "multipartite" => {
            let parts_text = args
                .parts
                .ok_or_else(|| anyhow!("--parts is required for multipartite"))?;
            let parts: Vec<usize> = parts_text
                .split(',')
                .map(|p| p.trim().parse().map_err(|_| anyhow!("bad part `{p}`")))
                .collect::<Result<_>>()?;
            GenSpec::Multipartite {
                parts,
                seed: args.seed,
            }
        }
        "er" => GenSpec::Er {
            n: args.n,
            density: args.density,
            seed: args.seed,
        },
        other => bail!("unknown family `{other}` (split, cograph, multipartite, er)"),
    };
    let graph = testkit::generate(&spec)?;
    let text = write_dimacs(&graph);
    match &args.output {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?
        }
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode> {
    let graph = load_graph(&args.graph)?;
    let col_text = fs::read_to_string(&args.colouring)
        .with_context(|| format!("cannot read {}", args.colouring.display()))?;
    let colouring = parse_colouring(&col_text)?;
    for (_, c) in colouring.iter() {
        if c < 1 || c > args.k {
            println!("invalid: colour {c} outside 1..={}", args.k);
            return Ok(ExitCode::from(1));
        }
    }
    let instance = match &args.lists {
        None => Instance::full(Arc::new(graph), args.k),
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read {}", path.display()))?;
            let lists = parse_lists(&text, &graph, args.k)?;
            Instance::with_lists(Arc::new(graph), args.k, lists)
        }
    };
    if verify_colouring(&instance, &colouring) {
        println!("valid");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("invalid");
        Ok(ExitCode::from(1))
    }
}

fn cmd_bench(args: BenchArgs) -> Result<ExitCode> {
    let manifest = fs::read_to_string(&args.corpus)
        .with_context(|| format!("cannot read {}", args.corpus.display()))?;
    let specs = testkit::parse_manifest(&manifest)?;
    let methods: Vec<Method> = match args.method.as_str() {
        "both" => vec![Method::One, Method::Two],
        other => vec![Method::from_str(other).map_err(|e| anyhow!(e))?],
    };
    let mut csv = String::from("graph,n,m,method,decision,instances,max_depth,millis\n");
    for spec in &specs {
        let graph = testkit::generate(spec).with_context(|| format!("generating {}", spec.id()))?;
        for &method in &methods {
            let cfg = SolveConfig {
                method,
                max_instances: Some(args.max_instances),
                ..SolveConfig::default()
            };
            let started = Instant::now();
            let (decision, instances, depth) = match k_colourable(&graph, args.k, &cfg) {
                Ok(d) => {
                    let label = if d.is_sat() { "sat" } else { "unsat" };
                    (
                        label.to_string(),
                        d.metrics.instances_created,
                        d.metrics.max_depth,
                    )
                }
                Err(SolveError::NotP5Free { .. }) => ("not-p5-free".into(), 0, 0),
                Err(SolveError::BudgetExceeded { created, .. }) => {
                    ("budget-exceeded".into(), created, 0)
                }
            };
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{},{}",
                spec.id(),
                graph.vertex_count(),
                graph.edge_count(),
                method,
                decision,
                instances,
                depth,
                started.elapsed().as_millis()
            );
        }
    }
    match &args.output {
        Some(path) => {
            fs::write(path, csv).with_context(|| format!("cannot write {}", path.display()))?
        }
        None => print!("{csv}"),
    }
    Ok(ExitCode::SUCCESS)
}
