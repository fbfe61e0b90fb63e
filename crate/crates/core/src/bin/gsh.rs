use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use gsh::harness::{
    self, aggregate, cached_exact, emit_aggregates_csv, emit_json, emit_runs_csv, load_input,
    ExperimentConfig, ExperimentReport, Format, InputInfo, ToolInfo,
};
use gsh::{
    enumerate_outcomes, Error, ExactStats, Mode, ProbClass, Result, SamplerConfig, Statistic,
};

#[derive(Parser)]
#[command(
    name = "gsh",
    version,
    about = "Graph sample-and-hold sampling and estimation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample once and print estimates with 95% bounds.
    Sample(SampleArgs),
    /// Exact statistics of the full graph.
    Exact(ExactArgs),
    /// Repeated runs over a (p, q) grid, aggregated against exact statistics.
    Experiment(ExperimentArgs),
    /// Every sampling outcome of a tiny stream with its probability.
    Enumerate(EnumerateArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Edge list: two node ids per line, `#`/`%` comments.
    #[arg(long)]
    input: PathBuf,
    /// Treat edges as directed.
    #[arg(long)]
    directed: bool,
}

impl InputArgs {
    fn mode(&self) -> Mode {
        if self.directed {
            Mode::Directed
        } else {
            Mode::Undirected
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SamplingArgs {
    /// Probability for fresh edges; comma-separated for a grid.
    #[arg(long, value_delimiter = ',', default_value = "0.005")]
    p: Vec<f64>,
    /// Probability for edges adjacent to the sample; comma-separated for a grid.
    #[arg(long, value_delimiter = ',', default_value = "0.008")]
    q: Vec<f64>,
    /// Always keep edges that close a triangle in the sample.
    #[arg(long, action = ArgAction::Set, default_value_t = true)]
    triangle_closure: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SamplingArgs {
    fn single(&self) -> Result<(f64, f64)> {
        match (self.p.as_slice(), self.q.as_slice()) {
            ([p], [q]) => Ok((*p, *q)),
            _ => Err(Error::Config("expected a single --p and --q value".into())),
        }
    }
}

fn parse_stat(s: &str) -> std::result::Result<Statistic, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    sampling: SamplingArgs,
    /// Statistics to report: N_K, N_T, N_Lambda, alpha, N_V.
    #[arg(long, value_delimiter = ',', value_parser = parse_stat)]
    stats: Vec<Statistic>,
    #[command(flatten)]
    output: OutputArgs,
    #[arg(long)]
    threads: Option<usize>,
    /// Record per-phase wall time.
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct ExactArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Neither read nor write the sidecar cache of exact statistics.
    #[arg(long)]
    no_cache: bool,
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    sampling: SamplingArgs,
    #[arg(long, default_value_t = 100)]
    runs: usize,
    #[arg(long, value_delimiter = ',', value_parser = parse_stat)]
    stats: Vec<Statistic>,
    #[command(flatten)]
    output: OutputArgs,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    timings: bool,
    #[arg(long)]
    no_cache: bool,
    /// With CSV output, write one row per run instead of per-cell aggregates.
    #[arg(long)]
    per_run: bool,
}

#[derive(Args)]
struct EnumerateArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    sampling: SamplingArgs,
    #[command(flatten)]
    output: OutputArgs,
}

fn write_output(out: &Option<PathBuf>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => fs::write(path, bytes)?,
        None => io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}

fn set_threads(threads: Option<usize>) -> Result<()> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(Error::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    Ok(())
}

fn statistics(requested: &[Statistic], mode: Mode) -> Vec<Statistic> {
    if !requested.is_empty() {
        requested.to_vec()
    } else if mode.is_directed() {
        vec![Statistic::Edges]
    } else {
        Statistic::DEFAULT.to_vec()
    }
}

fn experiment_config(
    input: &InputArgs,
    sampling: &SamplingArgs,
    runs: usize,
    stats: &[Statistic],
    timings: bool,
) -> ExperimentConfig {
    ExperimentConfig {
        input: Some(input.input.clone()),
        mode: input.mode(),
        p_grid: sampling.p.clone(),
        q_grid: sampling.q.clone(),
        triangle_closure: sampling.triangle_closure,
        runs,
        base_seed: sampling.seed,
        statistics: statistics(stats, input.mode()),
        timings,
    }
}

fn sample(args: SampleArgs) -> Result<()> {
    set_threads(args.threads)?;
    args.sampling.single()?;
    let cfg = experiment_config(&args.input, &args.sampling, 1, &args.stats, args.timings);
    cfg.validate()?;
    let input = load_input(&args.input.input, cfg.mode)?;
    let run = harness::single_run(&input.stream, &cfg, 0, 0, 0, true)?;
    let bytes = match args.output.format.into() {
        Format::Csv => emit_runs_csv(std::slice::from_ref(&run))?,
        Format::Json => {
            let mut report = ExperimentReport::new(cfg, vec![run]);
            report.input = Some(input.info);
            emit_json(&report)?
        }
    };
    write_output(&args.output.out, &bytes)
}

#[derive(Serialize)]
struct ExactDocument {
    tool: ToolInfo,
    input: InputInfo,
    exact: ExactStats,
}

fn exact(args: ExactArgs) -> Result<()> {
    let mode = args.input.mode();
    let input = load_input(&args.input.input, mode)?;
    let exact = cached_exact(&input, mode, !args.no_cache);
    let bytes = match args.output.format.into() {
        Format::Json => emit_json(&ExactDocument {
            tool: ToolInfo::default(),
            input: input.info,
            exact,
        })?,
        Format::Csv => format!(
            "n,n_k,n_t,n_lambda,alpha,density\n{},{},{},{},{},{}\n",
            exact.n,
            exact.n_k,
            exact.n_t,
            exact.n_lambda,
            exact.alpha.map(|a| a.to_string()).unwrap_or_default(),
            exact.density
        )
        .into_bytes(),
    };
    write_output(&args.output.out, &bytes)
}

fn experiment(args: ExperimentArgs) -> Result<()> {
    set_threads(args.threads)?;
    let cfg = experiment_config(
        &args.input,
        &args.sampling,
        args.runs,
        &args.stats,
        args.timings,
    );
    let report = harness::run_experiment(&cfg, !args.no_cache)?;
    let bytes = match args.output.format.into() {
        Format::Json => emit_json(&report)?,
        Format::Csv if args.per_run => emit_runs_csv(&report.runs)?,
        Format::Csv => {
            let exact = report.exact.expect("experiment computes exact statistics");
            emit_aggregates_csv(&aggregate(&report.runs, &exact))?
        }
    };
    write_output(&args.output.out, &bytes)
}

#[derive(Serialize)]
struct EnumeratedOutcome {
    probability: f64,
    /// Per stream position.
    selected: Vec<bool>,
    /// Per stream position; 0 when not selected.
    weights: Vec<f64>,
    /// Per held edge, in arrival order.
    classes: Vec<ProbClass>,
}

#[derive(Serialize)]
struct EnumerateDocument {
    tool: ToolInfo,
    config: SamplerConfig,
    stream: Vec<gsh::Edge>,
    total_probability: f64,
    outcomes: Vec<EnumeratedOutcome>,
}

fn enumerate(args: EnumerateArgs) -> Result<()> {
    let (p, q) = args.sampling.single()?;
    let config = SamplerConfig {
        p,
        q,
        triangle_closure: args.sampling.triangle_closure,
        seed: args.sampling.seed,
    };
    let mode = args.input.mode();
    config.validate(mode)?;
    let input = load_input(&args.input.input, mode)?;
    let tree = enumerate_outcomes(&input.stream, config)?;
    let len = tree.stream.len();
    let outcomes: Vec<EnumeratedOutcome> = tree
        .outcomes
        .iter()
        .map(|o| {
            let mut weights = vec![0.0; len];
            for (i, s) in o.sample.held().iter().enumerate() {
                weights[s.arrival] = o.sample.weight(i);
            }
            EnumeratedOutcome {
                probability: o.probability,
                selected: (0..len).map(|i| o.selected(i)).collect(),
                weights,
                classes: o.classes(),
            }
        })
        .collect();

    let bytes = match args.output.format.into() {
        Format::Json => emit_json(&EnumerateDocument {
            tool: ToolInfo::default(),
            config,
            stream: tree.stream.edges().to_vec(),
            total_probability: tree.total_probability(),
            outcomes,
        })?,
        Format::Csv => {
            let mut out = String::from("outcome,probability");
            for e in tree.stream.edges() {
                out.push_str(&format!(",w_{}_{}", e.a, e.b));
            }
            out.push('\n');
            for (i, o) in outcomes.iter().enumerate() {
                out.push_str(&format!("{i},{}", o.probability));
                for w in &o.weights {
                    out.push_str(&format!(",{w}"));
                }
                out.push('\n');
            }
            out.into_bytes()
        }
    };
    write_output(&args.output.out, &bytes)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Sample(a) => sample(a),
        Command::Exact(a) => exact(a),
        Command::Experiment(a) => experiment(a),
        Command::Enumerate(a) => enumerate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gsh: {e}");
            ExitCode::from(if e.is_io() { 2 } else { 1 })
        }
    }
}
