//! Repeated independent sampling experiments over a (p, q) grid, their
//! aggregation against exact statistics, and CSV/JSON output.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufReader, Read};
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::estimators::{EstimateReport, Statistic};
use crate::graph::{ingest_edge_list, EdgeStream, IngestReport, Mode};
use crate::oracle::{exact_count, ExactStats};
use crate::sampler::{run, SamplerConfig};
use crate::summary::SampleEstimates;

pub const TOOL_NAME: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub input: Option<PathBuf>,
    pub mode: Mode,
    pub p_grid: Vec<f64>,
    pub q_grid: Vec<f64>,
    pub triangle_closure: bool,
    pub runs: usize,
    pub base_seed: u64,
    pub statistics: Vec<Statistic>,
    /// Record per-phase wall time in each run. Off by default so that output
    /// is reproducible byte for byte.
    #[serde(default)]
    pub timings: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            input: None,
            mode: Mode::Undirected,
            p_grid: vec![0.005],
            q_grid: vec![0.008],
            triangle_closure: true,
            runs: 100,
            base_seed: 0,
            statistics: Statistic::DEFAULT.to_vec(),
            timings: false,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if self.p_grid.is_empty() || self.q_grid.is_empty() {
            return Err(Error::Config("p and q grids must be non-empty".into()));
        }
        if self.statistics.is_empty() {
            return Err(Error::Config("no statistics requested".into()));
        }
        if self.mode.is_directed() {
            if let Some(s) = self.statistics.iter().find(|s| s.needs_undirected()) {
                return Err(Error::Config(format!("{s} needs an undirected stream")));
            }
        }
        for &p in &self.p_grid {
            for &q in &self.q_grid {
                self.sampler(p, q, 0).validate(self.mode)?;
            }
        }
        Ok(())
    }

    fn sampler(&self, p: f64, q: f64, seed: u64) -> SamplerConfig {
        SamplerConfig {
            p,
            q,
            triangle_closure: self.triangle_closure,
            seed,
        }
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed for run `run` of grid cell (`p_index`, `q_index`).
pub fn run_seed(base_seed: u64, p_index: usize, q_index: usize, run: usize) -> u64 {
    [p_index as u64, q_index as u64, run as u64]
        .into_iter()
        .fold(splitmix64(base_seed), |h, x| splitmix64(h ^ x))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub permute_secs: f64,
    pub sample_secs: f64,
    pub estimate_secs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub p: f64,
    pub q: f64,
    pub p_index: usize,
    pub q_index: usize,
    pub run: usize,
    pub seed: u64,
    pub sample_size: usize,
    pub fraction: f64,
    pub reports: Vec<EstimateReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

impl RunResult {
    pub fn report(&self, statistic: Statistic) -> Option<&EstimateReport> {
        self.reports.iter().find(|r| r.statistic == statistic)
    }
}

/// One independent run: permute with the run seed, sample, estimate.
pub fn single_run(
    stream: &EdgeStream,
    cfg: &ExperimentConfig,
    p_index: usize,
    q_index: usize,
    run_index: usize,
    parallel: bool,
) -> Result<RunResult> {
    let (p, q) = (cfg.p_grid[p_index], cfg.q_grid[q_index]);
    let seed = run_seed(cfg.base_seed, p_index, q_index, run_index);

    let t0 = Instant::now();
    let permuted = stream.permute(seed);
    let t1 = Instant::now();
    let state = run(&permuted, cfg.sampler(p, q, splitmix64(seed)))?;
    let t2 = Instant::now();
    let estimates = SampleEstimates::compute(&state, parallel);
    let reports = estimates.reports(&cfg.statistics)?;
    let t3 = Instant::now();

    Ok(RunResult {
        p,
        q,
        p_index,
        q_index,
        run: run_index,
        seed,
        sample_size: state.len(),
        fraction: state.len() as f64 / stream.len().max(1) as f64,
        reports,
        timings: cfg.timings.then(|| Timings {
            permute_secs: (t1 - t0).as_secs_f64(),
            sample_secs: (t2 - t1).as_secs_f64(),
            estimate_secs: (t3 - t2).as_secs_f64(),
        }),
    })
}

/// Every run of every grid cell, in (p, q, run) order. Runs execute in
/// parallel.
pub fn run_grid(stream: &EdgeStream, cfg: &ExperimentConfig) -> Result<Vec<RunResult>> {
    cfg.validate()?;
    if stream.is_empty() {
        return Err(Error::EmptyStream);
    }
    let jobs: Vec<(usize, usize, usize)> = (0..cfg.p_grid.len())
        .flat_map(|pi| {
            (0..cfg.q_grid.len()).flat_map(move |qi| (0..cfg.runs).map(move |r| (pi, qi, r)))
        })
        .collect();
    let parallel_estimation = jobs.len() == 1;
    jobs.par_iter()
        .map(|&(pi, qi, r)| single_run(stream, cfg, pi, qi, r, parallel_estimation))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputInfo {
    pub path: PathBuf,
    pub sha256: String,
    pub edges: usize,
    pub ingest: IngestReport,
}

/// Parsed input plus its content hash.
pub struct LoadedInput {
    pub stream: EdgeStream,
    pub info: InputInfo,
}

pub fn load_input(path: &Path, mode: Mode) -> Result<LoadedInput> {
    let read_err = |source| Error::Read {
        path: path.to_path_buf(),
        source,
    };
    let mut bytes = Vec::new();
    BufReader::new(fs::File::open(path).map_err(read_err)?)
        .read_to_end(&mut bytes)
        .map_err(read_err)?;
    let sha256 = hex::encode(Sha256::digest(&bytes));
    let (stream, ingest) = ingest_edge_list(bytes.as_slice(), mode)?;
    Ok(LoadedInput {
        info: InputInfo {
            path: path.to_path_buf(),
            sha256,
            edges: stream.len(),
            ingest,
        },
        stream,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct ExactManifest {
    sha256: String,
    mode: Mode,
    exact: ExactStats,
}

/// Sidecar path for cached exact statistics of `input`.
pub fn manifest_path(input: &Path) -> PathBuf {
    let mut name = input.file_name().unwrap_or_default().to_os_string();
    name.push(".exact.json");
    input.with_file_name(name)
}

/// Exact statistics for a loaded input, read from the sidecar manifest when
/// its content hash and mode match, otherwise computed and written back.
/// Failure to write the cache is not an error.
pub fn cached_exact(input: &LoadedInput, mode: Mode, use_cache: bool) -> ExactStats {
    let path = manifest_path(&input.info.path);
    if use_cache {
        let cached = fs::read(&path)
            .ok()
            .and_then(|b| serde_json::from_slice::<ExactManifest>(&b).ok())
            .filter(|m| m.sha256 == input.info.sha256 && m.mode == mode);
        if let Some(m) = cached {
            return m.exact;
        }
    }
    let exact = exact_count(&input.stream);
    if use_cache {
        let manifest = ExactManifest {
            sha256: input.info.sha256.clone(),
            mode,
            exact,
        };
        if let Ok(bytes) = serde_json::to_vec_pretty(&manifest) {
            let _ = fs::write(&path, bytes);
        }
    }
    exact
}

pub fn actual_value(exact: &ExactStats, statistic: Statistic) -> Option<f64> {
    match statistic {
        Statistic::Edges => Some(exact.n_k as f64),
        Statistic::Triangles => Some(exact.n_t as f64),
        Statistic::Wedges => Some(exact.n_lambda as f64),
        Statistic::Clustering => exact.alpha,
        Statistic::Nodes => Some(exact.n as f64),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatAggregate {
    pub statistic: Statistic,
    pub actual: Option<f64>,
    /// Mean over runs where the estimate is defined.
    pub mean: Option<f64>,
    pub rel_err: Option<f64>,
    /// Fraction of runs whose 95% interval contains the actual value.
    pub coverage: Option<f64>,
    pub defined_runs: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateResult {
    pub p: f64,
    pub q: f64,
    pub runs: usize,
    pub mean_fraction: f64,
    pub mean_sample_size: f64,
    pub stats: Vec<StatAggregate>,
}

impl AggregateResult {
    pub fn stat(&self, statistic: Statistic) -> Option<&StatAggregate> {
        self.stats.iter().find(|s| s.statistic == statistic)
    }
}

/// Per-cell means, relative errors, coverage and sampling fraction. Cells
/// appear in the order they first occur in `results`.
pub fn aggregate(results: &[RunResult], exact: &ExactStats) -> Vec<AggregateResult> {
    let mut cells: Vec<(usize, usize)> = Vec::new();
    for r in results {
        if !cells.contains(&(r.p_index, r.q_index)) {
            cells.push((r.p_index, r.q_index));
        }
    }
    cells
        .into_iter()
        .map(|cell| {
            let runs: Vec<&RunResult> = results
                .iter()
                .filter(|r| (r.p_index, r.q_index) == cell)
                .collect();
            let n = runs.len() as f64;
            let statistics: Vec<Statistic> = runs[0].reports.iter().map(|r| r.statistic).collect();
            let stats = statistics
                .into_iter()
                .map(|statistic| {
                    let actual = actual_value(exact, statistic);
                    let reports: Vec<&EstimateReport> =
                        runs.iter().filter_map(|r| r.report(statistic)).collect();
                    let defined: Vec<f64> = reports.iter().filter_map(|r| r.estimate).collect();
                    let mean = (!defined.is_empty())
                        .then(|| defined.iter().sum::<f64>() / defined.len() as f64);
                    let rel_err = match (mean, actual) {
                        (Some(m), Some(a)) if a != 0.0 => Some((m - a).abs() / a),
                        _ => None,
                    };
                    let has_interval = reports.iter().any(|r| r.variance.is_some());
                    let coverage = match actual {
                        Some(a) if has_interval => {
                            Some(reports.iter().filter(|r| r.covers(a)).count() as f64 / n)
                        }
                        _ => None,
                    };
                    StatAggregate {
                        statistic,
                        actual,
                        mean,
                        rel_err,
                        coverage,
                        defined_runs: defined.len(),
                    }
                })
                .collect();
            AggregateResult {
                p: runs[0].p,
                q: runs[0].q,
                runs: runs.len(),
                mean_fraction: runs.iter().map(|r| r.fraction).sum::<f64>() / n,
                mean_sample_size: runs.iter().map(|r| r.sample_size as f64).sum::<f64>() / n,
                stats,
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

impl Default for ToolInfo {
    fn default() -> Self {
        ToolInfo {
            name: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
        }
    }
}

/// Top-level JSON document for `sample` and `experiment`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub tool: ToolInfo,
    /// Seconds since the Unix epoch. The only field that varies between
    /// identical invocations.
    pub generated_at: u64,
    pub config: ExperimentConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<InputInfo>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactStats>,
    pub runs: Vec<RunResult>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub aggregates: Vec<AggregateResult>,
}

impl ExperimentReport {
    pub fn new(config: ExperimentConfig, runs: Vec<RunResult>) -> Self {
        ExperimentReport {
            tool: ToolInfo::default(),
            generated_at: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
            config,
            input: None,
            exact: None,
            runs,
            aggregates: Vec::new(),
        }
    }
}

/// Loads the configured input and runs the full grid. Exact statistics are
/// computed (or read from the sidecar cache) and aggregated.
pub fn run_experiment(cfg: &ExperimentConfig, use_cache: bool) -> Result<ExperimentReport> {
    cfg.validate()?;
    let path = cfg
        .input
        .as_deref()
        .ok_or_else(|| Error::Config("no input path".into()))?;
    let input = load_input(path, cfg.mode)?;
    let exact = cached_exact(&input, cfg.mode, use_cache);
    let runs = run_grid(&input.stream, cfg)?;
    let mut report = ExperimentReport::new(cfg.clone(), runs);
    report.aggregates = aggregate(&report.runs, &exact);
    report.exact = Some(exact);
    report.input = Some(input.info);
    Ok(report)
}

pub fn emit_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn cell(out: &mut String, value: Option<f64>) {
    if let Some(v) = value {
        let _ = write!(out, "{v}");
    }
}

/// One row per run; four columns (estimate, var, lb, ub) per statistic.
pub fn emit_runs_csv(runs: &[RunResult]) -> Result<Vec<u8>> {
    let first = runs
        .first()
        .ok_or_else(|| Error::Config("no runs to emit".into()))?;
    let stats: Vec<Statistic> = first.reports.iter().map(|r| r.statistic).collect();
    let mut out = String::from("p,q,run,seed,sample_size,fraction");
    for s in &stats {
        let _ = write!(out, ",{s},{s}_var,{s}_lb,{s}_ub");
    }
    out.push('\n');
    for r in runs {
        let _ = write!(
            out,
            "{},{},{},{},{},{}",
            r.p, r.q, r.run, r.seed, r.sample_size, r.fraction
        );
        for &s in &stats {
            let rep = r.report(s);
            for v in [
                rep.and_then(|x| x.estimate),
                rep.and_then(|x| x.variance),
                rep.and_then(|x| x.lb),
                rep.and_then(|x| x.ub),
            ] {
                out.push(',');
                cell(&mut out, v);
            }
        }
        out.push('\n');
    }
    Ok(out.into_bytes())
}

pub const AGGREGATE_CSV_HEADER: &str = "p,q,stat,actual,mean,rel_err,coverage,frac,runs";

/// One row per (cell, statistic).
pub fn emit_aggregates_csv(aggregates: &[AggregateResult]) -> Result<Vec<u8>> {
    if aggregates.is_empty() {
        return Err(Error::Config("no aggregates to emit".into()));
    }
    let mut out = String::from(AGGREGATE_CSV_HEADER);
    out.push('\n');
    for a in aggregates {
        for s in &a.stats {
            let _ = write!(out, "{},{},{},", a.p, a.q, s.statistic);
            for v in [s.actual, s.mean, s.rel_err, s.coverage] {
                cell(&mut out, v);
                out.push(',');
            }
            let _ = writeln!(out, "{},{}", a.mean_fraction, a.runs);
        }
    }
    Ok(out.into_bytes())
}
