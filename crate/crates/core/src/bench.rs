//! Run settings, detection reports and side-by-side comparisons.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::accumulator::{AccumulatorStrategy, SubtractionPolicy, DEFAULT_SLOTS_FRACTION};
use crate::error::{Error, Result};
use crate::graph::{load_edge_list, load_matrix_market, EdgeListOptions, Graph, VertexId};
use crate::leiden::detect_leiden;
use crate::louvain::{detect_louvain, LouvainConfig, PassTrace};
use crate::lpa::{detect_lpa, LpaConfig};
use crate::quality::modularity;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Louvain,
    Leiden,
    Lpa,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Louvain => "louvain",
            Self::Leiden => "leiden",
            Self::Lpa => "lpa",
        }
    }

    /// Default sketch slot count: 8 for Louvain and LPA, 64 for Leiden.
    pub fn default_slots(&self) -> usize {
        match self {
            Self::Leiden => 64,
            Self::Louvain | Self::Lpa => 8,
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "louvain" => Ok(Self::Louvain),
            "leiden" => Ok(Self::Leiden),
            "lpa" => Ok(Self::Lpa),
            other => Err(Error::Config(format!("unknown algorithm {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    FarKv,
    SmallHash,
    BoyerMoore,
    MisraGries,
}

impl FromStr for StrategyKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "far-kv" | "farkv" | "default" => Ok(Self::FarKv),
            "small-hash" | "small" => Ok(Self::SmallHash),
            "bm" | "boyer-moore" => Ok(Self::BoyerMoore),
            "mg" | "misra-gries" => Ok(Self::MisraGries),
            other => Err(Error::Config(format!("unknown strategy {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputFormat {
    EdgeList,
    MatrixMarket,
}

impl InputFormat {
    /// `.mtx` is MatrixMarket, anything else an edge list.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("mtx") => Self::MatrixMarket,
            _ => Self::EdgeList,
        }
    }
}

impl FromStr for InputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "edgelist" | "edge-list" | "el" | "txt" => Ok(Self::EdgeList),
            "mtx" | "matrix-market" | "matrixmarket" => Ok(Self::MatrixMarket),
            other => Err(Error::Config(format!("unknown input format {other:?}"))),
        }
    }
}

/// Everything needed to reproduce one detection run. Strategy parameters
/// left as `None` take their defaults; supplying one that does not apply to
/// the chosen strategy is an error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    pub input: PathBuf,
    pub format: Option<InputFormat>,
    pub indexing_base: u8,
    pub algorithm: Algorithm,
    pub strategy: StrategyKind,
    pub slots: Option<usize>,
    pub subtraction: Option<SubtractionPolicy>,
    pub slots_fraction: Option<f64>,
    pub scans: Option<u8>,
    pub threads: usize,
    pub deterministic: bool,
    pub seed: u64,
    pub tolerance: Option<f64>,
    pub max_iterations: Option<usize>,
    pub max_passes: Option<usize>,
    pub membership_out: Option<PathBuf>,
    pub report_out: Option<PathBuf>,
}

impl RunSpec {
    pub fn new(input: impl Into<PathBuf>, algorithm: Algorithm, strategy: StrategyKind) -> Self {
        Self {
            input: input.into(),
            format: None,
            indexing_base: 0,
            algorithm,
            strategy,
            slots: None,
            subtraction: None,
            slots_fraction: None,
            scans: None,
            threads: 0,
            deterministic: false,
            seed: 0,
            tolerance: None,
            max_iterations: None,
            max_passes: None,
            membership_out: None,
            report_out: None,
        }
    }

    /// Resolves the accumulator strategy, enforcing parameter applicability.
    pub fn accumulator_strategy(&self) -> Result<AccumulatorStrategy> {
        let reject = |name: &str| {
            Err(Error::Config(format!(
                "{name} does not apply to the {:?} strategy",
                self.strategy
            )))
        };
        if self.strategy != StrategyKind::MisraGries {
            if self.slots.is_some() {
                return reject("slot count");
            }
            if self.subtraction.is_some() {
                return reject("subtraction policy");
            }
        }
        if self.strategy != StrategyKind::SmallHash && self.slots_fraction.is_some() {
            return reject("slots fraction");
        }
        if self.scans.is_some() && self.algorithm != Algorithm::Lpa {
            return Err(Error::Config("scans only apply to lpa".into()));
        }
        let strategy = match self.strategy {
            StrategyKind::FarKv => AccumulatorStrategy::FarKv,
            StrategyKind::BoyerMoore => AccumulatorStrategy::BoyerMoore,
            StrategyKind::SmallHash => AccumulatorStrategy::SmallHash {
                slots_fraction: self.slots_fraction.unwrap_or(DEFAULT_SLOTS_FRACTION),
            },
            StrategyKind::MisraGries => AccumulatorStrategy::MisraGries {
                slots: self.slots.unwrap_or(self.algorithm.default_slots()),
                subtraction: self.subtraction.unwrap_or_default(),
            },
        };
        strategy.validate()?;
        Ok(strategy)
    }

    pub fn louvain_config(&self) -> Result<LouvainConfig> {
        let mut cfg = LouvainConfig {
            strategy: self.accumulator_strategy()?,
            threads: self.threads,
            deterministic: self.deterministic,
            seed: self.seed,
            ..LouvainConfig::default()
        };
        if let Some(t) = self.tolerance {
            cfg.iteration_tolerance = t;
        }
        if let Some(m) = self.max_iterations {
            cfg.max_iterations = m;
        }
        if let Some(p) = self.max_passes {
            cfg.max_passes = p;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn lpa_config(&self) -> Result<LpaConfig> {
        if self.max_passes.is_some() {
            return Err(Error::Config("max passes do not apply to lpa".into()));
        }
        let mut cfg = LpaConfig {
            strategy: self.accumulator_strategy()?,
            scans: self.scans.unwrap_or(2),
            threads: self.threads,
            deterministic: self.deterministic,
            seed: self.seed,
            ..LpaConfig::default()
        };
        if let Some(t) = self.tolerance {
            cfg.tolerance = t;
        }
        if let Some(m) = self.max_iterations {
            cfg.max_iterations = m;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        match self.algorithm {
            Algorithm::Lpa => self.lpa_config().map(|_| ()),
            _ => self.louvain_config().map(|_| ()),
        }
    }

    pub fn load_graph(&self) -> Result<Graph> {
        let text = fs::read_to_string(&self.input)?;
        match self
            .format
            .unwrap_or_else(|| InputFormat::from_path(&self.input))
        {
            InputFormat::MatrixMarket => load_matrix_market(&text),
            InputFormat::EdgeList => load_edge_list(
                &text,
                &EdgeListOptions {
                    indexing_base: self.indexing_base,
                    ..Default::default()
                },
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportParameters {
    pub slots: Option<usize>,
    pub subtraction: Option<SubtractionPolicy>,
    pub slots_fraction: Option<f64>,
    pub scans: Option<u8>,
    pub threads: usize,
    pub deterministic: bool,
    pub seed: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimes {
    pub load_ms: f64,
    pub local_moving_ms: f64,
    pub refinement_ms: f64,
    pub aggregation_ms: f64,
    pub total_ms: f64,
}

/// Machine-readable summary of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub algorithm: Algorithm,
    pub strategy: String,
    pub parameters: ReportParameters,
    pub modularity: f64,
    pub community_count: usize,
    pub passes: usize,
    pub iterations_per_pass: Vec<usize>,
    pub vertices_moved_per_pass: Vec<usize>,
    pub wall_time_ms: PhaseTimes,
    pub workers: usize,
    pub aux_memory_bytes: usize,
    pub vertices: usize,
    pub directed_edges: usize,
    pub graph_bytes: usize,
}

impl DetectionReport {
    pub fn per_worker_aux_memory_bytes(&self) -> usize {
        self.aux_memory_bytes / self.workers.max(1)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: DetectionReport,
    pub membership: Vec<VertexId>,
    pub trace: PassTrace,
}

fn strategy_parameters(spec: &RunSpec, strategy: &AccumulatorStrategy) -> ReportParameters {
    let (slots, subtraction) = match *strategy {
        AccumulatorStrategy::MisraGries { slots, subtraction } => (Some(slots), Some(subtraction)),
        _ => (None, None),
    };
    let slots_fraction = match *strategy {
        AccumulatorStrategy::SmallHash { slots_fraction } => Some(slots_fraction),
        _ => None,
    };
    ReportParameters {
        slots,
        subtraction,
        slots_fraction,
        scans: (spec.algorithm == Algorithm::Lpa).then(|| spec.scans.unwrap_or(2)),
        threads: spec.threads,
        deterministic: spec.deterministic,
        seed: spec.seed,
    }
}

/// Executes `spec` on an already-loaded graph. No files are written.
pub fn run_on_graph(g: &Graph, spec: &RunSpec) -> Result<RunOutcome> {
    spec.validate()?;
    let strategy = spec.accumulator_strategy()?;
    let start = Instant::now();
    let (assignment, trace, workers, aux) = match spec.algorithm {
        Algorithm::Louvain => {
            let d = detect_louvain(g, &spec.louvain_config()?)?;
            (d.assignment, d.trace, d.workers, d.aux_memory_bytes)
        }
        Algorithm::Leiden => {
            let d = detect_leiden(g, &spec.louvain_config()?)?;
            (d.assignment, d.trace, d.workers, d.aux_memory_bytes)
        }
        Algorithm::Lpa => {
            let d = detect_lpa(g, &spec.lpa_config()?)?;
            (d.assignment, d.trace, d.workers, d.aux_memory_bytes)
        }
    };
    let total_ms = start.elapsed().as_secs_f64() * 1e3;
    let q = modularity(g, assignment.membership())?;
    let sum = |f: fn(&crate::louvain::PassRecord) -> f64| trace.passes.iter().map(f).sum::<f64>();
    let report = DetectionReport {
        algorithm: spec.algorithm,
        strategy: strategy.label(),
        parameters: strategy_parameters(spec, &strategy),
        modularity: q,
        community_count: assignment.community_count(),
        passes: trace.passes.len(),
        iterations_per_pass: trace.passes.iter().map(|p| p.iterations).collect(),
        vertices_moved_per_pass: trace.passes.iter().map(|p| p.vertices_moved).collect(),
        wall_time_ms: PhaseTimes {
            load_ms: 0.0,
            local_moving_ms: sum(|p| p.local_moving_ms),
            refinement_ms: sum(|p| p.refinement_ms),
            aggregation_ms: sum(|p| p.aggregation_ms),
            total_ms,
        },
        workers,
        aux_memory_bytes: aux,
        vertices: g.num_vertices(),
        directed_edges: g.num_directed_edges(),
        graph_bytes: g.memory_bytes(),
    };
    Ok(RunOutcome {
        report,
        membership: assignment.into_membership(),
        trace,
    })
}

/// Loads the input, executes `spec` and writes the membership and report
/// files it names.
pub fn run(spec: &RunSpec) -> Result<RunOutcome> {
    spec.validate()?;
    let start = Instant::now();
    let g = spec.load_graph()?;
    let load_ms = start.elapsed().as_secs_f64() * 1e3;
    let mut outcome = run_on_graph(&g, spec)?;
    outcome.report.wall_time_ms.load_ms = load_ms;
    if let Some(path) = &spec.membership_out {
        fs::write(path, format_membership(&outcome.membership))?;
    }
    if let Some(path) = &spec.report_out {
        fs::write(path, outcome.report.to_json()? + "\n")?;
    }
    Ok(outcome)
}

/// One `vertex community` line per vertex, ascending vertex order.
pub fn format_membership(membership: &[VertexId]) -> String {
    let mut out = String::with_capacity(membership.len() * 8);
    for (v, c) in membership.iter().enumerate() {
        let _ = writeln!(out, "{v} {c}");
    }
    out
}

pub fn parse_membership(text: &str) -> Result<Vec<VertexId>> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let bad = || Error::Parse {
            line: idx + 1,
            message: format!("expected \"vertex community\", found {line:?}"),
        };
        let mut it = line.split_whitespace();
        let v: usize = it.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
        let c: VertexId = it.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
        if it.next().is_some() || v != out.len() {
            return Err(bad());
        }
        out.push(c);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub algorithm: Algorithm,
    pub strategy: String,
    pub modularity: f64,
    pub relative_modularity: f64,
    pub runtime_ms: f64,
    pub relative_runtime: f64,
    pub aux_memory_bytes: usize,
    pub below_threshold: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub baseline_index: usize,
    pub threshold: f64,
    pub rows: Vec<ComparisonRow>,
}

impl Comparison {
    /// Aligned text table.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<3} {:<8} {:<11} {:>10} {:>8} {:>11} {:>8} {:>14}  flag",
            "#", "algo", "strategy", "Q", "rel-Q", "time-ms", "rel-t", "aux-bytes"
        );
        for (i, r) in self.rows.iter().enumerate() {
            let flag = if i == self.baseline_index {
                "baseline"
            } else if r.below_threshold {
                "BELOW"
            } else {
                ""
            };
            let _ = writeln!(
                out,
                "{:<3} {:<8} {:<11} {:>10.6} {:>8.4} {:>11.2} {:>8.3} {:>14}  {}",
                i,
                r.algorithm.name(),
                r.strategy,
                r.modularity,
                r.relative_modularity,
                r.runtime_ms,
                r.relative_runtime,
                r.aux_memory_bytes,
                flag
            );
        }
        out
    }
}

/// Builds the comparison from finished reports.
pub fn compare_reports(
    reports: &[DetectionReport],
    baseline_index: usize,
    threshold: f64,
) -> Result<Comparison> {
    let base = reports
        .get(baseline_index)
        .ok_or_else(|| Error::Config(format!("baseline index {baseline_index} out of range")))?;
    let rows = reports
        .iter()
        .map(|r| {
            let relative_modularity = r.modularity / base.modularity;
            ComparisonRow {
                algorithm: r.algorithm,
                strategy: r.strategy.clone(),
                modularity: r.modularity,
                relative_modularity,
                runtime_ms: r.wall_time_ms.total_ms,
                relative_runtime: r.wall_time_ms.total_ms / base.wall_time_ms.total_ms,
                aux_memory_bytes: r.aux_memory_bytes,
                below_threshold: relative_modularity < threshold,
            }
        })
        .collect();
    Ok(Comparison {
        baseline_index,
        threshold,
        rows,
    })
}

/// Runs every spec on one shared input graph and compares them against the
/// spec at `baseline_index`.
pub fn compare(specs: &[RunSpec], baseline_index: usize, threshold: f64) -> Result<Comparison> {
    let first = specs
        .first()
        .ok_or_else(|| Error::Config("nothing to compare".into()))?;
    if specs.iter().any(|s| s.input != first.input) {
        return Err(Error::Config(
            "all compared runs must share one input graph".into(),
        ));
    }
    if baseline_index >= specs.len() {
        return Err(Error::Config(format!(
            "baseline index {baseline_index} out of range"
        )));
    }
    let g = first.load_graph()?;
    let reports = specs
        .iter()
        .map(|s| run_on_graph(&g, s).map(|o| o.report))
        .collect::<Result<Vec<_>>>()?;
    compare_reports(&reports, baseline_index, threshold)
}

/// Parses a compact run descriptor `algorithm:strategy[:key=value,...]`,
/// e.g. `louvain:mg:slots=8,subtraction=unconditional` or `lpa:mg:scans=1`.
pub fn parse_run_descriptor(desc: &str, input: &Path) -> Result<RunSpec> {
    let mut parts = desc.splitn(3, ':');
    let algorithm: Algorithm = parts.next().unwrap_or_default().parse()?;
    let strategy: StrategyKind = parts
        .next()
        .ok_or_else(|| Error::Config(format!("run descriptor {desc:?} lacks a strategy")))?
        .parse()?;
    let mut spec = RunSpec::new(input, algorithm, strategy);
    if let Some(params) = parts.next() {
        for kv in params.split(',').filter(|s| !s.is_empty()) {
            let (key, value) = kv
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected key=value, found {kv:?}")))?;
            let bad = || Error::Config(format!("invalid value {value:?} for {key}"));
            match key {
                "slots" | "k" => spec.slots = Some(value.parse().map_err(|_| bad())?),
                "subtraction" => {
                    spec.subtraction = Some(match value {
                        "conditional" => SubtractionPolicy::Conditional,
                        "unconditional" => SubtractionPolicy::Unconditional,
                        _ => return Err(bad()),
                    })
                }
                "slots_fraction" | "slots-fraction" => {
                    spec.slots_fraction = Some(value.parse().map_err(|_| bad())?)
                }
                "scans" => spec.scans = Some(value.parse().map_err(|_| bad())?),
                "threads" => spec.threads = value.parse().map_err(|_| bad())?,
                _ => return Err(Error::Config(format!("unknown run parameter {key:?}"))),
            }
        }
    }
    spec.validate()?;
    Ok(spec)
}
