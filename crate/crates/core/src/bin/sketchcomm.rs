use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sketchcomm::accumulator::SubtractionPolicy;
use sketchcomm::bench::{
    compare, parse_run_descriptor, run, Algorithm, InputFormat, RunSpec, StrategyKind,
};
use sketchcomm::generate::{planted_partition, PlantedPartitionConfig};
use sketchcomm::Result;

/// Community detection with memory-light neighbor accumulators.
#[derive(Parser)]
#[command(name = "sketchcomm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detect communities on one graph and write membership and report.
    Run(RunArgs),
    /// Run several algorithm/strategy combinations on one graph and compare them.
    Compare(CompareArgs),
    /// Write a planted-partition benchmark graph as an edge list.
    Generate(GenerateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Louvain,
    Leiden,
    Lpa,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    FarKv,
    SmallHash,
    Bm,
    Mg,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Edgelist,
    Mtx,
}

#[derive(Clone, Copy, ValueEnum)]
enum SubtractionArg {
    Conditional,
    Unconditional,
}

#[derive(Args)]
struct InputArgs {
    /// Graph file (edge list, or MatrixMarket when it ends in .mtx)
    #[arg(short, long)]
    input: PathBuf,
    /// Override the format detected from the file extension
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Index of the first vertex in an edge list (0 or 1)
    #[arg(long, default_value_t = 0)]
    base: u8,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(short, long, value_enum, default_value = "louvain")]
    algorithm: AlgorithmArg,
    #[arg(short, long, value_enum, default_value = "mg")]
    strategy: StrategyArg,
    /// Sketch slot count k (mg only; default 8, or 64 for leiden)
    #[arg(short = 'k', long)]
    slots: Option<usize>,
    /// Sketch subtraction policy (mg only)
    #[arg(long, value_enum)]
    subtraction: Option<SubtractionArg>,
    /// Table size as a fraction of the vertex count (small-hash only)
    #[arg(long)]
    slots_fraction: Option<f64>,
    /// 1 uses sketch values directly, 2 re-weighs candidates exactly (lpa only)
    #[arg(long)]
    scans: Option<u8>,
    /// Worker threads (0 = all available cores)
    #[arg(short, long, default_value_t = 0)]
    threads: usize,
    /// Single worker, ascending vertex order, reproducible output
    #[arg(long)]
    deterministic: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Iteration tolerance (Louvain/Leiden gain, or LPA changed fraction)
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    max_iterations: Option<usize>,
    #[arg(long)]
    max_passes: Option<usize>,
    /// Membership output, one "vertex community" line per vertex
    #[arg(short, long)]
    membership: Option<PathBuf>,
    /// JSON report output (printed to stdout when omitted)
    #[arg(short, long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Run descriptor "algorithm:strategy[:key=value,...]", repeatable.
    /// Keys: slots, subtraction, slots_fraction, scans, threads.
    #[arg(long = "run", required = true)]
    runs: Vec<String>,
    /// Index of the baseline run
    #[arg(long, default_value_t = 0)]
    baseline: usize,
    /// Relative modularity below which a run is flagged
    #[arg(long, default_value_t = 0.99)]
    threshold: f64,
    #[arg(long)]
    deterministic: bool,
    /// Also write the comparison as JSON
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(short = 'n', long, default_value_t = 10_000)]
    vertices: usize,
    /// Fraction of each vertex's edges leaving its community
    #[arg(long, default_value_t = 0.3)]
    mixing: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(short, long)]
    output: PathBuf,
    /// Also write the planted membership
    #[arg(long)]
    truth: Option<PathBuf>,
}

impl InputArgs {
    fn apply(&self, spec: &mut RunSpec) {
        spec.indexing_base = self.base;
        spec.format = self.format.map(|f| match f {
            FormatArg::Edgelist => InputFormat::EdgeList,
            FormatArg::Mtx => InputFormat::MatrixMarket,
        });
    }
}

fn run_spec(a: &RunArgs) -> RunSpec {
    let algorithm = match a.algorithm {
        AlgorithmArg::Louvain => Algorithm::Louvain,
        AlgorithmArg::Leiden => Algorithm::Leiden,
        AlgorithmArg::Lpa => Algorithm::Lpa,
    };
    let strategy = match a.strategy {
        StrategyArg::FarKv => StrategyKind::FarKv,
        StrategyArg::SmallHash => StrategyKind::SmallHash,
        StrategyArg::Bm => StrategyKind::BoyerMoore,
        StrategyArg::Mg => StrategyKind::MisraGries,
    };
    let mut spec = RunSpec::new(&a.input.input, algorithm, strategy);
    a.input.apply(&mut spec);
    spec.slots = a.slots;
    spec.subtraction = a.subtraction.map(|s| match s {
        SubtractionArg::Conditional => SubtractionPolicy::Conditional,
        SubtractionArg::Unconditional => SubtractionPolicy::Unconditional,
    });
    spec.slots_fraction = a.slots_fraction;
    spec.scans = a.scans;
    spec.threads = a.threads;
    spec.deterministic = a.deterministic;
    spec.seed = a.seed;
    spec.tolerance = a.tolerance;
    spec.max_iterations = a.max_iterations;
    spec.max_passes = a.max_passes;
    spec.membership_out = a.membership.clone();
    spec.report_out = a.report.clone();
    spec
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(a) => {
            let spec = run_spec(&a);
            let outcome = run(&spec)?;
            if spec.report_out.is_none() {
                println!("{}", outcome.report.to_json()?);
            }
        }
        Command::Compare(a) => {
            let specs = a
                .runs
                .iter()
                .map(|d| {
                    let mut s = parse_run_descriptor(d, &a.input.input)?;
                    a.input.apply(&mut s);
                    s.deterministic = a.deterministic;
                    Ok(s)
                })
                .collect::<Result<Vec<_>>>()?;
            let cmp = compare(&specs, a.baseline, a.threshold)?;
            print!("{}", cmp.to_table());
            if let Some(path) = a.json {
                fs::write(path, serde_json::to_string_pretty(&cmp)? + "\n")?;
            }
        }
        Command::Generate(a) => {
            let cfg = PlantedPartitionConfig {
                vertices: a.vertices,
                mixing: a.mixing,
                seed: a.seed,
                ..Default::default()
            };
            let (g, truth) = planted_partition(&cfg)?;
            let mut out = String::new();
            for u in 0..g.num_vertices() as u32 {
                for (v, w) in g.neighbors(u) {
                    if u < v {
                        out.push_str(&format!("{u} {v} {w}\n"));
                    }
                }
            }
            fs::write(&a.output, out)?;
            if let Some(path) = a.truth {
                fs::write(path, sketchcomm::bench::format_membership(&truth))?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
