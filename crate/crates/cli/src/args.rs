use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mcqf_core::mapping::MappingStrategy;
use mcqf_core::net::{TopologyKind, TopologySpec};
use mcqf_core::opt::{Algorithm, CrossoverMode};
use mcqf_core::traffic::TestcaseKind;

#[derive(Parser, Debug)]
#[command(
    name = "mcqf",
    version,
    about = "Multi-CQF configuration and experiment harness"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a topology and a flow set and write them as JSON.
    Gen(GenArgs),
    /// Pick the cycle triple with the best greedy schedulability.
    Cycles(CyclesArgs),
    /// Run one optimizer and write solution, trace and summary files.
    Schedule(ScheduleArgs),
    /// Aggregate a summary CSV per algorithm and TI setting.
    Report(ReportArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TopoName {
    Erg,
    Rrg,
    Bag,
    Ring,
}

#[derive(Args, Clone, Debug)]
pub struct TopoArgs {
    #[arg(long, value_enum, default_value = "erg")]
    pub topo: TopoName,
    /// Number of switches.
    #[arg(long, visible_alias = "switches", default_value_t = 10)]
    pub n: usize,
    /// ERG edge probability.
    #[arg(long, default_value_t = 0.3)]
    pub p: f64,
    /// RRG degree.
    #[arg(long, default_value_t = 3)]
    pub d: usize,
    /// BAG edges per new switch.
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long, default_value_t = 1)]
    pub hosts_per_switch: usize,
    #[arg(long, default_value_t = 100_000_000)]
    pub bw_bps: u64,
}

impl TopoArgs {
    pub fn spec(&self) -> TopologySpec {
        let kind = match self.topo {
            TopoName::Erg => TopologyKind::Erg {
                n: self.n,
                p: self.p,
            },
            TopoName::Rrg => TopologyKind::Rrg {
                n: self.n,
                d: self.d,
            },
            TopoName::Bag => TopologyKind::Bag {
                n: self.n,
                m: self.m,
            },
            TopoName::Ring => TopologyKind::Ring { n: self.n },
        };
        let mut spec = TopologySpec::new(kind, self.bw_bps);
        spec.hosts_per_switch = self.hosts_per_switch;
        spec
    }

    pub fn label(&self) -> String {
        match self.topo {
            TopoName::Erg => format!("erg({},{})", self.n, self.p),
            TopoName::Rrg => format!("rrg({},{})", self.n, self.d),
            TopoName::Bag => format!("bag({},{})", self.n, self.m),
            TopoName::Ring => format!("ring({})", self.n),
        }
    }
}

#[derive(Args, Clone, Debug)]
pub struct FlowArgs {
    #[arg(long, default_value = "rsd")]
    pub kind: TestcaseKind,
    #[arg(long, default_value_t = 100)]
    pub flows: usize,
}

/// Where the network and traffic come from: files, or generated from flags.
#[derive(Args, Clone, Debug)]
pub struct InputArgs {
    #[command(flatten)]
    pub topo: TopoArgs,
    #[command(flatten)]
    pub traffic: FlowArgs,
    #[arg(long)]
    pub topology_file: Option<PathBuf>,
    #[arg(long)]
    pub flows_file: Option<PathBuf>,
    /// Seed for generated inputs and the search.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Separate seed for the generated topology; defaults to --seed.
    #[arg(long)]
    pub topo_seed: Option<u64>,
    /// Separate seed for the generated flows; defaults to --seed.
    #[arg(long)]
    pub flow_seed: Option<u64>,
}

#[derive(Args, Clone, Debug)]
pub struct GroupArgs {
    /// Queues per group, 2 (CQF) or 3 (CSQF), comma separated.
    #[arg(long)]
    pub queues: Option<String>,
    /// Bandwidth share per group, comma separated.
    #[arg(long)]
    pub shares: Option<String>,
    #[arg(long, default_value = "dbm")]
    pub mapping: MappingStrategy,
    /// Fraction of the flows per group, comma separated.
    #[arg(long)]
    pub splits: Option<String>,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct CyclesArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub groups: GroupArgs,
    /// Print every valid triple with its score.
    #[arg(long)]
    pub list: bool,
    /// Also write cycles.json into this directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ScheduleArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub groups: GroupArgs,
    /// One to three comma-separated cycles in microseconds, or `auto`.
    #[arg(long, default_value = "auto")]
    pub cycles: String,
    #[arg(long, default_value = "ga")]
    pub algo: Algorithm,
    #[arg(long, default_value = "off", value_parser = parse_switch, action = clap::ArgAction::Set)]
    pub ti: bool,
    #[arg(long, default_value_t = 2.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 2.0)]
    pub beta: f64,
    /// Candidate routes per flow.
    #[arg(long, default_value_t = 4)]
    pub k: usize,
    /// Independent runs with seeds seed, seed+1, ...
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub reps: u64,
    #[arg(long, default_value_t = 50)]
    pub population: usize,
    #[arg(long, default_value_t = 300)]
    pub generations: usize,
    #[arg(long, default_value_t = 50)]
    pub stall: usize,
    #[arg(long, default_value_t = 0.1)]
    pub mutation_rate: f64,
    #[arg(long, default_value = "whole-flow", value_parser = parse_crossover)]
    pub crossover: CrossoverMode,
    #[arg(long, default_value_t = 5000)]
    pub sa_iterations: usize,
    #[arg(long, default_value_t = 20)]
    pub inner_sa: usize,
    /// Stop after roughly this many fitness evaluations.
    #[arg(long)]
    pub max_evals: Option<u64>,
    /// Record wall-clock time in the trace CSV (makes it non-reproducible).
    #[arg(long)]
    pub trace_timing: bool,
    #[arg(long, default_value = "results")]
    pub out: PathBuf,
    /// Summary CSV to append to; defaults to OUT/summary.csv.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// Summary CSV written by `schedule`.
    pub summary: PathBuf,
    /// Also write the aggregate table here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_switch(s: &str) -> Result<bool, String> {
    match s.to_ascii_lowercase().as_str() {
        "on" | "true" | "1" => Ok(true),
        "off" | "false" | "0" => Ok(false),
        _ => Err(format!("expected on or off, got {s:?}")),
    }
}

fn parse_crossover(s: &str) -> Result<CrossoverMode, String> {
    match s {
        "whole-flow" | "whole" => Ok(CrossoverMode::WholeFlow),
        "gene-mix" | "mix" => Ok(CrossoverMode::GeneMix),
        _ => Err(format!("expected whole-flow or gene-mix, got {s:?}")),
    }
}

/// Parses a comma-separated list.
pub fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> anyhow::Result<Vec<T>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<T>()
                .map_err(|_| anyhow::anyhow!("invalid {what} value {x:?}"))
        })
        .collect()
}
