use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use mcqf_core::mapping::map_flows;
use mcqf_core::opt::{
    convergence_point, run as run_search, Algorithm, FitnessBreakdown, FlowStatus, Problem,
    SearchOutcome, SearchParams, Weights,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::args::{parse_list, ScheduleArgs};
use crate::cycles::search;
use crate::inputs::{build_config, group_settings, load, write_json, GroupSettings};
use crate::Infeasible;

/// One line of the summary CSV. Column order is the field order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub topology: String,
    pub switches: usize,
    pub bw_bps: u64,
    pub kind: String,
    pub flows: usize,
    pub instance_seed: u64,
    pub cycles: String,
    pub queues: String,
    pub shares: String,
    pub mapping: String,
    pub splits: String,
    pub algo: String,
    pub ti: bool,
    pub alpha: f64,
    pub beta: f64,
    pub k: usize,
    pub seed: u64,
    pub scheduled: usize,
    pub schedulability: f64,
    pub fitness: f64,
    pub delay_term: f64,
    pub c1_violations: usize,
    pub c11_violations: usize,
    pub evaluations: u64,
    pub generations: usize,
    pub convergence_generation: usize,
    pub convergence_evaluations: u64,
    pub qg1_wcd_min: Option<u64>,
    pub qg1_wcd_mean: Option<f64>,
    pub qg1_wcd_max: Option<u64>,
    pub qg2_wcd_min: Option<u64>,
    pub qg2_wcd_mean: Option<f64>,
    pub qg2_wcd_max: Option<u64>,
    pub qg3_wcd_min: Option<u64>,
    pub qg3_wcd_mean: Option<f64>,
    pub qg3_wcd_max: Option<u64>,
    pub runtime_ms: f64,
    pub solution: String,
    pub trace: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolutionFlow {
    pub id: u32,
    /// One-based queue group.
    pub qg: usize,
    pub route: Vec<u32>,
    /// Injection offset in cycles.
    pub ti: u64,
    pub wcd_us: u64,
    pub scheduled: bool,
    pub status: FlowStatus,
}

#[derive(Clone, Debug, Serialize)]
pub struct Solution {
    pub algo: Algorithm,
    pub ti: bool,
    pub seed: u64,
    pub alpha: f64,
    pub beta: f64,
    pub cycles: Vec<u64>,
    pub queues: Vec<u8>,
    pub shares: Vec<f64>,
    pub mapping: String,
    pub splits: Vec<f64>,
    pub scheduled: usize,
    pub total: usize,
    pub schedulability: f64,
    pub fitness: FitnessBreakdown,
    pub evaluations: u64,
    pub flows: Vec<SolutionFlow>,
}

pub struct RunOutput {
    pub outcome: SearchOutcome,
    pub solution: Solution,
    pub runtime_ms: f64,
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

pub fn search_params(args: &ScheduleArgs, seed: u64) -> SearchParams {
    SearchParams {
        population_size: args.population,
        mutation_rate: args.mutation_rate,
        crossover: args.crossover,
        sa_iterations: args.sa_iterations,
        inner_sa_iterations: args.inner_sa,
        max_generations: args.generations,
        stall_limit: args.stall,
        max_evaluations: args.max_evals,
        seed,
        ti_enabled: args.ti,
        weights: Weights {
            alpha: args.alpha,
            beta: args.beta,
        },
        ..SearchParams::default()
    }
}

/// Runs one search and collects the per-flow solution.
pub fn solve(
    problem: &Problem,
    algo: Algorithm,
    params: &SearchParams,
    groups: &GroupSettings,
    mapping: &str,
) -> RunOutput {
    let start = Instant::now();
    let outcome = run_search(algo, problem, params);
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    let report = problem.evaluate(&outcome.best, params.weights);
    let mut flows: Vec<SolutionFlow> = report
        .flows
        .iter()
        .map(|f| SolutionFlow {
            id: f.id,
            qg: f.group + 1,
            route: f.route.clone(),
            ti: f.offset,
            wcd_us: f.wcd_us,
            scheduled: f.scheduled(),
            status: f.status,
        })
        .collect();
    flows.sort_by_key(|f| f.id);
    let total = problem.len();
    let solution = Solution {
        algo,
        ti: params.ti_enabled,
        seed: params.seed,
        alpha: params.weights.alpha,
        beta: params.weights.beta,
        cycles: problem.config().cycles(),
        queues: groups.queues.clone(),
        shares: groups.shares.clone(),
        mapping: mapping.to_string(),
        splits: groups.splits.clone(),
        scheduled: report.scheduled(),
        total,
        schedulability: report.scheduled() as f64 / total.max(1) as f64,
        fitness: report.breakdown,
        evaluations: outcome.evaluations,
        flows,
    };
    RunOutput {
        outcome,
        solution,
        runtime_ms,
    }
}

pub fn trace_csv(outcome: &SearchOutcome, timing: bool) -> String {
    let mut out = String::from("generation,best_fitness,scheduled,elapsed_ms\n");
    for t in &outcome.trace {
        let elapsed = if timing {
            format!("{:.3}", t.elapsed_ms)
        } else {
            String::new()
        };
        out.push_str(&format!(
            "{},{},{},{}\n",
            t.generation, t.best_fitness, t.scheduled, elapsed
        ));
    }
    out
}

fn wcd_stats(solution: &Solution, qg: usize) -> (Option<u64>, Option<f64>, Option<u64>) {
    let w: Vec<u64> = solution
        .flows
        .iter()
        .filter(|f| f.qg == qg && f.scheduled)
        .map(|f| f.wcd_us)
        .collect();
    if w.is_empty() {
        return (None, None, None);
    }
    let mean = w.iter().sum::<u64>() as f64 / w.len() as f64;
    (w.iter().min().copied(), Some(mean), w.iter().max().copied())
}

pub fn cycles_for(args: &ScheduleArgs, inputs: &crate::inputs::Inputs) -> Result<Vec<u64>> {
    if args.cycles.trim().eq_ignore_ascii_case("auto") {
        return Ok(
            search(&inputs.net, &inputs.flows, &args.groups, args.input.seed)?
                .best
                .cycles
                .to_vec(),
        );
    }
    parse_list(&args.cycles, "cycle")
}

/// Appends rows, writing the header only into a new or empty file.
pub fn append_summary(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    let fresh = fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let mut w = csv::WriterBuilder::new()
        .has_headers(fresh)
        .from_writer(file);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn run(args: &ScheduleArgs) -> Result<()> {
    let inputs = load(&args.input)?;
    let cycles = cycles_for(args, &inputs)?;
    let groups = group_settings(&args.groups, cycles.len())?;
    let config = build_config(&cycles, &groups)?;
    config.validate_for(&inputs.flows, inputs.net.bandwidth())?;
    let assignment = map_flows(
        &inputs.flows,
        args.groups.mapping,
        &groups.splits,
        args.input.seed,
    )?;
    let problem = Problem::new(
        inputs.net.clone(),
        inputs.flows.clone(),
        config,
        assignment,
        args.k,
    )?;
    if problem.slots().iter().any(|s| s.routes.is_empty()) {
        anyhow::bail!(Infeasible("a flow has no route".into()));
    }

    fs::create_dir_all(&args.out)?;
    let mapping = args.groups.mapping.to_string();
    let runs: Vec<(u64, RunOutput)> = (0..args.reps)
        .into_par_iter()
        .map(|i| {
            let seed = args.input.seed + i;
            (
                seed,
                solve(
                    &problem,
                    args.algo,
                    &search_params(args, seed),
                    &groups,
                    &mapping,
                ),
            )
        })
        .collect();

    let tag = format!("{}{}", args.algo, if args.ti { "-ti" } else { "" });
    let mut rows = Vec::with_capacity(runs.len());
    for (seed, out) in &runs {
        let solution_path = args.out.join(format!("{tag}_s{seed}.solution.json"));
        let trace_path = args.out.join(format!("{tag}_s{seed}.trace.csv"));
        write_json(&solution_path, &out.solution)?;
        fs::write(&trace_path, trace_csv(&out.outcome, args.trace_timing))
            .with_context(|| format!("writing {}", trace_path.display()))?;

        let conv = convergence_point(&out.outcome.trace);
        let conv_point = out.outcome.trace.get(conv);
        let s = &out.solution;
        let (q1, q2, q3) = (wcd_stats(s, 1), wcd_stats(s, 2), wcd_stats(s, 3));
        rows.push(SummaryRow {
            topology: inputs.topology_label.clone(),
            switches: inputs.net.switches().count(),
            bw_bps: inputs.net.bandwidth(),
            kind: inputs.kind_label.clone(),
            flows: s.total,
            instance_seed: args.input.flow_seed.unwrap_or(args.input.seed),
            cycles: join(&s.cycles),
            queues: join(&s.queues),
            shares: join(&s.shares),
            mapping: mapping.clone(),
            splits: join(&s.splits),
            algo: args.algo.to_string(),
            ti: args.ti,
            alpha: args.alpha,
            beta: args.beta,
            k: args.k,
            seed: *seed,
            scheduled: s.scheduled,
            schedulability: s.schedulability,
            fitness: s.fitness.total,
            delay_term: s.fitness.delay_term,
            c1_violations: s.fitness.c1_violations,
            c11_violations: s.fitness.c11_violations,
            evaluations: out.outcome.evaluations,
            generations: out.outcome.trace.last().map_or(0, |t| t.generation),
            convergence_generation: conv_point.map_or(0, |t| t.generation),
            convergence_evaluations: conv_point.map_or(0, |t| t.evaluations),
            qg1_wcd_min: q1.0,
            qg1_wcd_mean: q1.1,
            qg1_wcd_max: q1.2,
            qg2_wcd_min: q2.0,
            qg2_wcd_mean: q2.1,
            qg2_wcd_max: q2.2,
            qg3_wcd_min: q3.0,
            qg3_wcd_mean: q3.1,
            qg3_wcd_max: q3.2,
            runtime_ms: out.runtime_ms,
            solution: solution_path.display().to_string(),
            trace: trace_path.display().to_string(),
        });
        writeln!(
            std::io::stdout().lock(),
            "{tag} seed {seed}: scheduled {}/{} fitness {:.6} ({} evaluations, {:.0} ms)",
            s.scheduled,
            s.total,
            s.fitness.total,
            out.outcome.evaluations,
            out.runtime_ms
        )?;
    }
    let summary: PathBuf = args
        .summary
        .clone()
        .unwrap_or_else(|| args.out.join("summary.csv"));
    append_summary(&summary, &rows)
}
