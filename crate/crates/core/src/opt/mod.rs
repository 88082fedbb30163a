//! Metaheuristic search over routes and injection offsets: simulated annealing,
//! a genetic algorithm, and the GA/SA hybrid.

mod ga;
mod gasa;
mod operators;
mod problem;
mod sa;

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use ga::run_ga;
pub use gasa::run_gasa;
pub use operators::{crossover, mutate, neighbor, CrossoverMode};
pub use problem::{
    FitnessBreakdown, FlowOutcome, FlowSlot, FlowStatus, Gene, Individual, Problem, SolutionReport,
    Weights,
};
pub use sa::run_sa;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Sa,
    Ga,
    Gasa,
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sa" => Ok(Algorithm::Sa),
            "ga" => Ok(Algorithm::Ga),
            "gasa" => Ok(Algorithm::Gasa),
            _ => Err(format!("unknown algorithm {s:?}")),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algorithm::Sa => "sa",
            Algorithm::Ga => "ga",
            Algorithm::Gasa => "gasa",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchParams {
    pub population_size: usize,
    /// Fraction of the merged parent+child pool kept each generation.
    pub elite_fraction: f64,
    pub mutation_rate: f64,
    pub crossover: CrossoverMode,
    pub sa_initial_temp: f64,
    /// Geometric cooling factor, applied per iteration (SA) or per generation (GASA).
    pub sa_cooling: f64,
    /// Iteration cap of the stand-alone annealer.
    pub sa_iterations: usize,
    /// Iterations of the annealing search used as GASA mutation.
    pub inner_sa_iterations: usize,
    pub max_generations: usize,
    /// Stop after this many iterations/generations without improving the best.
    pub stall_limit: usize,
    /// Optional cap on fitness evaluations, checked between iterations/generations.
    pub max_evaluations: Option<u64>,
    pub seed: u64,
    pub ti_enabled: bool,
    pub weights: Weights,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            population_size: 50,
            elite_fraction: 0.5,
            mutation_rate: 0.1,
            crossover: CrossoverMode::WholeFlow,
            sa_initial_temp: 1.0,
            sa_cooling: 0.95,
            sa_iterations: 5000,
            inner_sa_iterations: 20,
            max_generations: 300,
            stall_limit: 50,
            max_evaluations: None,
            seed: 0,
            ti_enabled: false,
            weights: Weights::default(),
        }
    }
}

/// Best-so-far snapshot after one iteration (SA) or generation (GA, GASA).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TracePoint {
    pub generation: usize,
    pub best_fitness: f64,
    pub scheduled: usize,
    /// Cumulative fitness evaluations.
    pub evaluations: u64,
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub best: Individual,
    pub trace: Vec<TracePoint>,
    pub evaluations: u64,
}

impl SearchOutcome {
    pub fn fitness(&self) -> f64 {
        self.best.fitness()
    }

    pub fn scheduled(&self) -> usize {
        self.best.score().map_or(0, |s| s.scheduled)
    }
}

/// Index of the first trace point that already holds the final best fitness.
pub fn convergence_point(trace: &[TracePoint]) -> usize {
    let Some(last) = trace.last() else {
        return 0;
    };
    trace
        .iter()
        .position(|t| t.best_fitness <= last.best_fitness)
        .unwrap_or(0)
}

pub fn run(algorithm: Algorithm, problem: &Problem, params: &SearchParams) -> SearchOutcome {
    match algorithm {
        Algorithm::Sa => run_sa(problem, params),
        Algorithm::Ga => run_ga(problem, params),
        Algorithm::Gasa => run_gasa(problem, params),
    }
}

/// Counts evaluations and records the trace.
struct Tracker {
    start: Instant,
    evaluations: u64,
    trace: Vec<TracePoint>,
    budget: Option<u64>,
}

impl Tracker {
    fn new(budget: Option<u64>) -> Self {
        Tracker {
            start: Instant::now(),
            evaluations: 0,
            trace: Vec::new(),
            budget,
        }
    }

    fn score(&mut self, problem: &Problem, ind: &mut Individual, w: Weights) -> f64 {
        if ind.score().is_none() {
            self.evaluations += 1;
        }
        problem.score(ind, w)
    }

    /// Scores a batch in parallel; results do not depend on thread count.
    fn score_all(&mut self, problem: &Problem, pop: &mut [Individual], w: Weights) {
        self.evaluations += pop.iter().filter(|i| i.score().is_none()).count() as u64;
        pop.par_iter_mut().for_each(|ind| {
            problem.score(ind, w);
        });
    }

    fn record(&mut self, generation: usize, best: &Individual) {
        self.trace.push(TracePoint {
            generation,
            best_fitness: best.fitness(),
            scheduled: best.score().map_or(0, |s| s.scheduled),
            evaluations: self.evaluations,
            elapsed_ms: self.start.elapsed().as_secs_f64() * 1e3,
        });
    }

    fn exhausted(&self) -> bool {
        self.budget.is_some_and(|b| self.evaluations >= b)
    }

    fn finish(self, best: Individual) -> SearchOutcome {
        SearchOutcome {
            best,
            trace: self.trace,
            evaluations: self.evaluations,
        }
    }
}

/// Strictly better beyond float noise.
fn improves(candidate: f64, incumbent: f64) -> bool {
    candidate < incumbent - 1e-12
}

fn sort_by_fitness(pop: &mut [Individual]) {
    pop.sort_by(|a, b| a.fitness().total_cmp(&b.fitness()));
}
