use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::operators::neighbor;
use super::{improves, Individual, Problem, SearchOutcome, SearchParams, Tracker, Weights};

pub(super) struct Schedule {
    pub temp: f64,
    pub cooling: f64,
    pub iterations: usize,
    pub stall_limit: usize,
}

/// Single-solution annealing from a scored `start`. Calls `step` after every
/// iteration with the iteration number, the best-ever individual and the
/// evaluations spent so far; returning `false` stops the search. Returns the
/// best-ever individual, never worse than `start`, and the evaluation count.
pub(super) fn anneal(
    problem: &Problem,
    start: Individual,
    schedule: &Schedule,
    ti: bool,
    w: Weights,
    rng: &mut impl Rng,
    mut step: impl FnMut(usize, &Individual, u64) -> bool,
) -> (Individual, u64) {
    debug_assert!(start.score().is_some());
    let mut current = start.clone();
    let mut best = start;
    let mut temp = schedule.temp;
    let mut evaluations = 0;
    let mut stall = 0;
    for iter in 1..=schedule.iterations {
        let Some(mut cand) = neighbor(problem, &current, ti, rng) else {
            break;
        };
        let f = problem.score(&mut cand, w);
        evaluations += 1;
        let delta = f - current.fitness();
        if delta <= 0.0 || (temp > 0.0 && rng.gen::<f64>() < (-delta / temp).exp()) {
            current = cand;
        }
        if improves(current.fitness(), best.fitness()) {
            best = current.clone();
            stall = 0;
        } else {
            stall += 1;
        }
        temp *= schedule.cooling;
        if !step(iter, &best, evaluations) || stall >= schedule.stall_limit {
            break;
        }
    }
    (best, evaluations)
}

/// Baseline simulated annealing from a random encoding.
pub fn run_sa(problem: &Problem, params: &SearchParams) -> SearchOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut tracker = Tracker::new(params.max_evaluations);
    let mut start = problem.random_individual(params.ti_enabled, &mut rng);
    tracker.score(problem, &mut start, params.weights);
    tracker.record(0, &start);
    let schedule = Schedule {
        temp: params.sa_initial_temp,
        cooling: params.sa_cooling,
        iterations: params.sa_iterations,
        stall_limit: params.stall_limit,
    };
    let base = tracker.evaluations;
    let (best, _) = anneal(
        problem,
        start,
        &schedule,
        params.ti_enabled,
        params.weights,
        &mut rng,
        |iter, best, evals| {
            tracker.evaluations = base + evals;
            tracker.record(iter, best);
            !tracker.exhausted()
        },
    );
    tracker.finish(best)
}
