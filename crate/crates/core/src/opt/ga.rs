use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::operators::{crossover, mutate};
use super::{improves, sort_by_fitness, Individual, Problem, SearchOutcome, SearchParams, Tracker};

pub(super) fn initial_population(
    problem: &Problem,
    params: &SearchParams,
    rng: &mut ChaCha8Rng,
    tracker: &mut Tracker,
) -> Vec<Individual> {
    let mut pop: Vec<Individual> = (0..params.population_size.max(2))
        .map(|_| problem.random_individual(params.ti_enabled, rng))
        .collect();
    tracker.score_all(problem, &mut pop, params.weights);
    sort_by_fitness(&mut pop);
    pop
}

/// Shuffled consecutive pairs; an odd individual out sits the generation out.
pub(super) fn pair_up(pop: &[Individual], rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut idx: Vec<usize> = (0..pop.len()).collect();
    idx.shuffle(rng);
    idx.chunks_exact(2).map(|c| (c[0], c[1])).collect()
}

/// Elitist GA: children of shuffled elite pairs join the elites, the merged pool
/// is sorted by fitness and truncated back to the elite fraction.
pub fn run_ga(problem: &Problem, params: &SearchParams) -> SearchOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut tracker = Tracker::new(params.max_evaluations);
    let mut elites = initial_population(problem, params, &mut rng, &mut tracker);
    let mut best = elites[0].clone();
    tracker.record(0, &best);

    let mut stall = 0;
    for generation in 1..=params.max_generations {
        if tracker.exhausted() {
            break;
        }
        let mut children = Vec::with_capacity(elites.len());
        for (a, b) in pair_up(&elites, &mut rng) {
            let (c1, c2) = crossover(problem, &elites[a], &elites[b], params.crossover, &mut rng);
            children.push(mutate(
                problem,
                &c1,
                params.mutation_rate,
                params.ti_enabled,
                &mut rng,
            ));
            children.push(mutate(
                problem,
                &c2,
                params.mutation_rate,
                params.ti_enabled,
                &mut rng,
            ));
        }
        tracker.score_all(problem, &mut children, params.weights);

        let keep = elites.len();
        elites.extend(children);
        // stable: ties keep elites ahead of newcomers
        sort_by_fitness(&mut elites);
        let cut = ((elites.len() as f64 * params.elite_fraction).round() as usize).clamp(1, keep);
        elites.truncate(cut);

        if improves(elites[0].fitness(), best.fitness()) {
            best = elites[0].clone();
            stall = 0;
        } else {
            stall += 1;
        }
        tracker.record(generation, &best);
        if stall >= params.stall_limit {
            break;
        }
    }
    tracker.finish(best)
}
