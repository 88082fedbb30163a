use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::ga::{initial_population, pair_up};
use super::operators::crossover;
use super::sa::{anneal, Schedule};
use super::{improves, Individual, Problem, SearchOutcome, SearchParams, Tracker};

/// GA whose mutation is a short annealing run on each child and whose survivor
/// selection is SA recombination: a child replaces its parent when better, or
/// when worse with probability `exp(-delta / temp)` under a temperature that
/// cools once per generation. The best-ever individual is always kept.
pub fn run_gasa(problem: &Problem, params: &SearchParams) -> SearchOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut tracker = Tracker::new(params.max_evaluations);
    let mut pop = initial_population(problem, params, &mut rng, &mut tracker);
    let mut best = pop[0].clone();
    tracker.record(0, &best);

    let w = params.weights;
    let mut temp = params.sa_initial_temp;
    let mut stall = 0;
    for generation in 1..=params.max_generations {
        if tracker.exhausted() {
            break;
        }
        let pairs = pair_up(&pop, &mut rng);
        let mut jobs = Vec::with_capacity(pairs.len() * 2);
        for &(a, b) in &pairs {
            let (c1, c2) = crossover(problem, &pop[a], &pop[b], params.crossover, &mut rng);
            jobs.push((c1, rng.gen::<u64>()));
            jobs.push((c2, rng.gen::<u64>()));
        }
        let schedule = Schedule {
            temp,
            cooling: params.sa_cooling,
            iterations: params.inner_sa_iterations,
            stall_limit: usize::MAX,
        };
        let results: Vec<(Individual, u64)> = jobs
            .into_par_iter()
            .map(|(mut child, seed)| {
                let mut evals = u64::from(child.score().is_none());
                problem.score(&mut child, w);
                let mut local = ChaCha8Rng::seed_from_u64(seed);
                let (improved, n) = anneal(
                    problem,
                    child,
                    &schedule,
                    params.ti_enabled,
                    w,
                    &mut local,
                    |_, _, _| true,
                );
                evals += n;
                (improved, evals)
            })
            .collect();
        tracker.evaluations += results.iter().map(|r| r.1).sum::<u64>();

        let mut children = results.into_iter().map(|r| r.0);
        for &(a, b) in &pairs {
            for parent in [a, b] {
                let child = children.next().expect("two children per pair");
                let delta = child.fitness() - pop[parent].fitness();
                if delta <= 0.0 || (temp > 0.0 && rng.gen::<f64>() < (-delta / temp).exp()) {
                    pop[parent] = child;
                }
            }
        }

        let (lead, lead_fit) = pop
            .iter()
            .enumerate()
            .map(|(i, p)| (i, p.fitness()))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .expect("non-empty population");
        if improves(lead_fit, best.fitness()) {
            best = pop[lead].clone();
            stall = 0;
        } else {
            stall += 1;
            if lead_fit > best.fitness() {
                let worst = pop
                    .iter()
                    .enumerate()
                    .max_by(|x, y| x.1.fitness().total_cmp(&y.1.fitness()))
                    .map(|(i, _)| i)
                    .expect("non-empty population");
                pop[worst] = best.clone();
            }
        }
        temp *= params.sa_cooling;
        tracker.record(generation, &best);
        if stall >= params.stall_limit {
            break;
        }
    }
    tracker.finish(best)
}
