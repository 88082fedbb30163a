//! Variation operators over the per-flow state vector.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::problem::{Individual, Problem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossoverMode {
    /// Each flow block is copied whole from a randomly chosen parent.
    WholeFlow,
    /// Route and offset of each flow are picked independently from either parent.
    GeneMix,
}

pub fn crossover(
    problem: &Problem,
    p1: &Individual,
    p2: &Individual,
    mode: CrossoverMode,
    rng: &mut impl Rng,
) -> (Individual, Individual) {
    let mut c1 = p1.clone();
    let mut c2 = p1.clone();
    c1.invalidate();
    c2.invalidate();
    let (g1, g2) = (p1.genes(), p2.genes());
    for pos in 0..g1.len() {
        for child in [&mut c1, &mut c2] {
            let gene = match mode {
                CrossoverMode::WholeFlow => {
                    if rng.gen::<bool>() {
                        g1[pos]
                    } else {
                        g2[pos]
                    }
                }
                CrossoverMode::GeneMix => {
                    let route = if rng.gen::<bool>() {
                        g1[pos].route
                    } else {
                        g2[pos].route
                    };
                    let offset = if rng.gen::<bool>() {
                        g1[pos].offset
                    } else {
                        g2[pos].offset
                    };
                    problem.gene(pos, route, offset)
                }
            };
            child.genes_mut()[pos] = gene;
        }
    }
    (c1, c2)
}

/// Re-rolls each flow block with probability `rate`: a uniform route and, with
/// `ti`, a uniform offset below the injection bound.
pub fn mutate(
    problem: &Problem,
    ind: &Individual,
    rate: f64,
    ti: bool,
    rng: &mut impl Rng,
) -> Individual {
    let mut out = ind.clone();
    let mut changed = false;
    for (pos, slot) in problem.slots().iter().enumerate() {
        if rate <= 0.0 || rng.gen::<f64>() >= rate {
            continue;
        }
        let old = out.genes()[pos];
        let route = rng.gen_range(0..slot.routes.len());
        let offset = if ti {
            rng.gen_range(0..slot.ti_bound)
        } else {
            old.offset
        };
        let new = problem.gene(pos, route, offset);
        if new != old {
            out.genes_mut()[pos] = new;
            changed = true;
        }
    }
    if changed {
        out.invalidate();
    }
    out
}

/// Single-flow move for annealing: re-rolls either the route or the offset of one
/// flow to a different value. `None` when no flow has any freedom.
pub fn neighbor(
    problem: &Problem,
    ind: &Individual,
    ti: bool,
    rng: &mut impl Rng,
) -> Option<Individual> {
    let free: Vec<(usize, bool, bool)> = problem
        .slots()
        .iter()
        .enumerate()
        .map(|(i, s)| (i, s.routes.len() > 1, ti && s.ti_bound > 1))
        .filter(|&(_, r, o)| r || o)
        .collect();
    if free.is_empty() {
        return None;
    }
    let (pos, can_route, can_offset) = free[rng.gen_range(0..free.len())];
    let slot = &problem.slots()[pos];
    let old = ind.genes()[pos];
    let reroute = match (can_route, can_offset) {
        (true, true) => rng.gen::<bool>(),
        (r, _) => r,
    };
    let new = if reroute {
        let mut r = rng.gen_range(0..slot.routes.len() - 1);
        if r >= old.route {
            r += 1;
        }
        problem.gene(pos, r, old.offset)
    } else {
        let mut o = rng.gen_range(0..slot.ti_bound - 1);
        if o >= old.offset {
            o += 1;
        }
        problem.gene(pos, old.route, o)
    };
    let mut out = ind.clone();
    out.genes_mut()[pos] = new;
    out.invalidate();
    Some(out)
}
