//! Heuristic choice of the three queue-group cycles.
//!
//! Every valid cycle triple is scored by the fraction of flows a greedy pass
//! schedules on shortest routes with zero injection offset; the first triple
//! with the highest score wins.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CycleSearchError, ProblemError};
use crate::mapping::{map_flows, MappingStrategy, DEFAULT_SPLITS};
use crate::mcqf::{
    candidate_cycles, validate_combination, McqfConfig, Overheads, QueueGroupConfig,
    DEFAULT_QUEUES, DEFAULT_SHARES,
};
use crate::net::Network;
use crate::opt::{Problem, Weights};
use crate::traffic::FlowSet;

/// Everything except the cycles that shapes a Multi-CQF configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct CycleSearchSettings {
    pub queues: [u8; 3],
    pub shares: [f64; 3],
    pub xi: Overheads,
    pub mapping: MappingStrategy,
    pub splits: [f64; 3],
    pub seed: u64,
}

impl Default for CycleSearchSettings {
    fn default() -> Self {
        CycleSearchSettings {
            queues: DEFAULT_QUEUES,
            shares: DEFAULT_SHARES,
            xi: Overheads::default(),
            mapping: MappingStrategy::Dbm,
            splits: DEFAULT_SPLITS,
            seed: 0,
        }
    }
}

impl CycleSearchSettings {
    pub fn config(&self, cycles: [u64; 3]) -> Result<McqfConfig, ProblemError> {
        let groups = (0..3)
            .map(|i| QueueGroupConfig::new(cycles[i], self.queues[i], self.shares[i]))
            .collect();
        Ok(McqfConfig::new(groups, self.xi)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CycleCombination {
    pub cycles: [u64; 3],
    /// Scheduled fraction of the flow set.
    pub score: f64,
    pub scheduled: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CycleSearch {
    pub best: CycleCombination,
    /// Every scored triple in enumeration order.
    pub combinations: Vec<CycleCombination>,
}

/// All strictly increasing triples of `candidates` where each cycle divides the next,
/// in lexicographic order.
pub fn enumerate_combinations(candidates: &[u64]) -> Vec<[u64; 3]> {
    let mut sorted = candidates.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut out = Vec::new();
    for (i, &a) in sorted.iter().enumerate() {
        for (j, &b) in sorted.iter().enumerate().skip(i + 1) {
            if b % a != 0 {
                continue;
            }
            for &c in &sorted[j + 1..] {
                if validate_combination([a, b, c]) {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out
}

/// Greedy score of one triple: shortest routes, zero offsets, flows placed in
/// mapped order.
pub fn score_combination(
    net: &Network,
    flows: &FlowSet,
    cycles: [u64; 3],
    settings: &CycleSearchSettings,
) -> Result<CycleCombination, ProblemError> {
    let config = settings.config(cycles)?;
    let assignment = map_flows(flows, settings.mapping, &settings.splits, settings.seed)?;
    let problem = Problem::new(net.clone(), flows.clone(), config, assignment, 1)?;
    let fb = problem.fitness(&problem.baseline_individual(), Weights::default());
    Ok(CycleCombination {
        cycles,
        score: fb.scheduled as f64 / flows.len() as f64,
        scheduled: fb.scheduled,
    })
}

pub fn best_cycle_combination(
    net: &Network,
    flows: &FlowSet,
    settings: &CycleSearchSettings,
) -> Result<CycleSearch, CycleSearchError> {
    let candidates = candidate_cycles(flows, net.bandwidth(), settings.xi.total());
    let combos = enumerate_combinations(&candidates);
    if combos.is_empty() {
        return Err(CycleSearchError::NoFeasibleCombination(candidates.len()));
    }
    let combinations = combos
        .par_iter()
        .map(|&c| score_combination(net, flows, c, settings))
        .collect::<Result<Vec<_>, _>>()?;
    // first strict maximum in enumeration order
    let mut best = combinations[0];
    for c in &combinations[1..] {
        if c.score > best.score {
            best = *c;
        }
    }
    Ok(CycleSearch { best, combinations })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triples_from_divisors_of_100() {
        assert_eq!(
            enumerate_combinations(&[20, 25, 50, 100]),
            vec![[25, 50, 100]]
        );
    }

    #[test]
    fn too_few_candidates() {
        assert!(enumerate_combinations(&[25, 50]).is_empty());
        assert!(enumerate_combinations(&[]).is_empty());
    }

    #[test]
    fn four_chain() {
        assert_eq!(
            enumerate_combinations(&[25, 50, 100, 200]),
            vec![[25, 50, 100], [25, 50, 200], [25, 100, 200], [50, 100, 200]]
        );
    }
}
