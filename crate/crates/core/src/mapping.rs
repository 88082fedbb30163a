//! Flow sorting and flow-to-queue-group partitioning.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::MappingError;
use crate::traffic::{FlowSet, TTFlow};

pub const DEFAULT_SPLITS: [f64; 3] = [0.5, 0.3, 0.2];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MappingStrategy {
    /// Ascending deadline.
    Dbm,
    /// Ascending period.
    Pbm,
    /// Seeded random order.
    Rm,
}

impl std::str::FromStr for MappingStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dbm" => Ok(MappingStrategy::Dbm),
            "pbm" => Ok(MappingStrategy::Pbm),
            "rm" => Ok(MappingStrategy::Rm),
            _ => Err(format!("unknown mapping strategy {s:?}")),
        }
    }
}

impl std::fmt::Display for MappingStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MappingStrategy::Dbm => "dbm",
            MappingStrategy::Pbm => "pbm",
            MappingStrategy::Rm => "rm",
        })
    }
}

/// Disjoint, ordered flow-id lists, one per queue group. The order inside each
/// list is the scheduling order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QgAssignment {
    pub groups: Vec<Vec<u32>>,
    pub splits: Vec<f64>,
}

impl QgAssignment {
    /// Queue-group index of a flow id, if assigned.
    pub fn group_of(&self, id: u32) -> Option<usize> {
        self.groups.iter().position(|g| g.contains(&id))
    }

    /// All ids, group by group, in scheduling order.
    pub fn order(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.groups
            .iter()
            .enumerate()
            .flat_map(|(g, ids)| ids.iter().map(move |&id| (g, id)))
    }
}

/// Group sizes: `round(s_i * n)` for all but the last group, which takes the remainder.
pub fn split_sizes(n: usize, splits: &[f64]) -> Vec<usize> {
    let mut sizes = Vec::with_capacity(splits.len());
    let mut left = n;
    for (i, s) in splits.iter().enumerate() {
        let size = if i + 1 == splits.len() {
            left
        } else {
            ((s * n as f64).round() as usize).min(left)
        };
        sizes.push(size);
        left -= size;
    }
    sizes
}

fn check_splits(splits: &[f64]) -> Result<(), MappingError> {
    let sum: f64 = splits.iter().sum();
    if splits.is_empty()
        || splits.iter().any(|&s| s.is_nan() || s <= 0.0)
        || (sum - 1.0).abs() > 1e-6
    {
        return Err(MappingError::InvalidSplits(
            splits.iter().map(|s| s.to_string()).collect(),
        ));
    }
    Ok(())
}

/// Sorts flows per `strategy` (ties by flow id) and cuts the order into
/// consecutive groups sized by `splits`. `seed` only matters for random mapping.
pub fn map_flows(
    flows: &FlowSet,
    strategy: MappingStrategy,
    splits: &[f64],
    seed: u64,
) -> Result<QgAssignment, MappingError> {
    check_splits(splits)?;
    let mut order: Vec<&TTFlow> = flows.flows().iter().collect();
    match strategy {
        MappingStrategy::Dbm => order.sort_by_key(|f| (f.deadline, f.id)),
        MappingStrategy::Pbm => order.sort_by_key(|f| (f.period, f.id)),
        MappingStrategy::Rm => {
            order.sort_by_key(|f| f.id);
            order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        }
    }
    let mut rest = order.as_slice();
    let groups = split_sizes(order.len(), splits)
        .into_iter()
        .map(|n| {
            let (head, tail) = rest.split_at(n);
            rest = tail;
            head.iter().map(|f| f.id).collect()
        })
        .collect();
    Ok(QgAssignment {
        groups,
        splits: splits.to_vec(),
    })
}

/// Offset choices per group: the product over its flows of `period / cycle`.
/// `None` on overflow.
pub fn group_offset_spaces(
    flows: &FlowSet,
    assignment: &QgAssignment,
    cycles: &[u64],
) -> Option<Vec<u128>> {
    assignment
        .groups
        .iter()
        .zip(cycles)
        .map(|(ids, &t)| {
            ids.iter().try_fold(1u128, |acc, id| {
                let f = flows.flows().iter().find(|f| f.id == *id)?;
                acc.checked_mul((f.period / t) as u128)
            })
        })
        .collect()
}

/// Offset choices when every flow shares one cycle.
pub fn single_offset_space(flows: &FlowSet, cycle: u64) -> Option<u128> {
    flows
        .flows()
        .iter()
        .try_fold(1u128, |acc, f| acc.checked_mul((f.period / cycle) as u128))
}
