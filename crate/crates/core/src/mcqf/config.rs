use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::traffic::FlowSet;

use super::constraints::{t_max, t_min};

/// One CQF (2 queues) or CSQF (3 queues, the third one tolerating late frames)
/// instance on an egress port.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueueGroupConfig {
    pub cycle_us: u64,
    pub queues: u8,
    /// Fraction of link bandwidth reserved for this group.
    pub share: f64,
}

impl QueueGroupConfig {
    pub fn new(cycle_us: u64, queues: u8, share: f64) -> Self {
        QueueGroupConfig {
            cycle_us,
            queues,
            share,
        }
    }

    pub fn has_tolerating_queue(&self) -> bool {
        self.queues == 3
    }
}

/// Per-hop overheads lumped into the minimum cycle, in microseconds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Overheads {
    pub proc: f64,
    pub prop: f64,
    pub sync: f64,
}

impl Overheads {
    pub fn total(&self) -> f64 {
        self.proc + self.prop + self.sync
    }
}

impl Default for Overheads {
    fn default() -> Self {
        Overheads {
            proc: 1.0,
            prop: 0.5,
            sync: 0.5,
        }
    }
}

pub const DEFAULT_SHARES: [f64; 3] = [0.4, 0.3, 0.2];
pub const DEFAULT_QUEUES: [u8; 3] = [3, 2, 2];

/// Ordered queue groups of one Multi-CQF port configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McqfConfig {
    pub groups: Vec<QueueGroupConfig>,
    #[serde(rename = "xi_us", default)]
    pub xi: Overheads,
}

impl McqfConfig {
    pub fn new(groups: Vec<QueueGroupConfig>, xi: Overheads) -> Result<Self, ConfigError> {
        let cfg = McqfConfig { groups, xi };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Default Multi-CQF shape for the given cycles: shares 40/30/20 and a CSQF
    /// instance in the first group.
    pub fn multi(cycles: [u64; 3]) -> Result<Self, ConfigError> {
        let groups = (0..3)
            .map(|i| QueueGroupConfig::new(cycles[i], DEFAULT_QUEUES[i], DEFAULT_SHARES[i]))
            .collect();
        McqfConfig::new(groups, Overheads::default())
    }

    /// Plain CQF (2 queues) or CSQF (3 queues) with a single cycle.
    pub fn single(cycle_us: u64, queues: u8, share: f64) -> Result<Self, ConfigError> {
        McqfConfig::new(
            vec![QueueGroupConfig::new(cycle_us, queues, share)],
            Overheads::default(),
        )
    }

    pub fn cycles(&self) -> Vec<u64> {
        self.groups.iter().map(|g| g.cycle_us).collect()
    }

    /// Structural checks: queue counts, shares, and the cycle ordering and
    /// divisibility chain between groups.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.groups.is_empty() || self.groups.len() > 3 {
            return Err(ConfigError::GroupCount(self.groups.len()));
        }
        for (i, g) in self.groups.iter().enumerate() {
            if g.cycle_us == 0 {
                return Err(ConfigError::ZeroCycle(i + 1));
            }
            if g.queues != 2 && g.queues != 3 {
                return Err(ConfigError::QueueCount(i + 1));
            }
            if !(g.share > 0.0 && g.share <= 1.0) {
                return Err(ConfigError::Share(i + 1));
            }
        }
        let total: f64 = self.groups.iter().map(|g| g.share).sum();
        if total > 1.0 + 1e-9 {
            return Err(ConfigError::ShareSum(format!("{total:.3}")));
        }
        check_cycle_chain(&self.cycles())
    }

    /// Checks every cycle against the flow set: it must divide every period and lie
    /// between the minimum and maximum cycle.
    pub fn validate_for(&self, flows: &FlowSet, bw_bps: u64) -> Result<(), ConfigError> {
        self.validate()?;
        let lo = t_min(flows, bw_bps, self.xi.total());
        let hi = t_max(flows);
        for g in &self.groups {
            if let Some(f) = flows.flows().iter().find(|f| f.period % g.cycle_us != 0) {
                return Err(ConfigError::CycleNotDividingPeriod {
                    cycle: g.cycle_us,
                    period: f.period,
                    flow: f.id,
                });
            }
            if g.cycle_us < lo || g.cycle_us > hi {
                return Err(ConfigError::CycleOutOfRange {
                    cycle: g.cycle_us,
                    t_min: lo,
                    t_max: hi,
                });
            }
        }
        Ok(())
    }
}

/// Strictly increasing cycles, each an integral multiple of its predecessor.
pub fn check_cycle_chain(cycles: &[u64]) -> Result<(), ConfigError> {
    for w in cycles.windows(2) {
        if w[0] >= w[1] {
            return Err(ConfigError::CycleOrder(cycles.to_vec()));
        }
    }
    for w in cycles.windows(2) {
        if w[1] % w[0] != 0 {
            return Err(ConfigError::CycleMultiple(cycles.to_vec()));
        }
    }
    Ok(())
}
