//! Time-triggered flows and the four test-case families.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::TrafficError;
use crate::net::{Network, NodeId};

/// Periodic flow; times in microseconds, size in bytes including headers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TTFlow {
    pub id: u32,
    pub src: NodeId,
    pub dst: NodeId,
    #[serde(rename = "period_us")]
    pub period: u64,
    #[serde(rename = "deadline_us")]
    pub deadline: u64,
    #[serde(rename = "size_b")]
    pub size: u64,
}

impl TTFlow {
    pub fn bits(&self) -> u64 {
        self.size * 8
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowSet {
    flows: Vec<TTFlow>,
    hyperperiod: u64,
}

impl FlowSet {
    pub fn new(flows: Vec<TTFlow>) -> Result<Self, TrafficError> {
        if flows.is_empty() {
            return Err(TrafficError::Empty);
        }
        let mut ids = HashSet::with_capacity(flows.len());
        for f in &flows {
            if !ids.insert(f.id) {
                return Err(TrafficError::DuplicateFlow(f.id));
            }
            let invalid = |reason: &str| TrafficError::InvalidFlow {
                id: f.id,
                reason: reason.into(),
            };
            if f.period == 0 {
                return Err(invalid("period must be positive"));
            }
            if f.deadline == 0 || f.deadline > f.period {
                return Err(invalid("deadline must be in (0, period]"));
            }
            if f.size == 0 {
                return Err(invalid("size must be positive"));
            }
            if f.src == f.dst {
                return Err(invalid("source equals destination"));
            }
        }
        let hyperperiod = hyperperiod(flows.iter().map(|f| f.period))?;
        Ok(FlowSet { flows, hyperperiod })
    }

    /// Checks that every endpoint is an end station of `net`.
    pub fn check_endpoints(&self, net: &Network) -> Result<(), TrafficError> {
        use crate::net::NodeKind;
        for f in &self.flows {
            for n in [f.src, f.dst] {
                if net.node(n).map(|n| n.kind) != Some(NodeKind::EndStation) {
                    return Err(TrafficError::InvalidFlow {
                        id: f.id,
                        reason: format!("endpoint {n} is not an end station"),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn flows(&self) -> &[TTFlow] {
        &self.flows
    }

    pub fn len(&self) -> usize {
        self.flows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flows.is_empty()
    }

    pub fn hyperperiod(&self) -> u64 {
        self.hyperperiod
    }

    pub fn to_file(&self) -> FlowsFile {
        FlowsFile {
            flows: self.flows.clone(),
        }
    }

    pub fn from_file(file: FlowsFile) -> Result<Self, TrafficError> {
        FlowSet::new(file.flows)
    }
}

/// On-disk flow schema.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowsFile {
    pub flows: Vec<TTFlow>,
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn lcm(a: u64, b: u64) -> Option<u64> {
    (a / gcd(a, b)).checked_mul(b)
}

/// Least common multiple of the periods.
pub fn hyperperiod(periods: impl IntoIterator<Item = u64>) -> Result<u64, TrafficError> {
    let mut h: Option<u64> = None;
    for p in periods {
        h = Some(match h {
            None => p,
            Some(h) => lcm(h, p).ok_or(TrafficError::Overflow)?,
        });
    }
    h.ok_or(TrafficError::Empty)
}

/// Number of frames a flow emits within one hyperperiod.
pub fn frame_count(flow: &TTFlow, hyperperiod: u64) -> Result<u64, TrafficError> {
    if !hyperperiod.is_multiple_of(flow.period) {
        return Err(TrafficError::NonDivisible {
            period: flow.period,
            hyperperiod,
        });
    }
    Ok(hyperperiod / flow.period)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestcaseKind {
    /// Relaxed periods, deadline below period.
    Rsd,
    /// Tight periods, deadline below period.
    Tsd,
    /// Relaxed periods, deadline equal to period.
    Rld,
    /// Tight periods, deadline equal to period.
    Tld,
}

impl TestcaseKind {
    pub fn periods(self) -> &'static [u64] {
        match self {
            TestcaseKind::Rsd | TestcaseKind::Rld => &[1000, 2500, 5000, 10000],
            TestcaseKind::Tsd | TestcaseKind::Tld => &[100, 500, 1000],
        }
    }

    /// Inclusive frame size range in bytes.
    pub fn sizes(self) -> (u64, u64) {
        match self {
            TestcaseKind::Rsd | TestcaseKind::Rld => (55, 1500),
            TestcaseKind::Tsd | TestcaseKind::Tld => (55, 200),
        }
    }

    pub fn deadline_equals_period(self) -> bool {
        matches!(self, TestcaseKind::Rld | TestcaseKind::Tld)
    }
}

impl std::str::FromStr for TestcaseKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "rsd" => Ok(TestcaseKind::Rsd),
            "tsd" => Ok(TestcaseKind::Tsd),
            "rld" => Ok(TestcaseKind::Rld),
            "tld" => Ok(TestcaseKind::Tld),
            _ => Err(format!("unknown test case kind {s:?}")),
        }
    }
}

impl std::fmt::Display for TestcaseKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            TestcaseKind::Rsd => "rsd",
            TestcaseKind::Tsd => "tsd",
            TestcaseKind::Rld => "rld",
            TestcaseKind::Tld => "tld",
        };
        f.write_str(s)
    }
}

/// Draws `n_flows` flows of the given family between distinct end stations of `net`.
///
/// Small-deadline families draw the deadline uniformly from `[period / 2, period)`.
pub fn generate_testcase(
    kind: TestcaseKind,
    net: &Network,
    n_flows: usize,
    seed: u64,
) -> Result<FlowSet, TrafficError> {
    let hosts: Vec<NodeId> = net.end_stations().collect();
    if hosts.len() < 2 {
        return Err(TrafficError::InsufficientEndStations(hosts.len()));
    }
    if n_flows == 0 {
        return Err(TrafficError::Empty);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = kind.sizes();
    let flows = (0..n_flows)
        .map(|i| {
            let src_idx = rng.gen_range(0..hosts.len());
            let mut dst_idx = rng.gen_range(0..hosts.len() - 1);
            if dst_idx >= src_idx {
                dst_idx += 1;
            }
            let period = *kind
                .periods()
                .choose(&mut rng)
                .expect("non-empty period set");
            let size = rng.gen_range(lo..=hi);
            let deadline = if kind.deadline_equals_period() {
                period
            } else {
                rng.gen_range((period / 2).max(1)..period)
            };
            TTFlow {
                id: i as u32,
                src: hosts[src_idx],
                dst: hosts[dst_idx],
                period,
                deadline,
                size,
            }
        })
        .collect();
    FlowSet::new(flows)
}
