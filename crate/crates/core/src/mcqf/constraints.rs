//! Delay bounds and the cycle/bandwidth constraints of a Multi-CQF configuration.
//! Times are integer microseconds, budgets are integer bits.

use crate::net::{Network, Route};
use crate::traffic::{gcd, FlowSet, TTFlow};

use super::config::{check_cycle_chain, McqfConfig, QueueGroupConfig};

/// Per-switch waiting time: one full cycle in the tolerating queue of a
/// 3-queue group, nothing otherwise.
pub fn queuing_delay(qg: &QueueGroupConfig) -> u64 {
    if qg.has_tolerating_queue() {
        qg.cycle_us
    } else {
        0
    }
}

/// Worst-case end-to-end delay for a flow injected `offset` cycles late that
/// crosses `switches` switches.
pub fn wcd(offset: u64, switches: usize, qg: &QueueGroupConfig) -> u64 {
    let s = switches as u64;
    (offset + s + 1) * qg.cycle_us + s * queuing_delay(qg)
}

pub fn check_deadline(flow: &TTFlow, route: &Route, qg: &QueueGroupConfig, offset: u64) -> bool {
    wcd(offset, route.switch_count(), qg) <= flow.deadline
}

/// Smallest admissible cycle: time to serialize the largest frame plus the
/// overhead `xi_us`, rounded up to whole microseconds.
pub fn t_min(flows: &FlowSet, bw_bps: u64, xi_us: f64) -> u64 {
    let max_bits = flows.flows().iter().map(TTFlow::bits).max().unwrap_or(0);
    let tx_us = (max_bits as f64) * 1e6 / bw_bps as f64;
    // absorb float noise so exact values are not pushed to the next microsecond
    (tx_us + xi_us - 1e-9).ceil().max(0.0) as u64
}

/// Largest admissible cycle: GCD of all periods.
pub fn t_max(flows: &FlowSet) -> u64 {
    flows.flows().iter().map(|f| f.period).fold(0, gcd)
}

/// All cycles in `[t_min, t_max]` dividing every period (and hence the hyperperiod).
pub fn candidate_cycles(flows: &FlowSet, bw_bps: u64, xi_us: f64) -> Vec<u64> {
    let lo = t_min(flows, bw_bps, xi_us).max(1);
    let hi = t_max(flows);
    let h = flows.hyperperiod();
    if lo > hi {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= hi {
        if hi.is_multiple_of(d) {
            out.push(d);
            if d * d != hi {
                out.push(hi / d);
            }
        }
        d += 1;
    }
    out.retain(|&t| {
        t >= lo && h.is_multiple_of(t) && flows.flows().iter().all(|f| f.period % t == 0)
    });
    out.sort_unstable();
    out
}

/// Strictly increasing triple where each cycle divides the next.
pub fn validate_combination(cycles: [u64; 3]) -> bool {
    cycles[0] > 0 && check_cycle_chain(&cycles).is_ok()
}

/// Bits a group may send on one link during one of its cycles, floored.
pub fn bits_per_cycle(qg: &QueueGroupConfig, bw_bps: u64) -> u64 {
    let bits = qg.share * bw_bps as f64 * qg.cycle_us as f64 / 1e6;
    (bits + 1e-6).floor().max(0.0) as u64
}

/// Exclusive upper bound on the injection offset of `flow` in group `qg`.
pub fn ti_bound(flow: &TTFlow, qg: &QueueGroupConfig) -> u64 {
    flow.period / qg.cycle_us
}

/// Average-rate load of one queue group on one link.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateCheck {
    pub link: usize,
    pub group: usize,
    pub rate_bps: f64,
    pub limit_bps: f64,
}

impl RateCheck {
    pub fn pass(&self) -> bool {
        self.rate_bps <= self.limit_bps
    }
}

/// Sums the average rate of every (link, group) pair for the given
/// `(flow, route, group index)` placements. Returns one entry per pair.
pub fn avg_rate_check<'a>(
    placements: impl IntoIterator<Item = (&'a TTFlow, &'a Route, usize)>,
    net: &Network,
    config: &McqfConfig,
) -> Vec<RateCheck> {
    let groups = config.groups.len();
    let mut rates = vec![0.0f64; net.links().len() * groups];
    for (flow, route, g) in placements {
        let r = flow.bits() as f64 * 1e6 / flow.period as f64;
        for &l in route.links() {
            rates[l * groups + g] += r;
        }
    }
    rates
        .into_iter()
        .enumerate()
        .map(|(i, rate_bps)| {
            let (link, group) = (i / groups, i % groups);
            RateCheck {
                link,
                group,
                rate_bps,
                limit_bps: config.groups[group].share * net.links()[link].bw_bps as f64,
            }
        })
        .collect()
}
