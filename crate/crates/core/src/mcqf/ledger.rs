//! Per-slot bit accounting over one hyperperiod.
//!
//! Every (link, queue group) pair owns one counter per cycle slot of that group
//! in the hyperperiod. A frame injected `offset` cycles into its period is sent on
//! hop `h` in slot `k * period / T + offset + h`, shifted by one more slot per
//! switch already crossed when the group has a tolerating queue. Slots wrap at
//! the hyperperiod since the whole schedule repeats.

use crate::net::{Network, Route};
use crate::traffic::TTFlow;

use super::config::McqfConfig;
use super::constraints::bits_per_cycle;

#[derive(Clone, Debug, PartialEq, Eq)]
struct GroupSlots {
    cycle: u64,
    tolerating: bool,
    capacity: u64,
    slots: usize,
}

/// One touched counter: link, queue group, slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SlotRef {
    pub link: usize,
    pub group: usize,
    pub slot: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CapacityLedger {
    groups: Vec<GroupSlots>,
    hyperperiod: u64,
    // indexed by link * groups + group
    counters: Vec<Vec<u64>>,
}

impl CapacityLedger {
    /// Empty ledger. Each group cycle must divide `hyperperiod`.
    pub fn new(net: &Network, config: &McqfConfig, hyperperiod: u64) -> Self {
        let bw = net.bandwidth();
        let groups: Vec<GroupSlots> = config
            .groups
            .iter()
            .map(|g| {
                assert!(
                    hyperperiod.is_multiple_of(g.cycle_us),
                    "cycle {} does not divide hyperperiod {hyperperiod}",
                    g.cycle_us
                );
                GroupSlots {
                    cycle: g.cycle_us,
                    tolerating: g.has_tolerating_queue(),
                    capacity: bits_per_cycle(g, bw),
                    slots: (hyperperiod / g.cycle_us) as usize,
                }
            })
            .collect();
        let counters = (0..net.links().len())
            .flat_map(|_| groups.iter().map(|g| vec![0; g.slots]))
            .collect();
        CapacityLedger {
            groups,
            hyperperiod,
            counters,
        }
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    pub fn link_count(&self) -> usize {
        self.counters.len() / self.groups.len().max(1)
    }

    /// Bit budget of one slot of `group`.
    pub fn capacity(&self, group: usize) -> u64 {
        self.groups[group].capacity
    }

    pub fn slot_count(&self, group: usize) -> usize {
        self.groups[group].slots
    }

    pub fn counters(&self, link: usize, group: usize) -> &[u64] {
        &self.counters[link * self.groups.len() + group]
    }

    pub fn counter(&self, at: SlotRef) -> u64 {
        self.counters(at.link, at.group)[at.slot]
    }

    /// Slots a flow occupies, one per (frame, hop), in frame-major order.
    /// `None` if the group cycle does not divide the period.
    pub fn frame_slots(
        &self,
        flow: &TTFlow,
        route: &Route,
        group: usize,
        offset: u64,
    ) -> Option<Vec<SlotRef>> {
        let g = &self.groups[group];
        if !flow.period.is_multiple_of(g.cycle) || !self.hyperperiod.is_multiple_of(flow.period) {
            return None;
        }
        let per_period = flow.period / g.cycle;
        let frames = self.hyperperiod / flow.period;
        let slots = g.slots as u64;
        let mut out = Vec::with_capacity((frames as usize) * route.hops());
        for k in 0..frames {
            for (h, &link) in route.links().iter().enumerate() {
                let wait = if g.tolerating {
                    route.switches_before(h) as u64
                } else {
                    0
                };
                let slot = (k * per_period + offset + h as u64 + wait) % slots;
                out.push(SlotRef {
                    link,
                    group,
                    slot: slot as usize,
                });
            }
        }
        Some(out)
    }

    /// Adds the flow's frames if every touched counter stays within budget.
    /// On `false` nothing is modified.
    pub fn try_place_flow(
        &mut self,
        flow: &TTFlow,
        route: &Route,
        group: usize,
        offset: u64,
    ) -> bool {
        let Some(mut touched) = self.frame_slots(flow, route, group, offset) else {
            return false;
        };
        let bits = flow.bits();
        let cap = self.groups[group].capacity;
        touched.sort_unstable();
        let mut i = 0;
        while i < touched.len() {
            let mut j = i;
            while j < touched.len() && touched[j] == touched[i] {
                j += 1;
            }
            let need = bits * (j - i) as u64;
            if self.counter(touched[i]) + need > cap {
                return false;
            }
            i = j;
        }
        let groups = self.groups.len();
        for t in touched {
            self.counters[t.link * groups + t.group][t.slot] += bits;
        }
        true
    }
}
