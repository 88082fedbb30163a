//! Queue-group configuration, analytic constraints and the capacity ledger.

mod config;
mod constraints;
mod ledger;

pub use config::{
    check_cycle_chain, McqfConfig, Overheads, QueueGroupConfig, DEFAULT_QUEUES, DEFAULT_SHARES,
};
pub use constraints::{
    avg_rate_check, bits_per_cycle, candidate_cycles, check_deadline, queuing_delay, t_max, t_min,
    ti_bound, validate_combination, wcd, RateCheck,
};
pub use ledger::{CapacityLedger, SlotRef};
