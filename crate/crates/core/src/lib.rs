//! Configuration engine for Multi-CQF (multiple cyclic queuing and forwarding
//! instances per egress port) in time-sensitive networks.
//!
//! The pipeline: build or load a [`net::Network`] and a [`traffic::FlowSet`],
//! pick cycles ([`cycles`]), split the flows across queue groups ([`mapping`]),
//! then search routes and injection offsets with one of the optimizers in
//! [`opt`]. Schedulability is decided by [`mcqf::CapacityLedger`].

pub mod cycles;
pub mod error;
pub mod mapping;
pub mod mcqf;
pub mod net;
pub mod opt;
pub mod traffic;
