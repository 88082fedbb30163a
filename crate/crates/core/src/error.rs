use thiserror::Error;

use crate::net::NodeId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetError {
    #[error("invalid topology parameters: {0}")]
    InvalidParams(String),
    #[error("graph is disconnected")]
    DisconnectedGraph,
    #[error("node {0} not found")]
    NodeNotFound(NodeId),
    #[error("duplicate node id {0}")]
    DuplicateNode(NodeId),
    #[error("duplicate link between {0} and {1}")]
    DuplicateLink(NodeId, NodeId),
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("link {0}-{1} has zero bandwidth")]
    ZeroBandwidth(NodeId, NodeId),
    #[error("all links must share one bandwidth")]
    NonUniformBandwidth,
    #[error("no path between {0} and {1}")]
    NoPath(NodeId, NodeId),
    #[error("invalid route: {0}")]
    InvalidRoute(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrafficError {
    #[error("need at least two end stations, found {0}")]
    InsufficientEndStations(usize),
    #[error("invalid flow {id}: {reason}")]
    InvalidFlow { id: u32, reason: String },
    #[error("duplicate flow id {0}")]
    DuplicateFlow(u32),
    #[error("flow set is empty")]
    Empty,
    #[error("hyperperiod {hyperperiod} is not a multiple of period {period}")]
    NonDivisible { period: u64, hyperperiod: u64 },
    #[error("hyperperiod overflows u64")]
    Overflow,
}

/// Violation of a named configuration constraint (C1..C12).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("C7 violated: cycle {cycle} us does not divide period {period} us of flow {flow}")]
    CycleNotDividingPeriod { cycle: u64, period: u64, flow: u32 },
    #[error("C8 violated: cycle {cycle} us is outside [{t_min}, {t_max}] us")]
    CycleOutOfRange { cycle: u64, t_min: u64, t_max: u64 },
    #[error("C9 violated: cycles must be strictly increasing, got {0:?}")]
    CycleOrder(Vec<u64>),
    #[error(
        "C10 violated: each cycle must be an integral multiple of the previous one, got {0:?}"
    )]
    CycleMultiple(Vec<u64>),
    #[error("queue group {0}: queue count must be 2 or 3")]
    QueueCount(usize),
    #[error("queue group {0}: cycle must be positive")]
    ZeroCycle(usize),
    #[error("queue group {0}: bandwidth share must be in (0, 1]")]
    Share(usize),
    #[error("bandwidth shares sum to {0}, above 1")]
    ShareSum(String),
    #[error("expected 1 to 3 queue groups, got {0}")]
    GroupCount(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MappingError {
    #[error("invalid splits {0:?}: must be positive and sum to 1")]
    InvalidSplits(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CycleSearchError {
    #[error("no feasible cycle combination ({0} candidate cycles)")]
    NoFeasibleCombination(usize),
    #[error(transparent)]
    Problem(#[from] ProblemError),
}

/// Failure to assemble a scheduling problem from its inputs.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProblemError {
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Traffic(#[from] TrafficError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Mapping(#[from] MappingError),
    #[error("assignment has {groups} groups but configuration has {configured}")]
    GroupMismatch { groups: usize, configured: usize },
    #[error("flow {0} is not assigned to any queue group")]
    Unassigned(u32),
    #[error("flow {0} endpoint is not an end station")]
    NotEndStation(u32),
}
