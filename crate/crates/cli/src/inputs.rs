use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use mcqf_core::mapping::DEFAULT_SPLITS;
use mcqf_core::mcqf::{McqfConfig, Overheads, QueueGroupConfig, DEFAULT_QUEUES, DEFAULT_SHARES};
use mcqf_core::net::{generate_topology, Network, TopologyFile};
use mcqf_core::traffic::{generate_testcase, FlowSet, FlowsFile};
use serde::Serialize;

use crate::args::{parse_list, GroupArgs, InputArgs};
use crate::Infeasible;

pub struct Inputs {
    pub net: Network,
    pub flows: FlowSet,
    pub topology_label: String,
    pub kind_label: String,
}

pub fn load(args: &InputArgs) -> Result<Inputs> {
    let (net, topology_label) = match &args.topology_file {
        Some(path) => {
            let file: TopologyFile = read_json(path)?;
            (
                Network::from_file(file)
                    .with_context(|| format!("invalid topology {}", path.display()))?,
                path.display().to_string(),
            )
        }
        None => {
            let seed = args.topo_seed.unwrap_or(args.seed);
            (
                generate_topology(&args.topo.spec(), seed)?,
                args.topo.label(),
            )
        }
    };
    let (flows, kind_label) = match &args.flows_file {
        Some(path) => {
            let file: FlowsFile = read_json(path)?;
            let flows = FlowSet::from_file(file)
                .with_context(|| format!("invalid flows {}", path.display()))?;
            (flows, path.display().to_string())
        }
        None => {
            let seed = args.flow_seed.unwrap_or(args.seed);
            (
                generate_testcase(args.traffic.kind, &net, args.traffic.flows, seed)?,
                args.traffic.kind.to_string(),
            )
        }
    };
    flows.check_endpoints(&net)?;
    Ok(Inputs {
        net,
        flows,
        topology_label,
        kind_label,
    })
}

/// Resolved per-group settings for a given number of groups.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupSettings {
    pub queues: Vec<u8>,
    pub shares: Vec<f64>,
    pub splits: Vec<f64>,
}

/// Defaults: the three-group layout, or 0.9 share for plain CQF/CSQF, or a
/// 0.5/0.4 share and 0.6/0.4 split for two groups.
pub fn group_settings(args: &GroupArgs, groups: usize) -> Result<GroupSettings> {
    let (queues, shares, splits): (Vec<u8>, Vec<f64>, Vec<f64>) = match groups {
        1 => (vec![2], vec![0.9], vec![1.0]),
        2 => (vec![3, 2], vec![0.5, 0.4], vec![0.6, 0.4]),
        3 => (
            DEFAULT_QUEUES.to_vec(),
            DEFAULT_SHARES.to_vec(),
            DEFAULT_SPLITS.to_vec(),
        ),
        n => bail!(Infeasible(format!("expected 1 to 3 cycles, got {n}"))),
    };
    let pick = |given: &Option<String>, default: Vec<f64>, what: &str| -> Result<Vec<f64>> {
        match given {
            None => Ok(default),
            Some(s) => {
                let v: Vec<f64> = parse_list(s, what)?;
                if v.len() != groups {
                    bail!(Infeasible(format!(
                        "--{what} needs {groups} values, got {}",
                        v.len()
                    )));
                }
                Ok(v)
            }
        }
    };
    let queues = match &args.queues {
        None => queues,
        Some(s) => {
            let v: Vec<u8> = parse_list(s, "queues")?;
            if v.len() != groups {
                bail!(Infeasible(format!(
                    "--queues needs {groups} values, got {}",
                    v.len()
                )));
            }
            v
        }
    };
    Ok(GroupSettings {
        queues,
        shares: pick(&args.shares, shares, "shares")?,
        splits: pick(&args.splits, splits, "splits")?,
    })
}

pub fn build_config(cycles: &[u64], settings: &GroupSettings) -> Result<McqfConfig> {
    let groups = cycles
        .iter()
        .zip(&settings.queues)
        .zip(&settings.shares)
        .map(|((&c, &q), &s)| QueueGroupConfig::new(c, q, s))
        .collect();
    Ok(McqfConfig::new(groups, Overheads::default())?)
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
