//! Network topology: end stations and switches joined by undirected links.

mod generate;
mod paths;

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::NetError;

pub use generate::{generate_topology, TopologyKind, TopologySpec};
pub use paths::k_shortest_paths;

pub type NodeId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeKind {
    #[serde(rename = "ES")]
    EndStation,
    #[serde(rename = "SW")]
    Switch,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub kind: NodeKind,
}

/// An undirected link. Endpoints are stored with `a < b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Link {
    pub a: NodeId,
    pub b: NodeId,
    pub bw_bps: u64,
}

impl Link {
    pub fn new(a: NodeId, b: NodeId, bw_bps: u64) -> Self {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        Link { a, b, bw_bps }
    }

    pub fn other(&self, n: NodeId) -> NodeId {
        if n == self.a {
            self.b
        } else {
            self.a
        }
    }
}

/// Validated, immutable topology.
#[derive(Clone, Debug)]
pub struct Network {
    nodes: Vec<Node>,
    links: Vec<Link>,
    index: HashMap<NodeId, usize>,
    // per node position: (neighbor id, link index), sorted by neighbor id
    adj: Vec<Vec<(NodeId, usize)>>,
    link_of: HashMap<(NodeId, NodeId), usize>,
}

impl PartialEq for Network {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.links == other.links
    }
}

impl Network {
    pub fn new(nodes: Vec<Node>, links: Vec<Link>) -> Result<Self, NetError> {
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, n) in nodes.iter().enumerate() {
            if index.insert(n.id, i).is_some() {
                return Err(NetError::DuplicateNode(n.id));
            }
        }
        let mut adj = vec![Vec::new(); nodes.len()];
        let mut link_of = HashMap::with_capacity(links.len());
        let links: Vec<Link> = links
            .into_iter()
            .map(|l| Link::new(l.a, l.b, l.bw_bps))
            .collect();
        for (li, l) in links.iter().enumerate() {
            if l.a == l.b {
                return Err(NetError::SelfLoop(l.a));
            }
            if l.bw_bps == 0 {
                return Err(NetError::ZeroBandwidth(l.a, l.b));
            }
            if l.bw_bps != links[0].bw_bps {
                return Err(NetError::NonUniformBandwidth);
            }
            let ia = *index.get(&l.a).ok_or(NetError::NodeNotFound(l.a))?;
            let ib = *index.get(&l.b).ok_or(NetError::NodeNotFound(l.b))?;
            if link_of.insert((l.a, l.b), li).is_some() {
                return Err(NetError::DuplicateLink(l.a, l.b));
            }
            adj[ia].push((l.b, li));
            adj[ib].push((l.a, li));
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        let net = Network {
            nodes,
            links,
            index,
            adj,
            link_of,
        };
        if !net.is_connected() {
            return Err(NetError::DisconnectedGraph);
        }
        Ok(net)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.index.get(&id).map(|&i| &self.nodes[i])
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.index.contains_key(&id)
    }

    /// Link bandwidth shared by every link of the network (0 for a link-less network).
    pub fn bandwidth(&self) -> u64 {
        self.links.first().map_or(0, |l| l.bw_bps)
    }

    pub fn end_stations(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes
            .iter()
            .filter(|n| n.kind == NodeKind::EndStation)
            .map(|n| n.id)
    }

    pub fn switches(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes
            .iter()
            .filter(|n| n.kind == NodeKind::Switch)
            .map(|n| n.id)
    }

    /// Neighbors of `id` in ascending id order, paired with the connecting link index.
    pub fn neighbors(&self, id: NodeId) -> &[(NodeId, usize)] {
        self.index.get(&id).map_or(&[], |&i| &self.adj[i])
    }

    pub fn degree(&self, id: NodeId) -> usize {
        self.neighbors(id).len()
    }

    pub fn link_between(&self, a: NodeId, b: NodeId) -> Option<usize> {
        let key = if a <= b { (a, b) } else { (b, a) };
        self.link_of.get(&key).copied()
    }

    fn is_connected(&self) -> bool {
        let Some(first) = self.nodes.first() else {
            return true;
        };
        let mut seen = vec![false; self.nodes.len()];
        let mut queue = VecDeque::from([first.id]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &(v, _) in self.neighbors(u) {
                let iv = self.index[&v];
                if !seen[iv] {
                    seen[iv] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == self.nodes.len()
    }

    /// Builds a route from an explicit node sequence, checking adjacency and simplicity.
    pub fn route(&self, nodes: Vec<NodeId>) -> Result<Route, NetError> {
        if nodes.len() < 2 {
            return Err(NetError::InvalidRoute(
                "route needs at least two nodes".into(),
            ));
        }
        let mut links = Vec::with_capacity(nodes.len() - 1);
        let mut seen = std::collections::HashSet::with_capacity(nodes.len());
        for &n in &nodes {
            if !self.contains(n) {
                return Err(NetError::NodeNotFound(n));
            }
            if !seen.insert(n) {
                return Err(NetError::InvalidRoute(format!("node {n} repeated")));
            }
        }
        for w in nodes.windows(2) {
            let li = self.link_between(w[0], w[1]).ok_or_else(|| {
                NetError::InvalidRoute(format!("{} and {} are not adjacent", w[0], w[1]))
            })?;
            links.push(li);
        }
        let mut switches_before = Vec::with_capacity(links.len());
        let mut switch_count = 0;
        for (h, &n) in nodes[..nodes.len() - 1].iter().enumerate() {
            if h > 0 && self.node(n).map(|n| n.kind) == Some(NodeKind::Switch) {
                switch_count += 1;
            }
            switches_before.push(switch_count);
        }
        Ok(Route {
            nodes,
            links,
            switch_count,
            switches_before,
        })
    }

    pub fn to_file(&self) -> TopologyFile {
        TopologyFile {
            nodes: self.nodes.clone(),
            links: self.links.clone(),
        }
    }

    pub fn from_file(file: TopologyFile) -> Result<Self, NetError> {
        Network::new(file.nodes, file.links)
    }
}

/// A loop-free path between two nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Route {
    nodes: Vec<NodeId>,
    links: Vec<usize>,
    switch_count: usize,
    switches_before: Vec<usize>,
}

impl Route {
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    /// Link indices traversed, in order from source to destination.
    pub fn links(&self) -> &[usize] {
        &self.links
    }

    pub fn switch_count(&self) -> usize {
        self.switch_count
    }

    /// Number of switches a frame has passed before entering link `hop`.
    pub fn switches_before(&self, hop: usize) -> usize {
        self.switches_before[hop]
    }

    pub fn hops(&self) -> usize {
        self.links.len()
    }

    pub fn src(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn dst(&self) -> NodeId {
        self.nodes[self.nodes.len() - 1]
    }
}

/// On-disk topology schema.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopologyFile {
    pub nodes: Vec<Node>,
    pub links: Vec<Link>,
}
