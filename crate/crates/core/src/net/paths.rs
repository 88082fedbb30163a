use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use super::{Network, NodeId, Route};
use crate::error::NetError;

/// Yen's algorithm over hop count. Paths come out ordered by hop count, ties by
/// node-id sequence, so the result is fully deterministic.
pub fn k_shortest_paths(
    net: &Network,
    src: NodeId,
    dst: NodeId,
    k: usize,
) -> Result<Vec<Route>, NetError> {
    for n in [src, dst] {
        if !net.contains(n) {
            return Err(NetError::NodeNotFound(n));
        }
    }
    if src == dst {
        return Err(NetError::InvalidRoute("source equals destination".into()));
    }
    if k == 0 {
        return Ok(Vec::new());
    }
    let first = shortest_path(net, src, dst, &HashSet::new(), &HashSet::new())
        .ok_or(NetError::NoPath(src, dst))?;

    let mut accepted: Vec<Vec<NodeId>> = vec![first];
    // ordered by (hops, node sequence)
    let mut candidates: BTreeSet<(usize, Vec<NodeId>)> = BTreeSet::new();
    while accepted.len() < k {
        let last = accepted.last().expect("non-empty").clone();
        for i in 0..last.len() - 1 {
            let spur = last[i];
            let root = &last[..=i];
            let mut banned_edges = HashSet::new();
            for p in &accepted {
                if p.len() > i + 1 && &p[..=i] == root {
                    banned_edges.insert(edge(p[i], p[i + 1]));
                }
            }
            let banned_nodes: HashSet<NodeId> = root[..i].iter().copied().collect();
            if let Some(tail) = shortest_path(net, spur, dst, &banned_nodes, &banned_edges) {
                let mut path = root[..i].to_vec();
                path.extend(tail);
                if !accepted.contains(&path) {
                    candidates.insert((path.len() - 1, path));
                }
            }
        }
        match candidates.pop_first() {
            Some((_, p)) => accepted.push(p),
            None => break,
        }
    }
    accepted.into_iter().map(|p| net.route(p)).collect()
}

fn edge(a: NodeId, b: NodeId) -> (NodeId, NodeId) {
    (a.min(b), a.max(b))
}

/// Lexicographically smallest among the minimum-hop paths, avoiding the banned
/// nodes and edges.
fn shortest_path(
    net: &Network,
    src: NodeId,
    dst: NodeId,
    banned_nodes: &HashSet<NodeId>,
    banned_edges: &HashSet<(NodeId, NodeId)>,
) -> Option<Vec<NodeId>> {
    if banned_nodes.contains(&src) || banned_nodes.contains(&dst) {
        return None;
    }
    // hop distance to dst
    let mut dist: HashMap<NodeId, usize> = HashMap::from([(dst, 0)]);
    let mut queue = VecDeque::from([dst]);
    while let Some(u) = queue.pop_front() {
        let du = dist[&u];
        for &(v, _) in net.neighbors(u) {
            if banned_nodes.contains(&v)
                || banned_edges.contains(&edge(u, v))
                || dist.contains_key(&v)
            {
                continue;
            }
            dist.insert(v, du + 1);
            queue.push_back(v);
        }
    }
    let mut d = *dist.get(&src)?;
    let mut path = vec![src];
    let mut u = src;
    while u != dst {
        // neighbors are sorted by id, so the first match is the smallest
        let next = net
            .neighbors(u)
            .iter()
            .map(|&(v, _)| v)
            .find(|v| !banned_edges.contains(&edge(u, *v)) && dist.get(v) == Some(&(d - 1)))?;
        path.push(next);
        u = next;
        d -= 1;
    }
    Some(path)
}
