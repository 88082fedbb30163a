use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Link, Network, Node, NodeId, NodeKind};
use crate::error::NetError;

const MAX_ATTEMPTS: usize = 1000;

/// Switch-graph family. Parameters count switches only; end stations are attached afterwards.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TopologyKind {
    /// Erdos-Renyi G(n, p).
    Erg {
        n: usize,
        p: f64,
    },
    /// Random d-regular graph on n switches.
    Rrg {
        n: usize,
        d: usize,
    },
    /// Barabasi-Albert preferential attachment, m edges per new switch.
    Bag {
        n: usize,
        m: usize,
    },
    Ring {
        n: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopologySpec {
    pub kind: TopologyKind,
    pub hosts_per_switch: usize,
    pub link_bw_bps: u64,
}

impl TopologySpec {
    pub fn new(kind: TopologyKind, link_bw_bps: u64) -> Self {
        TopologySpec {
            kind,
            hosts_per_switch: 1,
            link_bw_bps,
        }
    }
}

impl TopologyKind {
    fn validate(&self) -> Result<(), NetError> {
        let bad = |msg: String| Err(NetError::InvalidParams(msg));
        match *self {
            TopologyKind::Erg { n, p } => {
                if n < 2 {
                    return bad(format!("ERG needs n >= 2, got {n}"));
                }
                if !(p > 0.0 && p <= 1.0) {
                    return bad(format!("ERG needs 0 < p <= 1, got {p}"));
                }
            }
            TopologyKind::Rrg { n, d } => {
                if d == 0 || d >= n || (n * d) % 2 != 0 {
                    return bad(format!("RRG needs 0 < d < n and n*d even, got n={n} d={d}"));
                }
                if n > 2 && d == 1 {
                    return bad(format!("RRG with d=1 and n={n} cannot be connected"));
                }
            }
            TopologyKind::Bag { n, m } => {
                if m == 0 || m >= n {
                    return bad(format!("BAG needs 1 <= m < n, got n={n} m={m}"));
                }
            }
            TopologyKind::Ring { n } => {
                if n < 3 {
                    return bad(format!("ring needs n >= 3, got {n}"));
                }
            }
        }
        Ok(())
    }

    pub fn switch_count(&self) -> usize {
        match *self {
            TopologyKind::Erg { n, .. }
            | TopologyKind::Rrg { n, .. }
            | TopologyKind::Bag { n, .. }
            | TopologyKind::Ring { n } => n,
        }
    }
}

/// Generates a connected topology. Switches take ids `0..n`; end stations follow,
/// `hosts_per_switch` of them per switch in switch order.
pub fn generate_topology(spec: &TopologySpec, seed: u64) -> Result<Network, NetError> {
    spec.kind.validate()?;
    if spec.link_bw_bps == 0 {
        return Err(NetError::InvalidParams(
            "link bandwidth must be positive".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.kind.switch_count();
    let mut edges = None;
    for _ in 0..MAX_ATTEMPTS {
        let candidate = match spec.kind {
            TopologyKind::Erg { n, p } => Some(erdos_renyi(n, p, &mut rng)),
            TopologyKind::Rrg { n, d } => random_regular(n, d, &mut rng),
            TopologyKind::Bag { n, m } => Some(barabasi_albert(n, m, &mut rng)),
            TopologyKind::Ring { n } => Some((0..n).map(|i| (i, (i + 1) % n)).collect()),
        };
        if let Some(e) = candidate {
            if connected(n, &e) {
                edges = Some(e);
                break;
            }
        }
    }
    let edges = edges.ok_or(NetError::DisconnectedGraph)?;

    let bw = spec.link_bw_bps;
    let mut nodes: Vec<Node> = (0..n)
        .map(|i| Node {
            id: i as NodeId,
            kind: NodeKind::Switch,
        })
        .collect();
    let mut links: Vec<Link> = edges
        .iter()
        .map(|&(a, b)| Link::new(a as NodeId, b as NodeId, bw))
        .collect();
    let mut next = n as NodeId;
    for sw in 0..n {
        for _ in 0..spec.hosts_per_switch {
            nodes.push(Node {
                id: next,
                kind: NodeKind::EndStation,
            });
            links.push(Link::new(sw as NodeId, next, bw));
            next += 1;
        }
    }
    Network::new(nodes, links)
}

fn erdos_renyi(n: usize, p: f64, rng: &mut impl Rng) -> BTreeSet<(usize, usize)> {
    let mut edges = BTreeSet::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen::<f64>() < p {
                edges.insert((a, b));
            }
        }
    }
    edges
}

/// Incremental pairing of degree stubs; `None` when the attempt dead-ends.
fn random_regular(n: usize, d: usize, rng: &mut impl Rng) -> Option<BTreeSet<(usize, usize)>> {
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    let mut edges = BTreeSet::new();
    while !stubs.is_empty() {
        let suitable = |u: usize, v: usize, edges: &BTreeSet<(usize, usize)>| {
            u != v && !edges.contains(&(u.min(v), u.max(v)))
        };
        let mut placed = false;
        for _ in 0..stubs.len() * 4 {
            let i = rng.gen_range(0..stubs.len());
            let j = rng.gen_range(0..stubs.len());
            if i != j && suitable(stubs[i], stubs[j], &edges) {
                let (u, v) = (stubs[i], stubs[j]);
                edges.insert((u.min(v), u.max(v)));
                let (hi, lo) = (i.max(j), i.min(j));
                stubs.swap_remove(hi);
                stubs.swap_remove(lo);
                placed = true;
                break;
            }
        }
        if !placed {
            return None;
        }
    }
    Some(edges)
}

/// Starts from a star on `m + 1` switches and attaches each new switch to `m`
/// distinct targets drawn proportionally to degree.
fn barabasi_albert(n: usize, m: usize, rng: &mut impl Rng) -> BTreeSet<(usize, usize)> {
    let mut edges = BTreeSet::new();
    let mut repeated = Vec::new();
    for leaf in 1..=m {
        edges.insert((0, leaf));
        repeated.push(0);
        repeated.push(leaf);
    }
    for source in m + 1..n {
        let mut targets = BTreeSet::new();
        while targets.len() < m {
            targets.insert(*repeated.choose(rng).expect("star seeds the pool"));
        }
        for &t in &targets {
            edges.insert((t.min(source), t.max(source)));
            repeated.push(t);
            repeated.push(source);
        }
    }
    edges
}

fn connected(n: usize, edges: &BTreeSet<(usize, usize)>) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut components = n;
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
            components -= 1;
        }
    }
    components <= 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(kind: TopologyKind) -> TopologySpec {
        TopologySpec::new(kind, 100_000_000)
    }

    #[test]
    fn ring_of_four() {
        let net = generate_topology(
            &TopologySpec::new(TopologyKind::Ring { n: 4 }, 1_000_000_000),
            7,
        )
        .unwrap();
        assert_eq!(net.nodes().len(), 8);
        assert_eq!(net.links().len(), 8);
        assert_eq!(net.switches().count(), 4);
        assert!(net.switches().all(|s| net.degree(s) == 3));
    }

    #[test]
    fn erg_ten_switches() {
        let net = generate_topology(&spec(TopologyKind::Erg { n: 10, p: 0.3 }), 1).unwrap();
        assert_eq!(net.switches().count(), 10);
        assert_eq!(net.end_stations().count(), 10);
    }

    #[test]
    fn rrg_exact_degree() {
        for seed in 0..20 {
            let net = generate_topology(&spec(TopologyKind::Rrg { n: 8, d: 4 }), seed).unwrap();
            // one attached host adds one to every switch degree
            assert!(net.switches().all(|s| net.degree(s) == 5), "seed {seed}");
        }
    }

    #[test]
    fn bag_edge_count() {
        let net = generate_topology(&spec(TopologyKind::Bag { n: 10, m: 4 }), 3).unwrap();
        let switch_links = net
            .links()
            .iter()
            .filter(|l| (l.a as usize) < 10 && (l.b as usize) < 10)
            .count();
        assert_eq!(switch_links, 4 + (10 - 5) * 4);
    }

    #[test]
    fn deterministic_per_seed() {
        let s = spec(TopologyKind::Erg { n: 12, p: 0.25 });
        assert_eq!(
            generate_topology(&s, 9).unwrap(),
            generate_topology(&s, 9).unwrap()
        );
    }

    #[test]
    fn rejects_bad_params() {
        for kind in [
            TopologyKind::Erg { n: 1, p: 0.5 },
            TopologyKind::Erg { n: 5, p: 0.0 },
            TopologyKind::Erg { n: 5, p: 1.5 },
            TopologyKind::Rrg { n: 5, d: 3 },
            TopologyKind::Rrg { n: 4, d: 4 },
            TopologyKind::Bag { n: 4, m: 4 },
            TopologyKind::Ring { n: 2 },
        ] {
            assert!(
                matches!(
                    generate_topology(&spec(kind), 0),
                    Err(NetError::InvalidParams(_))
                ),
                "{kind:?}"
            );
        }
    }

    #[test]
    fn sparse_erg_gives_up() {
        let r = generate_topology(&spec(TopologyKind::Erg { n: 60, p: 0.001 }), 0);
        assert_eq!(r.unwrap_err(), NetError::DisconnectedGraph);
    }
}
