use std::collections::BTreeSet;

use mcqf_core::net::{
    generate_topology, k_shortest_paths, Network, NodeId, TopologyKind, TopologySpec,
};
use proptest::prelude::*;

/// Every simple path from `src` to `dst`, by depth-first search.
fn all_simple_paths(net: &Network, src: NodeId, dst: NodeId) -> Vec<Vec<NodeId>> {
    fn walk(
        net: &Network,
        at: NodeId,
        dst: NodeId,
        path: &mut Vec<NodeId>,
        out: &mut Vec<Vec<NodeId>>,
    ) {
        if at == dst {
            out.push(path.clone());
            return;
        }
        for &(next, _) in net.neighbors(at) {
            if !path.contains(&next) {
                path.push(next);
                walk(net, next, dst, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    walk(net, src, dst, &mut vec![src], &mut out);
    out
}

fn check_against_oracle(net: &Network, src: NodeId, dst: NodeId, k: usize) {
    let mut oracle = all_simple_paths(net, src, dst);
    oracle.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    let got = k_shortest_paths(net, src, dst, k).unwrap();

    assert_eq!(got.len(), k.min(oracle.len()), "{src}->{dst}");
    let got_hops: Vec<usize> = got.iter().map(|r| r.hops()).collect();
    let want_hops: Vec<usize> = oracle.iter().take(k).map(|p| p.len() - 1).collect();
    assert_eq!(got_hops, want_hops, "{src}->{dst}");

    let distinct: BTreeSet<&[NodeId]> = got.iter().map(|r| r.nodes()).collect();
    assert_eq!(distinct.len(), got.len());
    for r in &got {
        assert_eq!(r.src(), src);
        assert_eq!(r.dst(), dst);
        assert!(
            oracle.iter().any(|p| p == r.nodes()),
            "not a simple path: {:?}",
            r.nodes()
        );
    }
    // the shortest path is the lexicographically smallest of minimum length
    assert_eq!(got[0].nodes(), oracle[0].as_slice());
}

#[test]
fn erg_ten_matches_exhaustive_enumeration() {
    let net = generate_topology(
        &TopologySpec::new(TopologyKind::Erg { n: 10, p: 0.3 }, 100_000_000),
        1,
    )
    .unwrap();
    let hosts: Vec<NodeId> = net.end_stations().collect();
    for &s in &hosts {
        for &d in &hosts {
            if s != d {
                check_against_oracle(&net, s, d, 4);
            }
        }
    }
}

#[test]
fn ring_has_exactly_two_routes() {
    let net = generate_topology(
        &TopologySpec::new(TopologyKind::Ring { n: 6 }, 100_000_000),
        0,
    )
    .unwrap();
    let hosts: Vec<NodeId> = net.end_stations().collect();
    let routes = k_shortest_paths(&net, hosts[0], hosts[3], 8).unwrap();
    assert_eq!(routes.len(), 2);
    assert_eq!(routes[0].hops() + routes[1].hops(), 6 + 4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn yen_agrees_with_enumeration(n in 4usize..8, p in 0.3f64..0.8, seed in 0u64..1000, k in 1usize..6) {
        let net = generate_topology(&TopologySpec::new(TopologyKind::Erg { n, p }, 1_000_000_000), seed);
        prop_assume!(net.is_ok());
        let net = net.unwrap();
        let hosts: Vec<NodeId> = net.end_stations().collect();
        check_against_oracle(&net, hosts[0], hosts[hosts.len() - 1], k);
        check_against_oracle(&net, hosts[1], hosts[0], k);
    }

    #[test]
    fn routes_are_non_decreasing_in_length(n in 4usize..9, seed in 0u64..1000) {
        let net = generate_topology(&TopologySpec::new(TopologyKind::Bag { n, m: 2 }, 1_000_000_000), seed).unwrap();
        let hosts: Vec<NodeId> = net.end_stations().collect();
        let routes = k_shortest_paths(&net, hosts[0], hosts[n - 1], 5).unwrap();
        for w in routes.windows(2) {
            prop_assert!(w[0].hops() <= w[1].hops());
        }
        for r in &routes {
            prop_assert_eq!(r.switch_count(), r.hops() - 1);
        }
    }
}
