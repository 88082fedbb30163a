//! Frame-by-frame timeline replay checked against the slot ledger.

use mcqf_core::mcqf::{wcd, CapacityLedger, McqfConfig, Overheads, QueueGroupConfig};
use mcqf_core::net::{
    generate_topology, k_shortest_paths, Network, NodeId, Route, TopologyKind, TopologySpec,
};
use mcqf_core::traffic::{FlowSet, TTFlow};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Instance {
    net: Network,
    config: McqfConfig,
    flows: FlowSet,
    // (route, group, offset) per flow
    plan: Vec<(Route, usize, u64)>,
}

fn instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spec = TopologySpec::new(TopologyKind::Ring { n: 3 }, 1_000_000_000);
    spec.hosts_per_switch = 2;
    let net = generate_topology(&spec, seed).unwrap();

    let groups: Vec<QueueGroupConfig> = if rng.gen_bool(0.5) {
        vec![QueueGroupConfig::new(
            *[10, 20, 40].choose(&mut rng).unwrap(),
            rng.gen_range(2..=3),
            rng.gen_range(0.2..0.9),
        )]
    } else {
        [10, 20, 40]
            .iter()
            .map(|&c| QueueGroupConfig::new(c, rng.gen_range(2..=3), rng.gen_range(0.1..0.33)))
            .collect()
    };
    let config = McqfConfig::new(groups, Overheads::default()).unwrap();

    let hosts: Vec<NodeId> = net.end_stations().collect();
    let n_flows = rng.gen_range(1..=3);
    let mut flows = Vec::new();
    let mut plan = Vec::new();
    while flows.len() < n_flows {
        let src = *hosts.choose(&mut rng).unwrap();
        let dst = *hosts.choose(&mut rng).unwrap();
        if src == dst {
            continue;
        }
        let routes: Vec<Route> = k_shortest_paths(&net, src, dst, 3)
            .unwrap()
            .into_iter()
            .filter(|r| r.hops() <= 3)
            .collect();
        let route = routes.choose(&mut rng).unwrap().clone();
        let group = rng.gen_range(0..config.groups.len());
        let period = *[40u64, 80, 120].choose(&mut rng).unwrap();
        let cycle = config.groups[group].cycle_us;
        let offset = rng.gen_range(0..period / cycle);
        let id = flows.len() as u32;
        flows.push(TTFlow {
            id,
            src,
            dst,
            period,
            deadline: period,
            size: rng.gen_range(20..300),
        });
        plan.push((route, group, offset));
    }
    Instance {
        net,
        config,
        flows: FlowSet::new(flows).unwrap(),
        plan,
    }
}

/// One frame walking its route cycle by cycle. Returns the link and group cycle
/// index of every transmission, and the arrival time at the destination.
fn walk_frame(
    route: &Route,
    qg: &QueueGroupConfig,
    release: u64,
    offset: u64,
    net: &Network,
) -> (Vec<(usize, u64)>, u64) {
    let t = qg.cycle_us;
    assert_eq!(release % t, 0);
    let mut cycle = release / t + offset;
    let mut sent = Vec::new();
    let nodes = route.nodes();
    for w in nodes.windows(2) {
        let link = net.link_between(w[0], w[1]).unwrap();
        sent.push((link, cycle));
        // received by the end of this cycle
        let at_switch = net.node(w[1]).unwrap().kind == mcqf_core::net::NodeKind::Switch;
        if at_switch {
            // next cycle on a plain CQF port, one more in the tolerating queue
            cycle += if qg.queues == 3 { 2 } else { 1 };
        } else {
            cycle += 1;
        }
    }
    (sent, cycle * t)
}

#[test]
fn timeline_agrees_with_ledger() {
    let mut violations = 0;
    let mut placed_total = 0;
    let mut rejected = 0;
    for seed in 0..100 {
        let inst = instance(seed);
        let h = inst.flows.hyperperiod();
        let mut ledger = CapacityLedger::new(&inst.net, &inst.config, h);
        let mut expected: Vec<Vec<Vec<u64>>> = (0..inst.net.links().len())
            .map(|_| {
                (0..inst.config.groups.len())
                    .map(|g| vec![0; (h / inst.config.groups[g].cycle_us) as usize])
                    .collect()
            })
            .collect();

        let mut placed = Vec::new();
        for (flow, (route, group, offset)) in inst.flows.flows().iter().zip(&inst.plan) {
            let before = ledger.clone();
            if !ledger.try_place_flow(flow, route, *group, *offset) {
                assert_eq!(
                    ledger, before,
                    "failed placement changed the ledger (seed {seed})"
                );
                rejected += 1;
                continue;
            }
            placed_total += 1;
            placed.push((*flow, route.clone()));
            let qg = &inst.config.groups[*group];
            let bound = wcd(*offset, route.switch_count(), qg);
            for k in 0..h / flow.period {
                let release = k * flow.period;
                let (sent, arrival) = walk_frame(route, qg, release, *offset, &inst.net);
                if arrival - release > bound {
                    violations += 1;
                }
                let slots = h / qg.cycle_us;
                for (link, cycle) in sent {
                    expected[link][*group][(cycle % slots) as usize] += flow.bits();
                }
            }
        }

        let mut conserved = 0;
        for (link, per_group) in expected.iter().enumerate() {
            for (g, slots) in per_group.iter().enumerate() {
                assert_eq!(
                    ledger.counters(link, g),
                    slots.as_slice(),
                    "seed {seed} link {link} group {g}"
                );
                for &bits in slots {
                    assert!(bits <= ledger.capacity(g));
                    conserved += bits;
                }
            }
        }
        let counted: u64 = placed
            .iter()
            .map(|(f, r)| f.bits() * (h / f.period) * r.hops() as u64)
            .sum();
        assert_eq!(counted, conserved);
    }
    assert_eq!(violations, 0);
    assert!(rejected > 0);
    assert!(
        placed_total > 100,
        "oracle exercised only {placed_total} placements"
    );
}

#[test]
fn wcd_is_tight_on_the_timeline() {
    let inst = instance(3);
    for (route, group, offset) in &inst.plan {
        let qg = &inst.config.groups[*group];
        let (_, arrival) = walk_frame(route, qg, 0, *offset, &inst.net);
        assert_eq!(arrival, wcd(*offset, route.switch_count(), qg));
    }
}
