use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, ProblemError};
use crate::mapping::QgAssignment;
use crate::mcqf::{ti_bound, wcd, CapacityLedger, McqfConfig};
use crate::net::{k_shortest_paths, Network, NodeId, Route};
use crate::traffic::{FlowSet, TTFlow};

/// One flow in scheduling order with everything the encoding can choose from.
#[derive(Clone, Debug)]
pub struct FlowSlot {
    pub flow: TTFlow,
    pub group: usize,
    pub routes: Vec<Route>,
    /// Exclusive bound on the injection offset.
    pub ti_bound: u64,
}

/// Immutable scheduling context shared by every candidate solution.
#[derive(Clone, Debug)]
pub struct Problem {
    net: Network,
    flows: FlowSet,
    config: McqfConfig,
    assignment: QgAssignment,
    slots: Vec<FlowSlot>,
}

/// Penalty weights on deadline and capacity violations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    pub alpha: f64,
    pub beta: f64,
}

impl Default for Weights {
    fn default() -> Self {
        Weights {
            alpha: 2.0,
            beta: 2.0,
        }
    }
}

/// Per-flow block of the state vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Gene {
    pub route: usize,
    pub switches: usize,
    pub offset: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Individual {
    genes: Vec<Gene>,
    score: Option<FitnessBreakdown>,
}

impl Individual {
    pub fn genes(&self) -> &[Gene] {
        &self.genes
    }

    pub fn score(&self) -> Option<&FitnessBreakdown> {
        self.score.as_ref()
    }

    /// Cached fitness; `f64::INFINITY` if never evaluated.
    pub fn fitness(&self) -> f64 {
        self.score.as_ref().map_or(f64::INFINITY, |s| s.total)
    }

    pub(crate) fn genes_mut(&mut self) -> &mut [Gene] {
        &mut self.genes
    }

    pub(crate) fn invalidate(&mut self) {
        self.score = None;
    }

    /// Same choices, ignoring cached scores.
    pub fn same_genes(&self, other: &Individual) -> bool {
        self.genes == other.genes
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FitnessBreakdown {
    pub delay_term: f64,
    pub c1_violations: usize,
    pub c11_violations: usize,
    pub total: f64,
    pub scheduled: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowStatus {
    Scheduled,
    DeadlineMiss,
    RateExceeded,
    NoCapacity,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlowOutcome {
    pub id: u32,
    /// Zero-based queue group.
    pub group: usize,
    pub route: Vec<NodeId>,
    pub offset: u64,
    pub wcd_us: u64,
    pub status: FlowStatus,
}

impl FlowOutcome {
    pub fn scheduled(&self) -> bool {
        self.status == FlowStatus::Scheduled
    }
}

/// Full replay of one solution.
#[derive(Clone, Debug)]
pub struct SolutionReport {
    pub breakdown: FitnessBreakdown,
    /// In scheduling order.
    pub flows: Vec<FlowOutcome>,
    pub ledger: CapacityLedger,
}

impl SolutionReport {
    pub fn scheduled(&self) -> usize {
        self.breakdown.scheduled
    }
}

impl Problem {
    /// Builds the context with up to `k` shortest routes per flow.
    pub fn new(
        net: Network,
        flows: FlowSet,
        config: McqfConfig,
        assignment: QgAssignment,
        k: usize,
    ) -> Result<Self, ProblemError> {
        config.validate()?;
        if assignment.groups.len() != config.groups.len() {
            return Err(ProblemError::GroupMismatch {
                groups: assignment.groups.len(),
                configured: config.groups.len(),
            });
        }
        for f in flows.flows() {
            if assignment.group_of(f.id).is_none() {
                return Err(ProblemError::Unassigned(f.id));
            }
        }
        flows.check_endpoints(&net)?;
        let mut slots = Vec::with_capacity(flows.len());
        for (group, id) in assignment.order() {
            let flow = *flows
                .flows()
                .iter()
                .find(|f| f.id == id)
                .ok_or(ProblemError::Unassigned(id))?;
            let qg = &config.groups[group];
            if flow.period % qg.cycle_us != 0 {
                return Err(ConfigError::CycleNotDividingPeriod {
                    cycle: qg.cycle_us,
                    period: flow.period,
                    flow: id,
                }
                .into());
            }
            let routes = k_shortest_paths(&net, flow.src, flow.dst, k.max(1))?;
            slots.push(FlowSlot {
                flow,
                group,
                routes,
                ti_bound: ti_bound(&flow, qg),
            });
        }
        Ok(Problem {
            net,
            flows,
            config,
            assignment,
            slots,
        })
    }

    pub fn net(&self) -> &Network {
        &self.net
    }

    pub fn flows(&self) -> &FlowSet {
        &self.flows
    }

    pub fn config(&self) -> &McqfConfig {
        &self.config
    }

    pub fn assignment(&self) -> &QgAssignment {
        &self.assignment
    }

    /// Flows in scheduling order; gene `i` belongs to `slots()[i]`.
    pub fn slots(&self) -> &[FlowSlot] {
        &self.slots
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Gene for flow `pos` using route `route` and injection offset `offset`.
    pub fn gene(&self, pos: usize, route: usize, offset: u64) -> Gene {
        Gene {
            route,
            switches: self.slots[pos].routes[route].switch_count(),
            offset,
        }
    }

    /// Builds an individual from explicit (route, offset) choices.
    pub fn individual(&self, choices: &[(usize, u64)]) -> Individual {
        assert_eq!(choices.len(), self.slots.len());
        let genes = choices
            .iter()
            .enumerate()
            .map(|(i, &(r, o))| self.gene(i, r, o))
            .collect();
        Individual { genes, score: None }
    }

    /// Shortest route and zero offset for every flow.
    pub fn baseline_individual(&self) -> Individual {
        self.individual(&vec![(0, 0); self.slots.len()])
    }

    /// Uniform over routes, and over offsets when `ti` is set.
    pub fn random_individual(&self, ti: bool, rng: &mut impl Rng) -> Individual {
        let genes = self
            .slots
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let route = rng.gen_range(0..s.routes.len());
                let offset = if ti { rng.gen_range(0..s.ti_bound) } else { 0 };
                self.gene(i, route, offset)
            })
            .collect();
        Individual { genes, score: None }
    }

    /// Encoding invariants: route indices in range, switch counts consistent,
    /// offsets inside the injection bound (zero without TI).
    pub fn is_valid(&self, ind: &Individual, ti: bool) -> bool {
        ind.genes.len() == self.slots.len()
            && ind.genes.iter().zip(&self.slots).all(|(g, s)| {
                g.route < s.routes.len()
                    && g.switches == s.routes[g.route].switch_count()
                    && if ti {
                        g.offset < s.ti_bound
                    } else {
                        g.offset == 0
                    }
            })
    }

    /// Evaluates and caches the fitness.
    pub fn score(&self, ind: &mut Individual, w: Weights) -> f64 {
        if ind.score.is_none() {
            ind.score = Some(self.fitness(ind, w));
        }
        ind.fitness()
    }

    pub fn fitness(&self, ind: &Individual, w: Weights) -> FitnessBreakdown {
        self.replay(ind, w, |_, _, _, _| ()).0
    }

    pub fn evaluate(&self, ind: &Individual, w: Weights) -> SolutionReport {
        let mut flows = Vec::with_capacity(self.slots.len());
        let (breakdown, ledger) = self.replay(ind, w, |slot, route, wcd_us, status| {
            flows.push(FlowOutcome {
                id: slot.flow.id,
                group: slot.group,
                route: route.nodes().to_vec(),
                offset: 0,
                wcd_us,
                status,
            });
        });
        for (o, g) in flows.iter_mut().zip(&ind.genes) {
            o.offset = g.offset;
        }
        SolutionReport {
            breakdown,
            flows,
            ledger,
        }
    }

    /// Places flows in scheduling order on a fresh ledger. A flow is scheduled
    /// when its worst-case delay meets the deadline, its average rate fits the
    /// group share on every link, and its frames fit the per-slot budgets.
    fn replay(
        &self,
        ind: &Individual,
        w: Weights,
        mut visit: impl FnMut(&FlowSlot, &Route, u64, FlowStatus),
    ) -> (FitnessBreakdown, CapacityLedger) {
        let groups = self.config.groups.len();
        let mut ledger = CapacityLedger::new(&self.net, &self.config, self.flows.hyperperiod());
        let mut rates = vec![0.0f64; self.net.links().len() * groups];
        let bw = self.net.bandwidth() as f64;
        let (mut ratio_sum, mut c1, mut c11, mut scheduled) = (0.0, 0usize, 0usize, 0usize);

        for (slot, gene) in self.slots.iter().zip(&ind.genes) {
            let qg = &self.config.groups[slot.group];
            let route = &slot.routes[gene.route];
            let delay = wcd(gene.offset, route.switch_count(), qg);
            let rate = slot.flow.bits() as f64 * 1e6 / slot.flow.period as f64;
            let limit = qg.share * bw * (1.0 + 1e-12);
            let status = if delay > slot.flow.deadline {
                FlowStatus::DeadlineMiss
            } else if route
                .links()
                .iter()
                .any(|&l| rates[l * groups + slot.group] + rate > limit)
            {
                FlowStatus::RateExceeded
            } else if !ledger.try_place_flow(&slot.flow, route, slot.group, gene.offset) {
                FlowStatus::NoCapacity
            } else {
                for &l in route.links() {
                    rates[l * groups + slot.group] += rate;
                }
                FlowStatus::Scheduled
            };
            match status {
                FlowStatus::Scheduled => {
                    scheduled += 1;
                    ratio_sum += delay as f64 / slot.flow.deadline as f64;
                }
                FlowStatus::DeadlineMiss => {
                    c1 += 1;
                    ratio_sum += 1.0;
                }
                FlowStatus::RateExceeded | FlowStatus::NoCapacity => {
                    c11 += 1;
                    ratio_sum += 1.0;
                }
            }
            visit(slot, route, delay, status);
        }
        let n = self.slots.len().max(1) as f64;
        let delay_term = ratio_sum / n;
        let total = delay_term + w.alpha * c1 as f64 / n + w.beta * c11 as f64 / n;
        (
            FitnessBreakdown {
                delay_term,
                c1_violations: c1,
                c11_violations: c11,
                total,
                scheduled,
            },
            ledger,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapping::{map_flows, MappingStrategy};
    use crate::net::{Link, Node, NodeKind};

    // ES0 - SW1 - SW2 - ES3 at 100 Mbps
    fn line() -> Network {
        let nodes = vec![
            Node {
                id: 0,
                kind: NodeKind::EndStation,
            },
            Node {
                id: 1,
                kind: NodeKind::Switch,
            },
            Node {
                id: 2,
                kind: NodeKind::Switch,
            },
            Node {
                id: 3,
                kind: NodeKind::EndStation,
            },
        ];
        let bw = 100_000_000;
        Network::new(
            nodes,
            vec![
                Link::new(0, 1, bw),
                Link::new(1, 2, bw),
                Link::new(2, 3, bw),
            ],
        )
        .unwrap()
    }

    fn problem(flows: Vec<TTFlow>, queues: u8) -> Problem {
        let fs = FlowSet::new(flows).unwrap();
        let a = map_flows(&fs, MappingStrategy::Dbm, &[1.0], 0).unwrap();
        let cfg = McqfConfig::single(25, queues, 0.5).unwrap();
        Problem::new(line(), fs, cfg, a, 2).unwrap()
    }

    fn flow(id: u32, deadline: u64) -> TTFlow {
        TTFlow {
            id,
            src: 0,
            dst: 3,
            period: 100,
            deadline,
            size: 100,
        }
    }

    #[test]
    fn single_flow_fitness() {
        // two switches, T = 25: WCD 75 against deadline 100
        let p = problem(vec![flow(0, 100)], 2);
        let fb = p.fitness(&p.baseline_individual(), Weights::default());
        assert_eq!(fb.scheduled, 1);
        assert!((fb.total - 0.75).abs() < 1e-12);
    }

    #[test]
    fn deadline_penalty() {
        let p = problem(vec![flow(0, 60)], 2);
        let fb = p.fitness(&p.baseline_individual(), Weights::default());
        assert_eq!(fb.c1_violations, 1);
        assert_eq!(fb.scheduled, 0);
        assert!((fb.total - (fb.delay_term + 2.0)).abs() < 1e-12);
        assert!((fb.delay_term - 1.0).abs() < 1e-12);
    }

    #[test]
    fn capacity_conflict_counts_once() {
        let p = problem(vec![flow(0, 100), flow(1, 100)], 2);
        let fb = p.fitness(&p.baseline_individual(), Weights::default());
        assert_eq!(fb.scheduled, 1);
        assert_eq!(fb.c11_violations, 1);
        let shifted = p.individual(&[(0, 0), (0, 1)]);
        let report = p.evaluate(&shifted, Weights::default());
        assert_eq!(report.scheduled(), 2);
        assert_eq!(report.flows[1].wcd_us, 100);
        assert!(report.flows.iter().all(FlowOutcome::scheduled));
    }

    #[test]
    fn report_matches_fitness() {
        let p = problem(vec![flow(0, 100), flow(1, 90), flow(2, 99)], 2);
        let ind = p.individual(&[(0, 1), (0, 0), (0, 2)]);
        let r = p.evaluate(&ind, Weights::default());
        assert_eq!(r.breakdown, p.fitness(&ind, Weights::default()));
        for o in &r.flows {
            if o.scheduled() {
                let f = p.flows().flows().iter().find(|f| f.id == o.id).unwrap();
                assert!(o.wcd_us <= f.deadline);
            }
        }
    }

    #[test]
    fn validity() {
        let p = problem(vec![flow(0, 100)], 2);
        assert!(p.is_valid(&p.baseline_individual(), false));
        let ind = p.individual(&[(0, 3)]);
        assert!(p.is_valid(&ind, true));
        assert!(!p.is_valid(&ind, false));
        let mut rng = rand::thread_rng();
        for _ in 0..20 {
            assert!(p.is_valid(&p.random_individual(true, &mut rng), true));
        }
    }
}
