//! Exact placement search.
//!
//! With a placement fixed, every object is best served by a single VM of its
//! type: the one minimising `demand * (up(o, c) + f * down(c))`, where `up` and
//! `down` are cheapest per-bit paths to the cloudlet and from it to the OLT.
//! Processing cost depends only on which VMs exist. The search therefore
//! enumerates, for each VM type and network, the subsets of in-network
//! candidates (with or without a shared VM at the OLT) and combines them by
//! depth-first branch and bound. The capacity rows are the only coupling
//! between types.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::power::{link_costs, total_objective, ModelParams, PowerReport};
use crate::routing::{from_source, to_sink, Metric, PathTree};
use crate::scalar::Scalar;
use crate::solution::{Assignment, FlowAssignment, PlacementSolution};
use crate::topology::{LinkId, NetworkInstance, NodeId};

/// Resource limits for [`solve_exact`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    /// Most non-OLT candidates a network may have; subsets of these are enumerated.
    pub max_candidates_per_network: usize,
    /// Most branch-and-bound nodes visited before giving up.
    pub max_nodes: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        Self { max_candidates_per_network: 16, max_nodes: 20_000_000 }
    }
}

#[derive(Clone, Debug)]
pub struct ExactOutcome<T> {
    pub solution: PlacementSolution<T>,
    pub flows: FlowAssignment<T>,
    pub report: PowerReport<T>,
    /// Branch-and-bound nodes visited.
    pub nodes_visited: u64,
}

/// A feasible choice of in-network VMs for one (type, network, OLT flag).
#[derive(Clone, Debug)]
struct Entry<T> {
    /// Bit `i` set: the network's `i`-th candidate hosts the type.
    mask: u64,
    cost: T,
    uses_olt: bool,
}

struct Prepared<T> {
    vm_types: usize,
    olt_slot: usize,
    /// Non-OLT candidates of each network, ascending.
    members: Vec<Vec<NodeId>>,
    /// `lists[v][n][flag]`, sorted by cost.
    lists: Vec<Vec<[Vec<Entry<T>>; 2]>>,
    olt_cost: Vec<T>,
    olt_allowed: Vec<bool>,
    workload: Vec<Vec<T>>,
}

/// Cheapest per-bit cost of sending from each object to each node and from
/// each candidate to the OLT.
pub(crate) struct Routes<T> {
    pub up: Vec<PathTree<T>>,
    pub down: PathTree<T>,
}

impl<T: Scalar> Routes<T> {
    pub fn new(instance: &NetworkInstance<T>, params: &ModelParams<T>) -> Result<Self> {
        let costs = link_costs(instance, params)?;
        let up = instance
            .objects()
            .iter()
            .map(|&o| from_source(instance, &costs, o, Metric::Energy, |_| true))
            .collect();
        let down = to_sink(instance, &costs, instance.olt(), Metric::Energy, |x| instance.layer(x).is_candidate());
        Ok(Self { up, down })
    }

    /// Per-bit cost for object number `k` served at `c`, counting the processed
    /// return trip.
    pub fn serve_cost(&self, k: usize, c: NodeId, f: T) -> Option<T> {
        Some(self.up[k].energy(c)? + f * self.down.energy(c)?)
    }
}

fn beats<T: Scalar>(a: T, b: T) -> bool {
    a < b - b.abs() * T::capacity_slack()
}

fn ties<T: Scalar>(a: T, b: T) -> bool {
    (a - b).abs() <= b.abs().max(a.abs()) * T::capacity_slack()
}

/// Finds a minimum-power placement with its flows. See the module notes for
/// the decomposition; ties go to the lexicographically smallest placement
/// bit vector (candidate slot major, VM type minor).
pub fn solve_exact<T: Scalar>(
    instance: &NetworkInstance<T>,
    params: &ModelParams<T>,
    limits: &SearchLimits,
) -> Result<ExactOutcome<T>> {
    params.validate(instance.vm_types())?;
    if params.demand_bps == T::zero() || instance.objects().is_empty() {
        let solution = PlacementSolution::empty(instance);
        let flows = FlowAssignment::zeros(instance.links().len());
        let report = total_objective(&solution, &flows, instance, params)?;
        return Ok(ExactOutcome { solution, flows, report, nodes_visited: 0 });
    }
    let routes = Routes::new(instance, params)?;
    let prepared = prepare(instance, params, &routes, limits)?;
    let (placed, nodes_visited) = search(instance, params, &prepared, limits)?;
    let (solution, flows) = realise(instance, params, &routes, placed)?;
    let report = total_objective(&solution, &flows, instance, params)?;
    Ok(ExactOutcome { solution, flows, report, nodes_visited })
}

fn prepare<T: Scalar>(
    instance: &NetworkInstance<T>,
    params: &ModelParams<T>,
    routes: &Routes<T>,
    limits: &SearchLimits,
) -> Result<Prepared<T>> {
    let olt = instance.olt();
    let vm_types = instance.vm_types();
    let f = params.remaining_fraction();
    let d = params.demand_bps;
    let cap = T::one() + T::capacity_slack();

    let members: Vec<Vec<NodeId>> = (0..instance.networks())
        .map(|n| instance.candidates().iter().copied().filter(|&c| instance.node(c).network == Some(n)).collect())
        .collect();
    if let Some(m) = members.iter().find(|m| m.len() > limits.max_candidates_per_network.min(63)) {
        return Err(Error::Budget(format!(
            "{} candidates per network exceed the exact search limit of {}; use the heuristic or export the model",
            m.len(),
            limits.max_candidates_per_network.min(63)
        )));
    }

    let mut workload = vec![Vec::with_capacity(instance.candidates().len()); vm_types];
    for (v, row) in workload.iter_mut().enumerate() {
        for &c in instance.candidates() {
            row.push(params.workloads.get(v, instance.layer(c))?);
        }
    }
    let slot = |c: NodeId| instance.candidate_slot(c).expect("candidate");
    let fits = |v: usize, c: NodeId| !params.capacity_enforced || workload[v][slot(c)] <= cap;

    let mut lists = Vec::with_capacity(vm_types);
    let mut olt_cost = Vec::with_capacity(vm_types);
    let mut olt_allowed = Vec::with_capacity(vm_types);
    for v in 0..vm_types {
        olt_cost.push(params.vm_power(v, instance.layer(olt))?);
        olt_allowed.push(fits(v, olt));
        let mut per_network = Vec::with_capacity(members.len());
        for (n, cands) in members.iter().enumerate() {
            // each requesting object's options, cheapest first, ties to the lowest id
            let mut options: Vec<Vec<(T, NodeId)>> = Vec::new();
            for (k, &o) in instance.objects().iter().enumerate() {
                if instance.node(o).network != Some(n) || instance.vm_request(o) != Some(v) {
                    continue;
                }
                let mut opts: Vec<(T, NodeId)> = cands
                    .iter()
                    .chain(std::iter::once(&olt))
                    .filter_map(|&c| routes.serve_cost(k, c, f).map(|e| (d * e, c)))
                    .collect();
                opts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1)));
                options.push(opts);
            }
            let mut flags: [Vec<Entry<T>>; 2] = [Vec::new(), Vec::new()];
            for (flag, list) in flags.iter_mut().enumerate() {
                if options.is_empty() {
                    list.push(Entry { mask: 0, cost: T::zero(), uses_olt: false });
                    continue;
                }
                'mask: for mask in 0u64..(1u64 << cands.len()) {
                    let mut cost = T::zero();
                    let mut used = 0u64;
                    let mut uses_olt = false;
                    for (i, &c) in cands.iter().enumerate() {
                        if mask & (1 << i) != 0 {
                            if !fits(v, c) {
                                continue 'mask;
                            }
                            cost += params.vm_power(v, instance.layer(c))?;
                        }
                    }
                    for opts in &options {
                        let pick = opts.iter().find(|&&(_, c)| {
                            if c == olt {
                                flag == 1
                            } else {
                                let i = cands.binary_search(&c).expect("member");
                                mask & (1 << i) != 0
                            }
                        });
                        let Some(&(e, c)) = pick else { continue 'mask };
                        cost += e;
                        if c == olt {
                            uses_olt = true;
                        } else {
                            used |= 1 << cands.binary_search(&c).expect("member");
                        }
                    }
                    // a VM nobody uses would carry no traffic
                    if used == mask {
                        list.push(Entry { mask, cost, uses_olt });
                    }
                }
                list.sort_by(|a, b| a.cost.partial_cmp(&b.cost).unwrap_or(Ordering::Equal).then(a.mask.cmp(&b.mask)));
            }
            per_network.push(flags);
        }
        lists.push(per_network);
    }
    Ok(Prepared {
        vm_types,
        olt_slot: slot(olt),
        members,
        lists,
        olt_cost,
        olt_allowed,
        workload,
    })
}

struct Search<'a, T> {
    instance: &'a NetworkInstance<T>,
    p: &'a Prepared<T>,
    cap: T,
    enforce: bool,
    /// Lower bound on the cost of types `v..`.
    type_bound: Vec<T>,
    load: Vec<T>,
    chosen: Vec<(usize, Vec<u64>)>,
    best: Option<(T, Vec<bool>)>,
    nodes: u64,
    max_nodes: u64,
    capacity_blocked: Vec<bool>,
}

fn search<T: Scalar>(
    instance: &NetworkInstance<T>,
    params: &ModelParams<T>,
    p: &Prepared<T>,
    limits: &SearchLimits,
) -> Result<(Vec<bool>, u64)> {
    let inf = T::infinity();
    let min_of = |l: &Vec<Entry<T>>| l.first().map_or(inf, |e| e.cost);
    let mut per_type = Vec::with_capacity(p.vm_types);
    let mut empty_types = Vec::new();
    for v in 0..p.vm_types {
        let without: T = p.lists[v].iter().map(|f| min_of(&f[0])).sum();
        let with = if p.olt_allowed[v] {
            p.olt_cost[v] + p.lists[v].iter().map(|f| min_of(&f[1])).sum()
        } else {
            inf
        };
        let b = without.min(with);
        if b == inf {
            empty_types.push(v);
        }
        per_type.push(b);
    }
    if !empty_types.is_empty() {
        return Err(Error::Infeasible { types: empty_types });
    }
    let mut type_bound = vec![T::zero(); p.vm_types + 1];
    for v in (0..p.vm_types).rev() {
        type_bound[v] = type_bound[v + 1] + per_type[v];
    }

    let mut s = Search {
        instance,
        p,
        cap: T::one() + T::capacity_slack(),
        enforce: params.capacity_enforced,
        type_bound,
        load: vec![T::zero(); instance.candidates().len()],
        chosen: Vec::with_capacity(p.vm_types),
        best: None,
        nodes: 0,
        max_nodes: limits.max_nodes,
        capacity_blocked: vec![false; p.vm_types],
    };
    s.type_level(0, T::zero())?;
    let nodes = s.nodes;
    match s.best {
        Some((_, bits)) => Ok((bits, nodes)),
        None => Err(Error::Infeasible {
            types: (0..p.vm_types).filter(|&v| s.capacity_blocked[v]).collect(),
        }),
    }
}

impl<T: Scalar> Search<'_, T> {
    fn pruned(&self, bound: T) -> bool {
        match &self.best {
            Some((best, _)) => bound > *best + best.abs() * T::capacity_slack(),
            None => false,
        }
    }

    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return Err(Error::Budget(format!(
                "exact search visited more than {} nodes; use the heuristic or export the model",
                self.max_nodes
            )));
        }
        Ok(())
    }

    fn type_level(&mut self, v: usize, acc: T) -> Result<()> {
        if v == self.p.vm_types {
            self.leaf(acc);
            return Ok(());
        }
        for flag in 0..2 {
            if flag == 1 && !self.p.olt_allowed[v] {
                continue;
            }
            let lists = &self.p.lists[v];
            let mut base = acc + self.type_bound[v + 1];
            if flag == 1 {
                base += self.p.olt_cost[v];
            }
            let rest: T = lists.iter().map(|l| l[flag].first().map_or(T::infinity(), |e| e.cost)).sum();
            if rest == T::infinity() || self.pruned(base + rest) {
                continue;
            }
            self.tick()?;
            let olt = self.p.olt_slot;
            if flag == 1 {
                let w = self.p.workload[v][olt];
                if self.enforce && self.load[olt] + w > self.cap {
                    self.capacity_blocked[v] = true;
                    continue;
                }
                self.load[olt] += w;
            }
            self.chosen.push((flag, Vec::with_capacity(lists.len())));
            let acc_here = if flag == 1 { acc + self.p.olt_cost[v] } else { acc };
            self.network_level(v, flag, 0, acc_here, false)?;
            self.chosen.pop();
            if flag == 1 {
                self.load[olt] = self.load[olt] - self.p.workload[v][olt];
            }
        }
        Ok(())
    }

    fn network_level(&mut self, v: usize, flag: usize, n: usize, acc: T, olt_used: bool) -> Result<()> {
        let lists = &self.p.lists[v];
        if n == lists.len() {
            if flag == 1 && !olt_used {
                return Ok(());
            }
            return self.type_level(v + 1, acc);
        }
        let rest: T = lists[n + 1..].iter().map(|l| l[flag].first().map_or(T::infinity(), |e| e.cost)).sum();
        let tail = rest + self.type_bound[v + 1];
        for entry in &lists[n][flag] {
            if self.pruned(acc + entry.cost + tail) {
                break;
            }
            self.tick()?;
            let members = &self.p.members[n];
            let slots: Vec<usize> = (0..members.len())
                .filter(|&i| entry.mask & (1 << i) != 0)
                .map(|i| self.instance.candidate_slot(members[i]).expect("candidate"))
                .collect();
            if self.enforce && slots.iter().any(|&s| self.load[s] + self.p.workload[v][s] > self.cap) {
                self.capacity_blocked[v] = true;
                continue;
            }
            for &s in &slots {
                self.load[s] = self.load[s] + self.p.workload[v][s];
            }
            self.chosen.last_mut().expect("type chosen").1.push(entry.mask);
            self.network_level(v, flag, n + 1, acc + entry.cost, olt_used || entry.uses_olt)?;
            self.chosen.last_mut().expect("type chosen").1.pop();
            for &s in &slots {
                self.load[s] = self.load[s] - self.p.workload[v][s];
            }
        }
        Ok(())
    }

    fn leaf(&mut self, total: T) {
        let v_count = self.p.vm_types;
        let mut bits = vec![false; self.instance.candidates().len() * v_count];
        for (v, (flag, masks)) in self.chosen.iter().enumerate() {
            if *flag == 1 {
                bits[self.p.olt_slot * v_count + v] = true;
            }
            for (n, &mask) in masks.iter().enumerate() {
                for (i, &c) in self.p.members[n].iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        bits[self.instance.candidate_slot(c).expect("candidate") * v_count + v] = true;
                    }
                }
            }
        }
        let better = match &self.best {
            None => true,
            Some((best, best_bits)) => beats(total, *best) || (ties(total, *best) && bits < *best_bits),
        };
        if better {
            self.best = Some((total, bits));
        }
    }
}

/// Serves every object from its cheapest hosted VM and routes the traffic.
fn realise<T: Scalar>(
    instance: &NetworkInstance<T>,
    params: &ModelParams<T>,
    routes: &Routes<T>,
    placed: Vec<bool>,
) -> Result<(PlacementSolution<T>, FlowAssignment<T>)> {
    let v_count = instance.vm_types();
    let f = params.remaining_fraction();
    let d = params.demand_bps;
    let mut flows = FlowAssignment::zeros(instance.links().len());
    let mut inflow = vec![T::zero(); instance.candidates().len()];
    let mut assignment = Vec::with_capacity(instance.objects().len());
    for (k, &o) in instance.objects().iter().enumerate() {
        let v = instance.vm_request(o).expect("objects carry a request");
        let network = instance.node(o).network;
        let mut best: Option<(T, NodeId)> = None;
        for (slot, &c) in instance.candidates().iter().enumerate() {
            if !placed[slot * v_count + v] || !instance.serves_network(c, network) {
                continue;
            }
            if let Some(e) = routes.serve_cost(k, c, f) {
                let e = d * e;
                if best.is_none_or(|(b, _)| e < b) {
                    best = Some((e, c));
                }
            }
        }
        let (_, c) = best.ok_or_else(|| Error::Model(format!("object {o} has no reachable VM of type {v}")))?;
        let path = routes.up[k].path(instance, c).expect("reachable");
        flows.add_unprocessed_path(o, c, d, &path);
        inflow[instance.candidate_slot(c).expect("candidate")] =
            inflow[instance.candidate_slot(c).expect("candidate")] + d;
        assignment.push(Assignment { object: o, vm_type: v, shares: vec![(c, d)] });
    }
    let olt = instance.olt();
    for (slot, &c) in instance.candidates().iter().enumerate() {
        if c == olt || inflow[slot] == T::zero() {
            continue;
        }
        let path: Vec<LinkId> = routes.down.path(instance, c).expect("candidates reach the OLT");
        flows.add_processed_path(c, olt, f * inflow[slot], &path);
    }
    let solution = PlacementSolution::from_placement(instance, params, placed, assignment)?;
    Ok((solution, flows))
}
