//! Helpers shared by the integration suites: a naive enumerator that knows
//! nothing about the exact engine's search, a random corpus of small
//! instances, and a hand-built single-path chain.

#![allow(dead_code)]

use ponvm_core::power::link_costs;
use ponvm_core::topology::{build_instance, Link, Node, Point, RequestAssignment};
use ponvm_core::{LayerKind, Medium, ModelParams, NetworkInstance, Scalar, Scenario, TopologyConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const REDUCTIONS: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

/// Cheapest cost from `from` to every node, or to `to` from every node when
/// `reverse`, using only links whose endpoints pass `allow`.
fn bellman_ford(
    inst: &NetworkInstance,
    costs: &[f64],
    root: usize,
    reverse: bool,
    allow: impl Fn(usize) -> bool,
) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; inst.nodes().len()];
    dist[root] = 0.0;
    loop {
        let mut changed = false;
        for (id, l) in inst.links().iter().enumerate() {
            if !allow(l.src) || !allow(l.dst) {
                continue;
            }
            let (a, b) = if reverse { (l.dst, l.src) } else { (l.src, l.dst) };
            if dist[a] + costs[id] < dist[b] {
                dist[b] = dist[a] + costs[id];
                changed = true;
            }
        }
        if !changed {
            return dist;
        }
    }
}

/// One way of hosting a single VM type: its cost and the workload it puts
/// on each candidate slot.
struct Hosting {
    cost: f64,
    load: Vec<(usize, f64)>,
}

/// Minimum objective by enumerating every subset of candidates for every
/// VM type and every combination of those subsets. `None` if nothing is
/// feasible.
pub fn brute_force(inst: &NetworkInstance, params: &ModelParams) -> Option<f64> {
    let costs = link_costs(inst, params).unwrap();
    let cands = inst.candidates().to_vec();
    let olt = inst.olt();
    let d = params.demand_bps;
    let f = 1.0 - params.reduction;
    let down = bellman_ford(inst, &costs, olt, true, |x| inst.layer(x) != LayerKind::Object);

    let mut per_type: Vec<Vec<Hosting>> = Vec::new();
    for v in 0..inst.vm_types() {
        let objects: Vec<usize> = inst.objects().iter().copied().filter(|&o| inst.vm_request(o) == Some(v)).collect();
        if objects.is_empty() {
            per_type.push(vec![Hosting { cost: 0.0, load: Vec::new() }]);
            continue;
        }
        // serve[i][k]: cost for object i to use candidate k, infinite if hidden
        let serve: Vec<Vec<f64>> = objects
            .iter()
            .map(|&o| {
                let up = bellman_ford(inst, &costs, o, false, |_| true);
                let net = inst.node(o).network;
                cands
                    .iter()
                    .map(|&c| {
                        if c == olt || inst.node(c).network == net {
                            d * (up[c] + f * down[c])
                        } else {
                            f64::INFINITY
                        }
                    })
                    .collect()
            })
            .collect();
        let mut options = Vec::new();
        for mask in 1u32..(1 << cands.len()) {
            let members: Vec<usize> = (0..cands.len()).filter(|k| mask >> k & 1 == 1).collect();
            let mut cost = 0.0;
            let mut load = Vec::new();
            for &k in &members {
                let layer = inst.layer(cands[k]);
                let w = params.workloads.get(v, layer).unwrap();
                cost += w * params.processing.max_power(layer);
                load.push((k, w));
            }
            let mut ok = true;
            for row in &serve {
                let best = members.iter().map(|&k| row[k]).fold(f64::INFINITY, f64::min);
                if !best.is_finite() {
                    ok = false;
                    break;
                }
                cost += best;
            }
            if ok {
                options.push(Hosting { cost, load });
            }
        }
        if options.is_empty() {
            return None;
        }
        options.sort_by(|a, b| a.cost.total_cmp(&b.cost));
        per_type.push(options);
    }

    let cap = if params.capacity_enforced { 1.0 + f64::capacity_slack() } else { f64::INFINITY };
    let mut floor = vec![0.0; per_type.len() + 1];
    for v in (0..per_type.len()).rev() {
        floor[v] = floor[v + 1] + per_type[v][0].cost;
    }
    let mut best = f64::INFINITY;
    let mut loads = vec![0.0; cands.len()];
    combine(&per_type, &floor, 0, 0.0, &mut loads, cap, &mut best);
    best.is_finite().then_some(best)
}

fn combine(
    per_type: &[Vec<Hosting>],
    floor: &[f64],
    v: usize,
    acc: f64,
    loads: &mut [f64],
    cap: f64,
    best: &mut f64,
) {
    if v == per_type.len() {
        *best = best.min(acc);
        return;
    }
    for opt in &per_type[v] {
        if acc + opt.cost + floor[v + 1] >= *best {
            break;
        }
        if opt.load.iter().any(|&(k, w)| loads[k] + w > cap) {
            continue;
        }
        for &(k, w) in &opt.load {
            loads[k] += w;
        }
        combine(per_type, floor, v + 1, acc + opt.cost, loads, cap, best);
        for &(k, w) in &opt.load {
            loads[k] -= w;
        }
    }
}

/// A small instance drawn from the oracle corpus.
pub struct Case {
    pub label: String,
    pub instance: NetworkInstance,
    pub params: ModelParams,
}

/// `count` instances with at most 3 relays and 6 objects per network and
/// at most two VM types, cycling through every scenario and reduction.
pub fn corpus(count: usize, seed: u64) -> Vec<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let scenario = Scenario::ALL[i % 3];
            let reduction = REDUCTIONS[(i / 3) % 5];
            let relays = rng.gen_range(1..=3);
            let objects = rng.gen_range(1..=6);
            let types = rng.gen_range(1..=2);
            let mut cfg = TopologyConfig::reduced_with(relays, objects, types).with_seed(rng.gen());
            if rng.gen_bool(0.5) {
                cfg.request_assignment = RequestAssignment::SeededUniform;
            }
            let mut params = ModelParams::for_scenario(scenario, reduction);
            params.capacity_enforced = rng.gen_bool(0.8);
            Case {
                label: format!(
                    "case {i}: scenario {scenario} r={reduction} relays={relays} objects={objects} types={types} seed={}",
                    cfg.rng_seed
                ),
                instance: build_instance(&cfg).unwrap(),
                params,
            }
        })
        .collect()
}

pub fn relative_gap(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// object -> relay -> coordinator -> gateway -> ONU -> OLT, one path only.
pub fn chain() -> NetworkInstance {
    let pos = |x: f64| Some(Point::new(x, 0.0));
    let nodes = vec![
        Node { id: 0, layer: LayerKind::Object, network: Some(0), position: pos(0.0) },
        Node { id: 1, layer: LayerKind::Relay, network: Some(0), position: pos(3.0) },
        Node { id: 2, layer: LayerKind::Coordinator, network: Some(0), position: pos(7.0) },
        Node { id: 3, layer: LayerKind::Gateway, network: Some(0), position: None },
        Node { id: 4, layer: LayerKind::Onu, network: Some(0), position: None },
        Node { id: 5, layer: LayerKind::Olt, network: None, position: None },
    ];
    let link = |src, dst, medium, distance_m| Link { src, dst, medium, distance_m };
    let links = vec![
        link(0, 1, Medium::Wireless, 3.0),
        link(1, 2, Medium::Wireless, 4.0),
        link(2, 3, Medium::Wireless, 100.0),
        link(3, 4, Medium::Ethernet, 0.0),
        link(4, 5, Medium::Fiber, 0.0),
    ];
    NetworkInstance::from_parts(nodes, links, vec![Some(0), None, None, None, None, None], 1).unwrap()
}

/// The chain's optimum worked out by hand from the default energies: each
/// hop's transmit (with the `eps d^2` amplifier on radio hops) and receive
/// energy, weighted by 5 at relays, coordinators, ONUs and the OLT.
pub fn chain_objective_by_hand(scenario: Scenario, r: f64) -> f64 {
    let eps = 255e-12;
    let a = 5.0;
    let hops = [
        50e-9 + eps * 9.0 + a * 50e-9,             // object -> relay
        a * (50e-9 + eps * 16.0) + a * 50e-9,      // relay -> coordinator
        a * (50e-9 + eps * 10_000.0) + 60e-6,      // coordinator -> gateway
        15e-9 + a * 7.5e-9,                        // gateway -> ONU
        a * 7.5e-9 + a * 225.6e-12,                // ONU -> OLT
    ];
    let (vm_w, olt_vm_w) = match scenario {
        Scenario::One => (0.1 * 4.64, 0.01 * 10.0 * 4.64),
        Scenario::Two => (0.4 * 4.64, 0.04 * 10.0 * 4.64),
        Scenario::Three => (0.4 * 4.64, 0.04 * 10.0 * 9.28),
    };
    let d = 5000.0;
    let f = 1.0 - r;
    // hosting at position k: hops before k carry d, hops after carry f d
    (1..=5)
        .map(|k| {
            let up: f64 = hops[..k].iter().sum();
            let down: f64 = hops[k..].iter().sum();
            d * up + f * d * down + if k == 5 { olt_vm_w } else { vm_w }
        })
        .fold(f64::INFINITY, f64::min)
}

pub mod props {
    //! Invariant checks over random instances, shared by the property suite
    //! and the acceptance run.

    use std::collections::HashMap;

    use ponvm_core::eepiv::{run_eepiv, EepivOptions};
    use ponvm_core::milp::{solve_exact, validate_solution, SearchLimits};
    use ponvm_core::topology::{build_instance, RequestAssignment};
    use ponvm_core::{
        FlowAssignment, LayerKind, ModelParams, NetworkInstance, PlacementSolution, Scalar, Scenario, TopologyConfig,
    };
    use proptest::prelude::*;
    use proptest::test_runner::TestCaseError;

    #[derive(Clone, Debug)]
    pub struct Setup {
        pub networks: usize,
        pub relays: usize,
        pub objects: usize,
        pub types: usize,
        pub seed: u64,
        pub uniform: bool,
        pub scenario: Scenario,
        pub reduction: f64,
        pub capacity: bool,
    }

    impl Setup {
        pub fn instance(&self) -> NetworkInstance {
            let mut cfg = TopologyConfig::reduced_with(self.relays, self.objects, self.types).with_seed(self.seed);
            cfg.networks = self.networks;
            if self.uniform {
                cfg.request_assignment = RequestAssignment::SeededUniform;
            }
            build_instance(&cfg).unwrap()
        }

        pub fn params(&self) -> ModelParams {
            let mut p = ModelParams::for_scenario(self.scenario, self.reduction);
            p.capacity_enforced = self.capacity;
            p
        }
    }

    pub fn setups() -> impl Strategy<Value = Setup> {
        (
            1usize..=2,
            1usize..=4,
            0usize..=8,
            1usize..=4,
            any::<u64>(),
            any::<bool>(),
            0usize..3,
            0.0f64..0.95,
            any::<bool>(),
        )
            .prop_map(|(networks, relays, objects, types, seed, uniform, s, reduction, capacity)| Setup {
                networks,
                relays,
                objects,
                types,
                seed,
                uniform,
                scenario: Scenario::ALL[s],
                reduction,
                capacity,
            })
    }

    /// Every commodity leaves its source, reaches its sink and is balanced
    /// everywhere else; link totals equal the sum of their commodities.
    pub fn flows_conserve(inst: &NetworkInstance, flows: &FlowAssignment) -> Result<(), TestCaseError> {
        let tol = 1e-6;
        for (commodities, totals) in [(&flows.unprocessed, &flows.upt), (&flows.processed, &flows.pt)] {
            let mut sum = vec![0.0; inst.links().len()];
            for c in commodities {
                let mut net: HashMap<usize, f64> = HashMap::new();
                for &(l, rate) in &c.links {
                    let link = inst.link(l);
                    *net.entry(link.src).or_default() += rate;
                    *net.entry(link.dst).or_default() -= rate;
                    sum[l] += rate;
                }
                for (&node, &balance) in &net {
                    let want = if node == c.source {
                        c.rate
                    } else if node == c.sink {
                        -c.rate
                    } else {
                        0.0
                    };
                    prop_assert!((balance - want).abs() <= tol, "node {node} balance {balance}, want {want}");
                }
            }
            for (l, (&a, &b)) in sum.iter().zip(totals.iter()).enumerate() {
                prop_assert!((a - b).abs() <= tol, "link {l}: commodities {a}, total {b}");
            }
        }
        Ok(())
    }

    /// Cloudlet flags and workloads follow from the placement bits.
    pub fn workloads_add_up(
        inst: &NetworkInstance,
        params: &ModelParams,
        sol: &PlacementSolution,
        capacity: bool,
    ) -> Result<(), TestCaseError> {
        for (slot, &c) in inst.candidates().iter().enumerate() {
            let layer = inst.layer(c);
            let mut load = 0.0;
            let mut any = false;
            for v in 0..inst.vm_types() {
                if sol.is_placed(slot, v) {
                    any = true;
                    load += params.workloads.get(v, layer).unwrap();
                }
            }
            prop_assert_eq!(sol.cloudlet_open[slot], any, "cloudlet flag at {}", c);
            prop_assert!((sol.workload[slot] - load).abs() <= 1e-12, "workload at {c}");
            if capacity {
                prop_assert!(sol.workload[slot] <= 1.0 + f64::capacity_slack(), "capacity at {c}: {}", load);
            }
        }
        Ok(())
    }

    /// Per network and type: at most one host below the OLT, never one below
    /// and one at the OLT, and exactly one when the type is requested and served.
    pub fn one_instance_per_network(
        inst: &NetworkInstance,
        sol: &PlacementSolution,
        unserved: &[usize],
    ) -> Result<(), TestCaseError> {
        let olt_slot = inst.candidate_slot(inst.olt()).unwrap();
        for n in 0..inst.networks() {
            for v in 0..inst.vm_types() {
                let below = inst
                    .candidates()
                    .iter()
                    .filter(|&&c| inst.node(c).network == Some(n) && sol.is_placed(inst.candidate_slot(c).unwrap(), v))
                    .count();
                let at_olt = sol.is_placed(olt_slot, v) as usize;
                prop_assert!(below <= 1, "network {n} type {v}: {below} hosts");
                let requested_and_served = inst
                    .objects()
                    .iter()
                    .any(|&o| inst.node(o).network == Some(n) && inst.vm_request(o) == Some(v) && !unserved.contains(&o));
                if requested_and_served {
                    prop_assert_eq!(below + at_olt, 1, "network {} type {}", n, v);
                } else {
                    prop_assert_eq!(below, 0, "network {} type {} hosted without requests", n, v);
                }
            }
        }
        Ok(())
    }

    /// `W_vc * MP_c` is the same at every candidate layer, except the OLT in
    /// scenario 3 where it doubles.
    pub fn location_invariant(scenario: Scenario, v: usize) -> Result<(), TestCaseError> {
        let params = ModelParams::for_scenario(scenario, 0.5);
        let relay = params.vm_power(v, LayerKind::Relay).unwrap();
        for layer in LayerKind::CANDIDATES {
            let p = params.vm_power(v, layer).unwrap();
            let factor = if scenario == Scenario::Three && layer == LayerKind::Olt { 2.0 } else { 1.0 };
            prop_assert!((p - factor * relay).abs() <= 1e-12 * relay, "type {v} at {layer}: {p} vs relay {relay}");
        }
        Ok(())
    }

    pub fn exact_invariants(setup: &Setup) -> Result<(), TestCaseError> {
        let inst = setup.instance();
        let params = setup.params();
        let out = match solve_exact(&inst, &params, &SearchLimits::default()) {
            Ok(out) => out,
            Err(e) => {
                prop_assert_eq!(e.kind(), "infeasible");
                return Ok(());
            }
        };
        flows_conserve(&inst, &out.flows)?;
        workloads_add_up(&inst, &params, &out.solution, params.capacity_enforced)?;
        let report = validate_solution(&out.solution, &out.flows, &inst, &params);
        prop_assert!(report.is_clean(), "{:?}", report.violations);
        prop_assert!((report.objective - out.report.total_w).abs() <= 1e-9 * out.report.total_w.max(1.0));
        Ok(())
    }

    pub fn heuristic_invariants(setup: &Setup) -> Result<(), TestCaseError> {
        let inst = setup.instance();
        let params = setup.params();
        let out = run_eepiv(&inst, &params, &EepivOptions::default()).unwrap();
        flows_conserve(&inst, &out.flows)?;
        workloads_add_up(&inst, &params, &out.solution, true)?;
        one_instance_per_network(&inst, &out.solution, &out.unserved)?;
        if out.unserved.is_empty() {
            let report = validate_solution(&out.solution, &out.flows, &inst, &params);
            prop_assert!(report.is_clean(), "{:?}", report.violations);
        }
        Ok(())
    }
}
