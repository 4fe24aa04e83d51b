//! Greedy first-fit VM placement with minimum-hop routing.
//!
//! Candidates are visited in a fixed order and each hosts every VM type it
//! still can: the type must fit in the remaining CPU capacity and must not be
//! hosted yet in the network it would serve. The OLT serves both networks.
//! Objects then send to the single instance of their type visible to them,
//! and cloudlets forward the reduced traffic to the OLT, all along minimum
//! hop paths with ties broken by energy and then by the lowest next node.

use crate::error::{Error, Result};
use crate::power::{link_costs, processing_power, total_objective, traffic_power, ModelParams, PowerReport};
use crate::routing::min_hop_path;
use crate::scalar::Scalar;
use crate::solution::{Assignment, FlowAssignment, PlacementSolution};
use crate::topology::{LayerKind, NetworkInstance, NodeId};

/// Order in which candidates are offered VMs.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum CandidateOrder {
    /// Per network: relays by id, coordinator, gateway, ONU; then the OLT.
    #[default]
    BottomUp,
    /// The OLT first, then per network: ONU, gateway, coordinator, relays.
    TopDown,
    /// Any sequence of distinct candidates; the rest are never used.
    Custom(Vec<NodeId>),
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct EepivOptions {
    pub order: CandidateOrder,
    /// Report the unweighted total without OLT processing as the headline
    /// figure instead of the weighted objective.
    pub literal_tpc: bool,
}

#[derive(Clone, Debug)]
pub struct EepivOutcome<T> {
    pub solution: PlacementSolution<T>,
    pub flows: FlowAssignment<T>,
    /// Weighted objective breakdown, comparable with the exact engine.
    pub report: PowerReport<T>,
    pub served_count: usize,
    pub unserved: Vec<NodeId>,
    /// Processing below the OLT plus unweighted traffic power.
    pub step64_tpc: T,
    /// `step64_tpc` when literal mode is on, the weighted objective otherwise.
    pub tpc: T,
}

fn visit_order<T: Scalar>(instance: &NetworkInstance<T>, order: &CandidateOrder) -> Result<Vec<NodeId>> {
    let per_network = |n: usize, top_down: bool| {
        let mut layers: Vec<NodeId> = Vec::new();
        for layer in [LayerKind::Relay, LayerKind::Coordinator, LayerKind::Gateway, LayerKind::Onu] {
            layers.extend(instance.nodes_in_layer(layer).filter(|x| x.network == Some(n)).map(|x| x.id));
        }
        if top_down {
            layers.reverse();
        }
        layers
    };
    Ok(match order {
        CandidateOrder::BottomUp => {
            let mut out: Vec<NodeId> = (0..instance.networks()).flat_map(|n| per_network(n, false)).collect();
            out.push(instance.olt());
            out
        }
        CandidateOrder::TopDown => {
            let mut out = vec![instance.olt()];
            out.extend((0..instance.networks()).flat_map(|n| per_network(n, true)));
            out
        }
        CandidateOrder::Custom(list) => {
            let mut seen = vec![false; instance.nodes().len()];
            for &c in list {
                if c >= seen.len() || instance.candidate_slot(c).is_none() || seen[c] {
                    return Err(Error::Config(format!("custom order entry {c} is not a distinct candidate")));
                }
                seen[c] = true;
            }
            list.clone()
        }
    })
}

/// Runs the heuristic. Objects whose type found no host are left unserved
/// and counted, never fatal.
pub fn run_eepiv<T: Scalar>(
    instance: &NetworkInstance<T>,
    params: &ModelParams<T>,
    options: &EepivOptions,
) -> Result<EepivOutcome<T>> {
    params.validate(instance.vm_types())?;
    let v_count = instance.vm_types();
    let networks = instance.networks();
    let olt = instance.olt();
    let cap = T::one() + T::capacity_slack();

    let mut requested = vec![vec![false; v_count]; networks];
    for &o in instance.objects() {
        let n = instance.node(o).network.expect("objects belong to a network");
        requested[n][instance.vm_request(o).expect("objects carry a request")] = true;
    }

    // placement
    let mut host: Vec<Vec<Option<NodeId>>> = vec![vec![None; v_count]; networks];
    let mut placed = vec![false; instance.candidates().len() * v_count];
    let mut load = vec![T::zero(); instance.candidates().len()];
    for c in visit_order(instance, &options.order)? {
        let slot = instance.candidate_slot(c).expect("candidate");
        let layer = instance.layer(c);
        let nets: Vec<usize> = match instance.node(c).network {
            Some(n) => vec![n],
            None => (0..networks).collect(),
        };
        for v in 0..v_count {
            let waiting: Vec<usize> = nets.iter().copied().filter(|&n| requested[n][v] && host[n][v].is_none()).collect();
            if waiting.is_empty() {
                continue;
            }
            let w = params.workloads.get(v, layer)?;
            if load[slot] + w > cap {
                continue;
            }
            load[slot] += w;
            placed[slot * v_count + v] = true;
            for n in waiting {
                host[n][v] = Some(c);
            }
        }
    }

    // demands and routing
    let costs = link_costs(instance, params)?;
    let f = params.remaining_fraction();
    let d = params.demand_bps;
    let mut flows = FlowAssignment::zeros(instance.links().len());
    let mut inflow = vec![T::zero(); instance.candidates().len()];
    let mut assignment = Vec::new();
    let mut unserved = Vec::new();
    for &o in instance.objects() {
        let n = instance.node(o).network.expect("objects belong to a network");
        let v = instance.vm_request(o).expect("objects carry a request");
        let Some(c) = host[n][v] else {
            unserved.push(o);
            continue;
        };
        let Some(path) = min_hop_path(instance, &costs, o, c, |_| true) else {
            unserved.push(o);
            continue;
        };
        if d > T::zero() {
            flows.add_unprocessed_path(o, c, d, &path);
        }
        let slot = instance.candidate_slot(c).expect("candidate");
        inflow[slot] += d;
        assignment.push(Assignment { object: o, vm_type: v, shares: vec![(c, d)] });
    }
    for (slot, &c) in instance.candidates().iter().enumerate() {
        if c == olt || inflow[slot] == T::zero() {
            continue;
        }
        let path = min_hop_path(instance, &costs, c, olt, |x| instance.layer(x).is_candidate())
            .ok_or_else(|| Error::Model(format!("cloudlet {c} has no path to the OLT")))?;
        flows.add_processed_path(c, olt, f * inflow[slot], &path);
    }

    let solution = PlacementSolution::from_placement(instance, params, placed, assignment)?;
    let report = total_objective(&solution, &flows, instance, params)?;
    let processing = processing_power(&solution, instance, params)?;
    let step64_tpc =
        processing.sum() - processing[LayerKind::Olt] + traffic_power(&flows, instance, params)?.sum();
    let tpc = if options.literal_tpc { step64_tpc } else { report.total_w };
    Ok(EepivOutcome {
        solution,
        flows,
        report,
        served_count: instance.objects().len() - unserved.len(),
        unserved,
        step64_tpc,
        tpc,
    })
}
