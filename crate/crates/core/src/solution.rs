//! Placement decisions and the link flows that realise them.

use crate::error::{Error, Result};
use crate::power::ModelParams;
use crate::scalar::Scalar;
use crate::topology::{LayerKind, LinkId, NetworkInstance, NodeId};

/// One object's request and the cloudlets serving it.
#[derive(Clone, Debug, PartialEq)]
pub struct Assignment<T> {
    pub object: NodeId,
    pub vm_type: usize,
    /// Serving candidate and the share of the demand it receives, in bps.
    pub shares: Vec<(NodeId, T)>,
}

/// VM placement (`I_vc`), cloudlets (`H_c`) and their workloads (`TW_c`),
/// indexed by candidate slot (see [`NetworkInstance::candidate_slot`]).
#[derive(Clone, Debug, PartialEq)]
pub struct PlacementSolution<T> {
    vm_types: usize,
    candidates: Vec<NodeId>,
    placed: Vec<bool>,
    pub cloudlet_open: Vec<bool>,
    pub workload: Vec<T>,
    pub assignment: Vec<Assignment<T>>,
}

impl<T: Scalar> PlacementSolution<T> {
    pub fn empty(instance: &NetworkInstance<T>) -> Self {
        let n = instance.candidates().len();
        Self {
            vm_types: instance.vm_types(),
            candidates: instance.candidates().to_vec(),
            placed: vec![false; n * instance.vm_types()],
            cloudlet_open: vec![false; n],
            workload: vec![T::zero(); n],
            assignment: Vec::new(),
        }
    }

    /// Builds a solution whose cloudlet flags and workloads follow from the
    /// placement bits, as the workload and cloudlet rows of the model demand.
    pub fn from_placement(
        instance: &NetworkInstance<T>,
        params: &ModelParams<T>,
        placed: Vec<bool>,
        assignment: Vec<Assignment<T>>,
    ) -> Result<Self> {
        let mut solution = Self::empty(instance);
        if placed.len() != solution.placed.len() {
            return Err(Error::Model(format!(
                "placement has {} bits, expected {}",
                placed.len(),
                solution.placed.len()
            )));
        }
        solution.placed = placed;
        solution.assignment = assignment;
        solution.derive_cloudlets(instance, params)?;
        Ok(solution)
    }

    /// Recomputes `H_c` and `TW_c` from the placement bits.
    pub fn derive_cloudlets(&mut self, instance: &NetworkInstance<T>, params: &ModelParams<T>) -> Result<()> {
        for (slot, &c) in self.candidates.iter().enumerate() {
            let layer = instance.layer(c);
            let mut open = false;
            let mut load = T::zero();
            for v in 0..self.vm_types {
                if self.placed[slot * self.vm_types + v] {
                    open = true;
                    load += params.workloads.get(v, layer)?;
                }
            }
            self.cloudlet_open[slot] = open;
            self.workload[slot] = load;
        }
        Ok(())
    }

    pub fn vm_types(&self) -> usize {
        self.vm_types
    }

    pub fn candidates(&self) -> &[NodeId] {
        &self.candidates
    }

    pub fn placement_bits(&self) -> &[bool] {
        &self.placed
    }

    pub fn is_placed(&self, slot: usize, vm_type: usize) -> bool {
        self.placed[slot * self.vm_types + vm_type]
    }

    pub fn set_placed(&mut self, slot: usize, vm_type: usize, on: bool) {
        self.placed[slot * self.vm_types + vm_type] = on;
    }

    /// Number of VM instances placed.
    pub fn vm_count(&self) -> usize {
        self.placed.iter().filter(|&&p| p).count()
    }

    pub fn cloudlet_count(&self) -> usize {
        self.cloudlet_open.iter().filter(|&&o| o).count()
    }

    /// Hosted VM instances as `(layer, network, vm_type, node)`.
    pub fn hosted(&self, instance: &NetworkInstance<T>) -> Vec<(LayerKind, Option<usize>, usize, NodeId)> {
        let mut out = Vec::new();
        for (slot, &c) in self.candidates.iter().enumerate() {
            for v in 0..self.vm_types {
                if self.is_placed(slot, v) {
                    let node = instance.node(c);
                    out.push((node.layer, node.network, v, c));
                }
            }
        }
        out
    }

    /// Placed VM count per candidate layer, bottom-up.
    pub fn vms_per_layer(&self, instance: &NetworkInstance<T>) -> Vec<(LayerKind, usize)> {
        LayerKind::CANDIDATES
            .iter()
            .map(|&layer| (layer, self.hosted(instance).iter().filter(|h| h.0 == layer).count()))
            .collect()
    }
}

/// Traffic of one source-sink pair and how it is split over links.
#[derive(Clone, Debug, PartialEq)]
pub struct CommodityFlow<T> {
    pub source: NodeId,
    pub sink: NodeId,
    pub rate: T,
    pub links: Vec<(LinkId, T)>,
}

/// Per-link unprocessed (`upt`) and processed (`pt`) bit rates with their
/// per-commodity decompositions.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowAssignment<T> {
    pub upt: Vec<T>,
    pub pt: Vec<T>,
    /// Object to cloudlet commodities.
    pub unprocessed: Vec<CommodityFlow<T>>,
    /// Cloudlet to OLT commodities.
    pub processed: Vec<CommodityFlow<T>>,
}

impl<T: Scalar> FlowAssignment<T> {
    pub fn zeros(link_count: usize) -> Self {
        Self {
            upt: vec![T::zero(); link_count],
            pt: vec![T::zero(); link_count],
            unprocessed: Vec::new(),
            processed: Vec::new(),
        }
    }

    /// Routes `rate` of unprocessed traffic from `source` to `sink` along `path`.
    pub fn add_unprocessed_path(&mut self, source: NodeId, sink: NodeId, rate: T, path: &[LinkId]) {
        for &l in path {
            self.upt[l] += rate;
        }
        push_commodity(&mut self.unprocessed, source, sink, rate, path);
    }

    pub fn add_processed_path(&mut self, source: NodeId, sink: NodeId, rate: T, path: &[LinkId]) {
        for &l in path {
            self.pt[l] += rate;
        }
        push_commodity(&mut self.processed, source, sink, rate, path);
    }

    /// Multiplies every rate by `k`.
    pub fn scaled(&self, k: T) -> Self {
        let scale_commodities = |cs: &[CommodityFlow<T>]| {
            cs.iter()
                .map(|c| CommodityFlow {
                    source: c.source,
                    sink: c.sink,
                    rate: c.rate * k,
                    links: c.links.iter().map(|&(l, r)| (l, r * k)).collect(),
                })
                .collect()
        };
        Self {
            upt: self.upt.iter().map(|&x| x * k).collect(),
            pt: self.pt.iter().map(|&x| x * k).collect(),
            unprocessed: scale_commodities(&self.unprocessed),
            processed: scale_commodities(&self.processed),
        }
    }
}

fn push_commodity<T: Scalar>(
    list: &mut Vec<CommodityFlow<T>>,
    source: NodeId,
    sink: NodeId,
    rate: T,
    path: &[LinkId],
) {
    if let Some(existing) = list.iter_mut().find(|c| c.source == source && c.sink == sink) {
        existing.rate += rate;
        for &l in path {
            match existing.links.iter_mut().find(|(id, _)| *id == l) {
                Some(entry) => entry.1 += rate,
                None => existing.links.push((l, rate)),
            }
        }
    } else {
        list.push(CommodityFlow { source, sink, rate, links: path.iter().map(|&l| (l, rate)).collect() });
    }
}
