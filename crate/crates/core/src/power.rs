//! Traffic and processing power of a placement.
//!
//! Traffic power charges every bit its transmit energy at the sending node
//! (plus the amplifier term `epsilon * d^2` on wireless hops) and its receive
//! energy at the receiving node. Relays, coordinators, ONUs and the OLT are
//! weighted by the networking scaling factor `A`; objects and gateways are not.
//! Processing power of a cloudlet is its total normalised workload times the
//! maximum CPU power of its host.

use std::fmt;
use std::io::Write;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::solution::{FlowAssignment, PlacementSolution};
use crate::topology::{LayerKind, LinkId, Medium, NetworkInstance};

/// One value per [`LayerKind`].
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct LayerMap<T>(pub [T; 6]);

impl<T: Scalar> LayerMap<T> {
    pub fn zeros() -> Self {
        Self([T::zero(); 6])
    }

    pub fn sum(&self) -> T {
        self.0.iter().copied().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (LayerKind, T)> + '_ {
        LayerKind::ALL.iter().map(move |&l| (l, self[l]))
    }
}

impl<T> Index<LayerKind> for LayerMap<T> {
    type Output = T;
    fn index(&self, layer: LayerKind) -> &T {
        &self.0[layer.index()]
    }
}

impl<T> IndexMut<LayerKind> for LayerMap<T> {
    fn index_mut(&mut self, layer: LayerKind) -> &mut T {
        &mut self.0[layer.index()]
    }
}

/// Per-bit energies (J/bit), the amplifier coefficient (J/(bit m^2)) and the
/// networking scaling factor.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyParams<T> {
    pub e_ot: T,
    pub e_rt: T,
    pub e_rr: T,
    pub e_ct: T,
    pub e_cr: T,
    pub e_gr: T,
    pub e_gt: T,
    pub e_u: T,
    pub e_l: T,
    pub epsilon: T,
    pub scaling_a: T,
}

impl<T: Scalar> Default for EnergyParams<T> {
    fn default() -> Self {
        Self {
            e_ot: T::lit(50e-9),
            e_rt: T::lit(50e-9),
            e_rr: T::lit(50e-9),
            e_ct: T::lit(50e-9),
            e_cr: T::lit(50e-9),
            e_gr: T::lit(60e-6),
            e_gt: T::lit(15e-9),
            e_u: T::lit(7.5e-9),
            e_l: T::lit(225.6e-12),
            epsilon: T::lit(255e-12),
            scaling_a: T::lit(5.0),
        }
    }
}

impl<T: Scalar> EnergyParams<T> {
    pub fn zero() -> Self {
        let z = T::zero();
        Self { e_ot: z, e_rt: z, e_rr: z, e_ct: z, e_cr: z, e_gr: z, e_gt: z, e_u: z, e_l: z, epsilon: z, scaling_a: T::one() }
    }

    /// Transmit energy per bit; `None` for the OLT, which only receives uplink.
    pub fn transmit(&self, layer: LayerKind) -> Option<T> {
        match layer {
            LayerKind::Object => Some(self.e_ot),
            LayerKind::Relay => Some(self.e_rt),
            LayerKind::Coordinator => Some(self.e_ct),
            LayerKind::Gateway => Some(self.e_gt),
            LayerKind::Onu => Some(self.e_u),
            LayerKind::Olt => None,
        }
    }

    /// Receive energy per bit; `None` for objects, which only originate traffic.
    pub fn receive(&self, layer: LayerKind) -> Option<T> {
        match layer {
            LayerKind::Object => None,
            LayerKind::Relay => Some(self.e_rr),
            LayerKind::Coordinator => Some(self.e_cr),
            LayerKind::Gateway => Some(self.e_gr),
            LayerKind::Onu => Some(self.e_u),
            LayerKind::Olt => Some(self.e_l),
        }
    }

    /// Weight of a layer's traffic power in the objective.
    pub fn weight(&self, layer: LayerKind) -> T {
        match layer {
            LayerKind::Object | LayerKind::Gateway => T::one(),
            _ => self.scaling_a,
        }
    }

    fn validate(&self) -> Result<()> {
        let all = [
            self.e_ot, self.e_rt, self.e_rr, self.e_ct, self.e_cr, self.e_gr, self.e_gt, self.e_u, self.e_l,
            self.epsilon, self.scaling_a,
        ];
        if all.iter().any(|v| !v.is_finite() || *v < T::zero()) {
            return Err(Error::Config("energy parameters must be finite and nonnegative".into()));
        }
        Ok(())
    }
}

/// CPU power and count of each candidate layer.
#[derive(Clone, Debug, PartialEq)]
pub struct ProcessingParams<T> {
    pub cpu_power_w: LayerMap<T>,
    pub cpus: LayerMap<T>,
}

impl<T: Scalar> Default for ProcessingParams<T> {
    fn default() -> Self {
        let w = T::lit(4.64);
        let count = T::lit;
        Self {
            cpu_power_w: LayerMap([T::zero(), w, w, w, w, w]),
            cpus: LayerMap([T::zero(), count(1.0), count(2.0), count(4.0), count(4.0), count(10.0)]),
        }
    }
}

impl<T: Scalar> ProcessingParams<T> {
    /// Maximum processing power of one host in `layer` (RMP, CMP, GMP, UMP, LMP).
    pub fn max_power(&self, layer: LayerKind) -> T {
        self.cpu_power_w[layer] * self.cpus[layer]
    }
}

/// Normalised workload `W_vc` of one VM of each type on each candidate layer.
#[derive(Clone, Debug, PartialEq)]
pub struct WorkloadTable<T> {
    /// One row per VM type: relay, coordinator, gateway, ONU, OLT.
    pub rows: Vec<[T; 5]>,
}

impl<T: Scalar> WorkloadTable<T> {
    /// Heterogeneous types: 10% to 40% of a relay CPU.
    pub fn heterogeneous() -> Self {
        let row = |k: f64| [0.1, 0.05, 0.025, 0.025, 0.01].map(|w| T::lit(w * k));
        Self { rows: vec![row(1.0), row(2.0), row(3.0), row(4.0)] }
    }

    /// Four types that all use 40% of a relay CPU.
    pub fn homogeneous() -> Self {
        let row = [0.4, 0.2, 0.1, 0.1, 0.04].map(T::lit);
        Self { rows: vec![row; 4] }
    }

    pub fn get(&self, vm_type: usize, layer: LayerKind) -> Result<T> {
        let row = self
            .rows
            .get(vm_type)
            .ok_or_else(|| Error::Model(format!("no workload row for vm type {vm_type}")))?;
        match layer {
            LayerKind::Object => Err(Error::Model("objects cannot host VMs".into())),
            other => Ok(row[other.index() - 1]),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scenario {
    /// Heterogeneous VM CPU demands.
    One,
    /// Homogeneous 40% demands.
    Two,
    /// As `Two`, with an OLT CPU drawing twice the power.
    Three,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::One, Scenario::Two, Scenario::Three];

    pub fn number(self) -> u8 {
        match self {
            Scenario::One => 1,
            Scenario::Two => 2,
            Scenario::Three => 3,
        }
    }

    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            1 => Ok(Scenario::One),
            2 => Ok(Scenario::Two),
            3 => Ok(Scenario::Three),
            other => Err(Error::Config(format!("scenario must be 1, 2 or 3, got {other}"))),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// Everything the objective depends on besides the instance.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams<T> {
    pub energy: EnergyParams<T>,
    pub processing: ProcessingParams<T>,
    pub workloads: WorkloadTable<T>,
    /// Unprocessed rate each object sends to its VM, bps.
    pub demand_bps: T,
    /// Fraction `r` of traffic removed by processing.
    pub reduction: T,
    /// Enforce `TW_c <= 1`.
    pub capacity_enforced: bool,
    pub scenario: Scenario,
    /// Big-M linking VM traffic to `I_vc` in the emitted model (bps).
    pub beta: T,
    /// Big-M linking VM count to `H_c` in the emitted model.
    pub gamma: T,
}

impl<T: Scalar> ModelParams<T> {
    pub fn for_scenario(scenario: Scenario, reduction: T) -> Self {
        let mut processing = ProcessingParams::default();
        let workloads = match scenario {
            Scenario::One => WorkloadTable::heterogeneous(),
            Scenario::Two | Scenario::Three => WorkloadTable::homogeneous(),
        };
        if scenario == Scenario::Three {
            processing.cpu_power_w[LayerKind::Olt] = T::lit(9.28);
        }
        Self {
            energy: EnergyParams::default(),
            processing,
            workloads,
            demand_bps: T::lit(5000.0),
            reduction,
            capacity_enforced: true,
            scenario,
            beta: T::lit(1e7),
            gamma: T::lit(50.0),
        }
    }

    /// Fraction `f = 1 - r` of cloudlet input that leaves as processed traffic.
    pub fn remaining_fraction(&self) -> T {
        T::one() - self.reduction
    }

    pub fn vm_power(&self, vm_type: usize, layer: LayerKind) -> Result<T> {
        Ok(self.workloads.get(vm_type, layer)? * self.processing.max_power(layer))
    }

    /// Checks parameter ranges and that every requested VM type has a workload row.
    pub fn validate(&self, vm_types: usize) -> Result<()> {
        self.energy.validate()?;
        if !(self.reduction >= T::zero() && self.reduction < T::one()) {
            return Err(Error::Config(format!("reduction must lie in [0, 1), got {}", self.reduction)));
        }
        if !(self.demand_bps.is_finite() && self.demand_bps >= T::zero()) {
            return Err(Error::Config("demand must be finite and nonnegative".into()));
        }
        if self.workloads.rows.len() < vm_types {
            return Err(Error::Model(format!(
                "instance uses {vm_types} vm types but the workload table has {}",
                self.workloads.rows.len()
            )));
        }
        let bad_row = self.workloads.rows.iter().flatten().any(|w| !w.is_finite() || *w < T::zero());
        let bad_cpu = LayerKind::CANDIDATES.iter().any(|&l| {
            let mp = self.processing.max_power(l);
            !mp.is_finite() || mp < T::zero()
        });
        if bad_row || bad_cpu {
            return Err(Error::Config("workloads and CPU powers must be finite and nonnegative".into()));
        }
        Ok(())
    }
}

/// Power breakdown of one solution, in watts.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerReport<T> {
    pub processing_w: LayerMap<T>,
    /// Traffic power before the `A` weighting.
    pub traffic_raw_w: LayerMap<T>,
    /// Traffic power as it enters the objective.
    pub traffic_scaled_w: LayerMap<T>,
    pub total_w: T,
}

impl<T: Scalar> PowerReport<T> {
    pub fn zero() -> Self {
        Self {
            processing_w: LayerMap::zeros(),
            traffic_raw_w: LayerMap::zeros(),
            traffic_scaled_w: LayerMap::zeros(),
            total_w: T::zero(),
        }
    }

    pub fn processing_total(&self) -> T {
        self.processing_w.sum()
    }

    pub fn traffic_total(&self) -> T {
        self.traffic_scaled_w.sum()
    }

    /// Recombines the stored components into the objective.
    pub fn recompute_total(&self) -> T {
        self.processing_total() + self.traffic_total()
    }

    /// One record per layer and a closing `total` record, in the column
    /// order of [`REPORT_CSV_HEADER`].
    pub fn csv_records(&self, scenario: Scenario, reduction: T) -> Vec<[String; 7]> {
        let pct = format_pct(reduction);
        let mut out = Vec::with_capacity(7);
        for layer in LayerKind::ALL {
            let layer_total = self.processing_w[layer] + self.traffic_scaled_w[layer];
            out.push([
                scenario.to_string(),
                pct.clone(),
                layer.name().to_string(),
                fmt_num(self.processing_w[layer]),
                fmt_num(self.traffic_raw_w[layer]),
                fmt_num(self.traffic_scaled_w[layer]),
                fmt_num(layer_total),
            ]);
        }
        out.push([
            scenario.to_string(),
            pct,
            "total".to_string(),
            fmt_num(self.processing_total()),
            fmt_num(self.traffic_raw_w.sum()),
            fmt_num(self.traffic_total()),
            fmt_num(self.total_w),
        ]);
        out
    }

    pub fn write_csv_rows<W: Write>(&self, w: &mut csv::Writer<W>, scenario: Scenario, reduction: T) -> Result<()> {
        for record in self.csv_records(scenario, reduction) {
            w.write_record(&record)?;
        }
        Ok(())
    }
}

pub const REPORT_CSV_HEADER: [&str; 7] =
    ["scenario", "reduction_pct", "layer", "processing_w", "traffic_w_raw", "traffic_w_scaled", "total_w"];

pub(crate) fn fmt_num<T: Scalar>(v: T) -> String {
    v.as_f64().to_string()
}

pub(crate) fn format_pct<T: Scalar>(r: T) -> String {
    let pct = (r.as_f64() * 100.0 * 1e9).round() / 1e9;
    pct.to_string()
}

/// Energy charged per bit carried on `link`, with the objective's `A`
/// weighting applied at each endpoint.
pub fn link_cost_per_bit<T: Scalar>(instance: &NetworkInstance<T>, link: LinkId, params: &ModelParams<T>) -> Result<T> {
    let link = instance.link(link);
    let (src, dst) = (instance.layer(link.src), instance.layer(link.dst));
    let e = &params.energy;
    let (Some(tx), Some(rx)) = (e.transmit(src), e.receive(dst)) else {
        return Err(Error::Model(format!("no energy role for a {src} -> {dst} link")));
    };
    let amplifier = match link.medium {
        Medium::Wireless => e.epsilon * link.squared_distance(),
        Medium::Ethernet | Medium::Fiber => T::zero(),
    };
    Ok(e.weight(src) * (tx + amplifier) + e.weight(dst) * rx)
}

/// Per-bit cost of every link, indexed by link id.
pub fn link_costs<T: Scalar>(instance: &NetworkInstance<T>, params: &ModelParams<T>) -> Result<Vec<T>> {
    (0..instance.links().len()).map(|l| link_cost_per_bit(instance, l, params)).collect()
}

/// Unweighted traffic power per layer.
pub fn traffic_power<T: Scalar>(
    flows: &FlowAssignment<T>,
    instance: &NetworkInstance<T>,
    params: &ModelParams<T>,
) -> Result<LayerMap<T>> {
    let n = instance.links().len();
    if flows.upt.len() != n || flows.pt.len() != n {
        return Err(Error::Validation(format!(
            "flow vectors cover {}/{} links, instance has {n}",
            flows.upt.len(),
            flows.pt.len()
        )));
    }
    let e = &params.energy;
    let mut power = LayerMap::zeros();
    for (id, link) in instance.links().iter().enumerate() {
        let rate = flows.upt[id] + flows.pt[id];
        if rate == T::zero() {
            continue;
        }
        let (src, dst) = (instance.layer(link.src), instance.layer(link.dst));
        let (Some(tx), Some(rx)) = (e.transmit(src), e.receive(dst)) else {
            return Err(Error::Model(format!("no energy role for a {src} -> {dst} link")));
        };
        let amplifier = match link.medium {
            Medium::Wireless => e.epsilon * link.squared_distance(),
            _ => T::zero(),
        };
        power[src] += rate * (tx + amplifier);
        power[dst] += rate * rx;
    }
    Ok(power)
}

/// Processing power per layer: `TW_c * MP_layer(c)` summed over open cloudlets.
pub fn processing_power<T: Scalar>(
    solution: &PlacementSolution<T>,
    instance: &NetworkInstance<T>,
    params: &ModelParams<T>,
) -> Result<LayerMap<T>> {
    let mut power = LayerMap::zeros();
    for (slot, &c) in solution.candidates().iter().enumerate() {
        if !solution.cloudlet_open[slot] {
            continue;
        }
        let load = solution.workload[slot];
        if params.capacity_enforced && load > T::one() + T::capacity_slack() {
            return Err(Error::Capacity { node: c, workload: load.as_f64() });
        }
        let layer = instance.layer(c);
        power[layer] += load * params.processing.max_power(layer);
    }
    Ok(power)
}

/// The weighted total of processing and traffic power.
pub fn total_objective<T: Scalar>(
    solution: &PlacementSolution<T>,
    flows: &FlowAssignment<T>,
    instance: &NetworkInstance<T>,
    params: &ModelParams<T>,
) -> Result<PowerReport<T>> {
    let processing_w = processing_power(solution, instance, params)?;
    let traffic_raw_w = traffic_power(flows, instance, params)?;
    let mut traffic_scaled_w = traffic_raw_w;
    for layer in LayerKind::ALL {
        traffic_scaled_w[layer] = traffic_raw_w[layer] * params.energy.weight(layer);
    }
    let mut report = PowerReport { processing_w, traffic_raw_w, traffic_scaled_w, total_w: T::zero() };
    report.total_w = report.recompute_total();
    Ok(report)
}
