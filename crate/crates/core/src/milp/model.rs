//! Symbolic mixed integer program over the full flow formulation.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::Result;
use crate::power::{link_cost_per_bit, ModelParams};
use crate::scalar::Scalar;
use crate::topology::{LayerKind, LinkId, NetworkInstance, NodeId};

/// A model variable, identified by the nodes it refers to. Names are stable
/// across runs and decode back to the same key.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    /// Demand of `object` for type `vm` served at `cloudlet` (`xo`).
    Demand { object: NodeId, vm: usize, cloudlet: NodeId },
    /// Unprocessed traffic from `object` to `cloudlet` (`yo`).
    ObjectToCloudlet { object: NodeId, cloudlet: NodeId },
    /// Share of the object-cloudlet commodity on link `src -> dst` (`xu`).
    UnprocessedOnLink { object: NodeId, cloudlet: NodeId, src: NodeId, dst: NodeId },
    /// Processed traffic from `cloudlet` to `olt` (`zp`).
    Processed { cloudlet: NodeId, olt: NodeId },
    /// Share of the processed commodity on link `src -> dst` (`xp`).
    ProcessedOnLink { cloudlet: NodeId, olt: NodeId, src: NodeId, dst: NodeId },
    /// Total unprocessed traffic on a link (`lu`).
    UnprocessedTotal { src: NodeId, dst: NodeId },
    /// Total processed traffic on a link (`lp`).
    ProcessedTotal { src: NodeId, dst: NodeId },
    /// VM of type `vm` placed at `cloudlet` (`Iv`), binary.
    Placed { cloudlet: NodeId, vm: usize },
    /// Cloudlet built at `cloudlet` (`H`), binary.
    Open { cloudlet: NodeId },
    /// Normalised workload at `cloudlet` (`TW`).
    Workload { cloudlet: NodeId },
}

impl Var {
    pub fn is_binary(&self) -> bool {
        matches!(self, Var::Placed { .. } | Var::Open { .. })
    }

    pub fn name(&self) -> String {
        self.to_string()
    }

    /// Inverse of [`name`](Self::name).
    pub fn parse(name: &str) -> Option<Var> {
        let (prefix, rest) = name.split_once('_')?;
        let nums: Vec<usize> = rest.split('_').map(|p| p.parse().ok()).collect::<Option<_>>()?;
        let var = match (prefix, nums.as_slice()) {
            ("xo", &[object, vm, cloudlet]) => Var::Demand { object, vm, cloudlet },
            ("yo", &[object, cloudlet]) => Var::ObjectToCloudlet { object, cloudlet },
            ("xu", &[object, cloudlet, src, dst]) => Var::UnprocessedOnLink { object, cloudlet, src, dst },
            ("zp", &[cloudlet, olt]) => Var::Processed { cloudlet, olt },
            ("xp", &[cloudlet, olt, src, dst]) => Var::ProcessedOnLink { cloudlet, olt, src, dst },
            ("lu", &[src, dst]) => Var::UnprocessedTotal { src, dst },
            ("lp", &[src, dst]) => Var::ProcessedTotal { src, dst },
            ("Iv", &[cloudlet, vm]) => Var::Placed { cloudlet, vm },
            ("H", &[cloudlet]) => Var::Open { cloudlet },
            ("TW", &[cloudlet]) => Var::Workload { cloudlet },
            _ => return None,
        };
        Some(var)
    }

    fn describe(&self) -> String {
        match *self {
            Var::Demand { object, vm, cloudlet } => {
                format!("demand of object {object} for vm type {vm} served at {cloudlet} (bps)")
            }
            Var::ObjectToCloudlet { object, cloudlet } => {
                format!("unprocessed traffic object {object} -> cloudlet {cloudlet} (bps)")
            }
            Var::UnprocessedOnLink { object, cloudlet, src, dst } => {
                format!("unprocessed traffic object {object} -> cloudlet {cloudlet} on link {src}->{dst} (bps)")
            }
            Var::Processed { cloudlet, olt } => format!("processed traffic cloudlet {cloudlet} -> olt {olt} (bps)"),
            Var::ProcessedOnLink { cloudlet, olt, src, dst } => {
                format!("processed traffic cloudlet {cloudlet} -> olt {olt} on link {src}->{dst} (bps)")
            }
            Var::UnprocessedTotal { src, dst } => format!("total unprocessed traffic on link {src}->{dst} (bps)"),
            Var::ProcessedTotal { src, dst } => format!("total processed traffic on link {src}->{dst} (bps)"),
            Var::Placed { cloudlet, vm } => format!("vm type {vm} placed at {cloudlet}"),
            Var::Open { cloudlet } => format!("cloudlet built at {cloudlet}"),
            Var::Workload { cloudlet } => format!("normalised workload at {cloudlet}"),
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Var::Demand { object, vm, cloudlet } => write!(f, "xo_{object}_{vm}_{cloudlet}"),
            Var::ObjectToCloudlet { object, cloudlet } => write!(f, "yo_{object}_{cloudlet}"),
            Var::UnprocessedOnLink { object, cloudlet, src, dst } => {
                write!(f, "xu_{object}_{cloudlet}_{src}_{dst}")
            }
            Var::Processed { cloudlet, olt } => write!(f, "zp_{cloudlet}_{olt}"),
            Var::ProcessedOnLink { cloudlet, olt, src, dst } => write!(f, "xp_{cloudlet}_{olt}_{src}_{dst}"),
            Var::UnprocessedTotal { src, dst } => write!(f, "lu_{src}_{dst}"),
            Var::ProcessedTotal { src, dst } => write!(f, "lp_{src}_{dst}"),
            Var::Placed { cloudlet, vm } => write!(f, "Iv_{cloudlet}_{vm}"),
            Var::Open { cloudlet } => write!(f, "H_{cloudlet}"),
            Var::Workload { cloudlet } => write!(f, "TW_{cloudlet}"),
        }
    }
}

/// Constraint families of the formulation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// Each object's demand is fully served.
    DemandSplit,
    /// Object-cloudlet traffic equals the demand served there.
    ObjectCloudlet,
    /// Conservation of every object-cloudlet commodity.
    UnprocessedConservation,
    /// Link totals of unprocessed traffic.
    UnprocessedTotal,
    /// Processed output is the remaining fraction of cloudlet input.
    ProcessedRate,
    /// Conservation of every cloudlet-OLT commodity over candidate nodes.
    ProcessedConservation,
    /// Link totals of processed traffic.
    ProcessedTotal,
    /// A placed VM carries at least 1 bps.
    PlacementLower,
    /// Traffic to a VM requires it to be placed.
    PlacementUpper,
    /// A built cloudlet hosts at least one VM.
    CloudletLower,
    /// A hosted VM requires a built cloudlet.
    CloudletUpper,
    /// Workload bookkeeping.
    Workload,
    /// Workload within one CPU.
    Capacity,
}

impl Family {
    pub const ALL: [Family; 13] = [
        Family::DemandSplit,
        Family::ObjectCloudlet,
        Family::UnprocessedConservation,
        Family::UnprocessedTotal,
        Family::ProcessedRate,
        Family::ProcessedConservation,
        Family::ProcessedTotal,
        Family::PlacementLower,
        Family::PlacementUpper,
        Family::CloudletLower,
        Family::CloudletUpper,
        Family::Workload,
        Family::Capacity,
    ];

    /// Row-name prefix and family label in reports.
    pub fn tag(self) -> &'static str {
        match self {
            Family::DemandSplit => "c13",
            Family::ObjectCloudlet => "c14",
            Family::UnprocessedConservation => "c15",
            Family::UnprocessedTotal => "c16",
            Family::ProcessedRate => "c17",
            Family::ProcessedConservation => "c18",
            Family::ProcessedTotal => "c19",
            Family::PlacementLower => "c20",
            Family::PlacementUpper => "c21",
            Family::CloudletLower => "c22",
            Family::CloudletUpper => "c23",
            Family::Workload => "c24",
            Family::Capacity => "cap",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row<T> {
    pub family: Family,
    /// Row identifier without the family prefix, e.g. `o3_c17_x9`.
    pub id: String,
    pub terms: Vec<(usize, T)>,
    pub sense: Sense,
    pub rhs: T,
}

impl<T> Row<T> {
    pub fn name(&self) -> String {
        format!("{}_{}", self.family.tag(), self.id)
    }
}

/// The assembled model. Variables are indexed by position in `vars`.
#[derive(Clone, Debug)]
pub struct MilpModel<T> {
    pub vars: Vec<Var>,
    pub rows: Vec<Row<T>>,
    pub objective: Vec<(usize, T)>,
    index: HashMap<Var, usize>,
}

/// Variable and row counts, for audits and round-trip checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelCounts {
    pub binaries: usize,
    pub continuous: usize,
    pub rows: usize,
    pub placed: usize,
    pub open: usize,
    pub rows_per_family: BTreeMap<Family, usize>,
}

impl<T: Scalar> MilpModel<T> {
    fn new() -> Self {
        Self { vars: Vec::new(), rows: Vec::new(), objective: Vec::new(), index: HashMap::new() }
    }

    fn var(&mut self, v: Var) -> usize {
        if let Some(&i) = self.index.get(&v) {
            return i;
        }
        let i = self.vars.len();
        self.vars.push(v);
        self.index.insert(v, i);
        i
    }

    pub fn index_of(&self, v: &Var) -> Option<usize> {
        self.index.get(v).copied()
    }

    fn row(&mut self, family: Family, id: String, terms: Vec<(usize, T)>, sense: Sense, rhs: T) {
        self.rows.push(Row { family, id, terms, sense, rhs });
    }

    pub fn counts(&self) -> ModelCounts {
        let binaries = self.vars.iter().filter(|v| v.is_binary()).count();
        let mut rows_per_family = BTreeMap::new();
        for r in &self.rows {
            *rows_per_family.entry(r.family).or_insert(0) += 1;
        }
        ModelCounts {
            binaries,
            continuous: self.vars.len() - binaries,
            rows: self.rows.len(),
            placed: self.vars.iter().filter(|v| matches!(v, Var::Placed { .. })).count(),
            open: self.vars.iter().filter(|v| matches!(v, Var::Open { .. })).count(),
            rows_per_family,
        }
    }

    /// Objective value and the residual of every row under `values`
    /// (indexed like `vars`). Residuals are positive when violated.
    pub fn evaluate(&self, values: &[T]) -> (T, Vec<T>) {
        let dot = |terms: &[(usize, T)]| terms.iter().map(|&(i, c)| c * values[i]).sum::<T>();
        let objective = dot(&self.objective);
        let residuals = self
            .rows
            .iter()
            .map(|r| {
                let lhs = dot(&r.terms);
                match r.sense {
                    Sense::Le => (lhs - r.rhs).max(T::zero()),
                    Sense::Ge => (r.rhs - lhs).max(T::zero()),
                    Sense::Eq => (lhs - r.rhs).abs(),
                }
            })
            .collect();
        (objective, residuals)
    }

    /// `name,kind,description` lines describing every variable.
    pub fn name_map(&self) -> String {
        let mut out = String::from("name,kind,description\n");
        for v in &self.vars {
            let kind = if v.is_binary() { "binary" } else { "continuous" };
            out.push_str(&format!("{v},{kind},\"{}\"\n", v.describe()));
        }
        out
    }
}

/// Nodes lying on some uplink path from `from` to `to`, using only nodes
/// accepted by `allow`.
fn nodes_between<T: Scalar>(
    instance: &NetworkInstance<T>,
    reach_from: &[bool],
    to: NodeId,
    allow: &dyn Fn(NodeId) -> bool,
) -> Vec<bool> {
    let n = instance.nodes().len();
    let mut reaches_to = vec![false; n];
    if !reach_from[to] {
        return reaches_to;
    }
    reaches_to[to] = true;
    let mut stack = vec![to];
    while let Some(x) = stack.pop() {
        for &l in instance.in_links(x) {
            let y = instance.link(l).src;
            if !reaches_to[y] && reach_from[y] && allow(y) {
                reaches_to[y] = true;
                stack.push(y);
            }
        }
    }
    reaches_to
}

fn reachable_from<T: Scalar>(instance: &NetworkInstance<T>, from: NodeId, allow: &dyn Fn(NodeId) -> bool) -> Vec<bool> {
    let mut seen = vec![false; instance.nodes().len()];
    seen[from] = true;
    let mut stack = vec![from];
    while let Some(x) = stack.pop() {
        for &l in instance.out_links(x) {
            let y = instance.link(l).dst;
            if !seen[y] && allow(y) {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen
}

/// Adds one commodity's link variables and conservation rows.
#[allow(clippy::too_many_arguments)]
fn commodity<T: Scalar>(
    model: &mut MilpModel<T>,
    instance: &NetworkInstance<T>,
    on_path: &[bool],
    source: NodeId,
    sink: NodeId,
    rate_var: usize,
    family: Family,
    row_prefix: &str,
    link_var: &dyn Fn(NodeId, NodeId) -> Var,
    per_link: &mut [Vec<usize>],
) {
    let mut vars_on: HashMap<LinkId, usize> = HashMap::new();
    for (x, _) in on_path.iter().enumerate().filter(|(_, &on)| on) {
        for &l in instance.out_links(x) {
            let y = instance.link(l).dst;
            if on_path[y] {
                let v = model.var(link_var(x, y));
                vars_on.insert(l, v);
                per_link[l].push(v);
            }
        }
    }
    for (x, _) in on_path.iter().enumerate().filter(|(_, &on)| on) {
        let mut terms: Vec<(usize, T)> = Vec::new();
        for &l in instance.out_links(x) {
            if let Some(&v) = vars_on.get(&l) {
                terms.push((v, T::one()));
            }
        }
        for &l in instance.in_links(x) {
            if let Some(&v) = vars_on.get(&l) {
                terms.push((v, -T::one()));
            }
        }
        if x == source {
            terms.push((rate_var, -T::one()));
        }
        if x == sink {
            terms.push((rate_var, T::one()));
        }
        model.row(family, format!("{row_prefix}_x{x}"), terms, Sense::Eq, T::zero());
    }
}

/// Builds the full formulation. Object-cloudlet variables exist only for
/// cloudlets in the object's own network or at the OLT; processed traffic is
/// confined to candidate nodes and a cloudlet at the OLT emits none.
pub fn build_model<T: Scalar>(instance: &NetworkInstance<T>, params: &ModelParams<T>) -> Result<MilpModel<T>> {
    params.validate(instance.vm_types())?;
    let mut model = MilpModel::new();
    let vm_types = instance.vm_types();
    let olt = instance.olt();
    let f = params.remaining_fraction();
    let is_candidate = |x: NodeId| instance.layer(x).is_candidate();
    let any = |_: NodeId| true;

    // Placement, cloudlet and workload variables for every candidate.
    for &c in instance.candidates() {
        for v in 0..vm_types {
            model.var(Var::Placed { cloudlet: c, vm: v });
        }
        model.var(Var::Open { cloudlet: c });
        model.var(Var::Workload { cloudlet: c });
    }

    let mut upt_on_link: Vec<Vec<usize>> = vec![Vec::new(); instance.links().len()];
    let mut pt_on_link: Vec<Vec<usize>> = vec![Vec::new(); instance.links().len()];
    let mut inflow: BTreeMap<NodeId, Vec<usize>> = BTreeMap::new();
    let mut served: BTreeMap<(NodeId, usize), Vec<usize>> = BTreeMap::new();

    for &o in instance.objects() {
        let v = instance.vm_request(o).expect("objects carry a request");
        let network = instance.node(o).network;
        let reach = reachable_from(instance, o, &any);
        let mut split = Vec::new();
        for &c in instance.candidates() {
            if !instance.serves_network(c, network) || !reach[c] {
                continue;
            }
            let xo = model.var(Var::Demand { object: o, vm: v, cloudlet: c });
            let yo = model.var(Var::ObjectToCloudlet { object: o, cloudlet: c });
            split.push((xo, T::one()));
            served.entry((c, v)).or_default().push(xo);
            inflow.entry(c).or_default().push(yo);
            model.row(
                Family::ObjectCloudlet,
                format!("o{o}_c{c}"),
                vec![(yo, T::one()), (xo, -T::one())],
                Sense::Eq,
                T::zero(),
            );
            let on_path = nodes_between(instance, &reach, c, &any);
            commodity(
                &mut model,
                instance,
                &on_path,
                o,
                c,
                yo,
                Family::UnprocessedConservation,
                &format!("o{o}_c{c}"),
                &|src, dst| Var::UnprocessedOnLink { object: o, cloudlet: c, src, dst },
                &mut upt_on_link,
            );
        }
        model.row(Family::DemandSplit, format!("o{o}"), split, Sense::Eq, params.demand_bps);
    }

    for &c in instance.candidates() {
        if c == olt {
            continue;
        }
        let zp = model.var(Var::Processed { cloudlet: c, olt });
        let mut terms = vec![(zp, T::one())];
        for &yo in inflow.get(&c).map(Vec::as_slice).unwrap_or(&[]) {
            terms.push((yo, -f));
        }
        model.row(Family::ProcessedRate, format!("c{c}"), terms, Sense::Eq, T::zero());

        let reach = reachable_from(instance, c, &is_candidate);
        let on_path = nodes_between(instance, &reach, olt, &is_candidate);
        commodity(
            &mut model,
            instance,
            &on_path,
            c,
            olt,
            zp,
            Family::ProcessedConservation,
            &format!("c{c}_l{olt}"),
            &|src, dst| Var::ProcessedOnLink { cloudlet: c, olt, src, dst },
            &mut pt_on_link,
        );
    }

    for (l, link) in instance.links().iter().enumerate() {
        let cost = link_cost_per_bit(instance, l, params)?;
        let lu = model.var(Var::UnprocessedTotal { src: link.src, dst: link.dst });
        let mut terms = vec![(lu, T::one())];
        terms.extend(upt_on_link[l].iter().map(|&v| (v, -T::one())));
        model.row(Family::UnprocessedTotal, format!("x{}_y{}", link.src, link.dst), terms, Sense::Eq, T::zero());
        model.objective.push((lu, cost));

        if is_candidate(link.src) && is_candidate(link.dst) {
            let lp = model.var(Var::ProcessedTotal { src: link.src, dst: link.dst });
            let mut terms = vec![(lp, T::one())];
            terms.extend(pt_on_link[l].iter().map(|&v| (v, -T::one())));
            model.row(Family::ProcessedTotal, format!("x{}_y{}", link.src, link.dst), terms, Sense::Eq, T::zero());
            model.objective.push((lp, cost));
        }
    }

    for &c in instance.candidates() {
        let layer: LayerKind = instance.layer(c);
        let open = model.var(Var::Open { cloudlet: c });
        let tw = model.var(Var::Workload { cloudlet: c });
        let mut count = Vec::new();
        let mut workload = vec![(tw, T::one())];
        for v in 0..vm_types {
            let placed = model.var(Var::Placed { cloudlet: c, vm: v });
            let traffic: Vec<(usize, T)> =
                served.get(&(c, v)).map(|xs| xs.iter().map(|&x| (x, T::one())).collect()).unwrap_or_default();
            let mut lower = traffic.clone();
            lower.push((placed, -T::one()));
            model.row(Family::PlacementLower, format!("c{c}_v{v}"), lower, Sense::Ge, T::zero());
            let mut upper = traffic;
            upper.push((placed, -params.beta));
            model.row(Family::PlacementUpper, format!("c{c}_v{v}"), upper, Sense::Le, T::zero());
            count.push((placed, T::one()));
            workload.push((placed, -params.workloads.get(v, layer)?));
        }
        let mut lower = count.clone();
        lower.push((open, -T::one()));
        model.row(Family::CloudletLower, format!("c{c}"), lower, Sense::Ge, T::zero());
        let mut upper = count;
        upper.push((open, -params.gamma));
        model.row(Family::CloudletUpper, format!("c{c}"), upper, Sense::Le, T::zero());
        model.row(Family::Workload, format!("c{c}"), workload, Sense::Eq, T::zero());
        if params.capacity_enforced {
            model.row(Family::Capacity, format!("c{c}"), vec![(tw, T::one())], Sense::Le, T::one());
        }
        model.objective.push((tw, params.processing.max_power(layer)));
    }

    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::power::Scenario;
    use crate::topology::{build_instance, TopologyConfig};

    fn chain() -> NetworkInstance<f64> {
        build_instance(&TopologyConfig { networks: 1, objects_per_network: 1, relays_per_network: 1, vm_types: 1, ..Default::default() })
            .unwrap()
    }

    #[test]
    fn minimal_chain_binaries() {
        let inst = chain();
        let model = build_model(&inst, &ModelParams::for_scenario(Scenario::One, 0.9)).unwrap();
        let counts = model.counts();
        assert_eq!(counts.placed, 5);
        assert_eq!(counts.open, 5);
        assert_eq!(counts.binaries, 10);
    }

    #[test]
    fn full_instance_binaries() {
        let inst = build_instance(&TopologyConfig::<f64>::paper()).unwrap();
        let model = build_model(&inst, &ModelParams::for_scenario(Scenario::One, 0.9)).unwrap();
        let counts = model.counts();
        assert_eq!(counts.open, 57);
        assert_eq!(counts.placed, 4 * 57);
        // every object sees its 28 own-network candidates plus the OLT
        let demand_vars = model.vars.iter().filter(|v| matches!(v, Var::Demand { .. })).count();
        assert_eq!(demand_vars, 100 * 29);
        // and none in the other network
        for v in &model.vars {
            if let Var::Demand { object, cloudlet, .. } = *v {
                assert!(inst.serves_network(cloudlet, inst.node(object).network));
            }
        }
    }

    #[test]
    fn olt_cloudlet_has_no_processed_variables() {
        let inst = chain();
        let model = build_model(&inst, &ModelParams::for_scenario(Scenario::One, 0.0)).unwrap();
        let olt = inst.olt();
        assert!(model.index_of(&Var::Processed { cloudlet: olt, olt }).is_none());
        let rate_rows = model.rows.iter().filter(|r| r.family == Family::ProcessedRate).count();
        assert_eq!(rate_rows, 4);
    }

    #[test]
    fn remaining_fraction_one_is_identity() {
        let inst = chain();
        let model = build_model(&inst, &ModelParams::for_scenario(Scenario::One, 0.0)).unwrap();
        for row in model.rows.iter().filter(|r| r.family == Family::ProcessedRate) {
            let coeffs: Vec<f64> = row.terms.iter().map(|t| t.1).collect();
            assert_eq!(coeffs, vec![1.0, -1.0]);
        }
    }

    #[test]
    fn empty_instance_has_no_demand_rows() {
        let inst = build_instance(&TopologyConfig::<f64> { objects_per_network: 0, ..TopologyConfig::reduced() }).unwrap();
        let model = build_model(&inst, &ModelParams::for_scenario(Scenario::Two, 0.5)).unwrap();
        assert_eq!(model.counts().rows_per_family.get(&Family::DemandSplit), None);
    }

    #[test]
    fn names_round_trip() {
        let inst = build_instance(&TopologyConfig::<f64>::reduced_with(1, 2, 2)).unwrap();
        let model = build_model(&inst, &ModelParams::for_scenario(Scenario::One, 0.5)).unwrap();
        for v in &model.vars {
            assert_eq!(Var::parse(&v.name()), Some(*v));
        }
    }

    #[test]
    fn capacity_rows_follow_the_flag() {
        let inst = chain();
        let mut params = ModelParams::for_scenario(Scenario::One, 0.5);
        let with = build_model(&inst, &params).unwrap().counts();
        params.capacity_enforced = false;
        let without = build_model(&inst, &params).unwrap().counts();
        assert_eq!(with.rows - without.rows, 5);
    }

    #[test]
    fn rejects_vm_types_without_workloads() {
        let inst = build_instance(&TopologyConfig::<f64> { vm_types: 6, ..TopologyConfig::reduced() }).unwrap();
        assert!(build_model(&inst, &ModelParams::for_scenario(Scenario::Two, 0.5)).is_err());
    }
}
