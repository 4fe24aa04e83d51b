//! Independent check of a solution against every constraint family.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use super::model::Family;
use crate::error::Result;
use crate::power::{fmt_num, link_cost_per_bit, ModelParams};
use crate::scalar::Scalar;
use crate::solution::{CommodityFlow, FlowAssignment, PlacementSolution};
use crate::topology::{NetworkInstance, NodeId};

/// Flow residuals below this many bps are accepted.
const FLOW_TOLERANCE: f64 = 1e-6;
const WORKLOAD_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Violation<T> {
    /// Model family tag (`c13`..`c24`, `cap`) or `isolation`, `assignment`, `shape`.
    pub family: String,
    pub row: String,
    pub residual: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport<T> {
    pub violations: Vec<Violation<T>>,
    /// Objective recomputed from link rates and workloads.
    pub objective: T,
}

impl<T: Scalar> ValidationReport<T> {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    /// Number of violated rows per family.
    pub fn by_family(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        for v in &self.violations {
            *out.entry(v.family.clone()).or_insert(0) += 1;
        }
        out
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(w);
        w.write_record(["constraint_family", "row_id", "residual"])?;
        for v in &self.violations {
            w.write_record([v.family.as_str(), v.row.as_str(), &fmt_num(v.residual)])?;
        }
        w.flush()?;
        Ok(())
    }
}

struct Checker<T> {
    violations: Vec<Violation<T>>,
    flow_tol: T,
}

impl<T: Scalar> Checker<T> {
    fn flag(&mut self, family: impl Into<String>, row: String, residual: T) {
        self.violations.push(Violation { family: family.into(), row, residual });
    }

    fn flow(&mut self, family: Family, row: String, residual: T) {
        if residual.abs() > self.flow_tol {
            self.flag(family.tag(), row, residual.abs());
        }
    }
}

/// Checks `solution` and `flows` row by row. Violations are collected, never
/// raised.
pub fn validate_solution<T: Scalar>(
    solution: &PlacementSolution<T>,
    flows: &FlowAssignment<T>,
    instance: &NetworkInstance<T>,
    params: &ModelParams<T>,
) -> ValidationReport<T> {
    let mut ck = Checker { violations: Vec::new(), flow_tol: T::lit(FLOW_TOLERANCE) };
    let links = instance.links().len();
    let v_count = instance.vm_types();
    if solution.candidates() != instance.candidates()
        || solution.vm_types() != v_count
        || flows.upt.len() != links
        || flows.pt.len() != links
    {
        ck.flag("shape", "solution".into(), T::one());
        return ValidationReport { violations: ck.violations, objective: T::nan() };
    }
    let olt = instance.olt();
    let f = params.remaining_fraction();
    let slot_of = |c: NodeId| instance.candidate_slot(c);

    // demand split, isolation and per-(cloudlet, type) traffic
    let mut shares: HashMap<(NodeId, NodeId), T> = HashMap::new();
    let mut traffic = vec![T::zero(); solution.candidates().len() * v_count];
    let mut served: HashMap<NodeId, T> = HashMap::new();
    for a in &solution.assignment {
        if instance.vm_request(a.object) != Some(a.vm_type) {
            ck.flag("assignment", format!("o{}", a.object), T::one());
            continue;
        }
        let network = instance.node(a.object).network;
        for &(c, s) in &a.shares {
            let Some(slot) = slot_of(c) else {
                ck.flag("assignment", format!("o{}_c{c}", a.object), s);
                continue;
            };
            if !instance.serves_network(c, network) {
                ck.flag("isolation", format!("o{}_c{c}", a.object), s);
            }
            *shares.entry((a.object, c)).or_insert(T::zero()) += s;
            traffic[slot * v_count + a.vm_type] += s;
            *served.entry(a.object).or_insert(T::zero()) += s;
        }
    }
    for &o in instance.objects() {
        let got = served.get(&o).copied().unwrap_or(T::zero());
        ck.flow(Family::DemandSplit, format!("o{o}"), got - params.demand_bps);
    }

    // object-cloudlet commodities
    let mut commodity_rate: HashMap<(NodeId, NodeId), T> = HashMap::new();
    for c in &flows.unprocessed {
        *commodity_rate.entry((c.source, c.sink)).or_insert(T::zero()) += c.rate;
    }
    let mut pairs: Vec<(NodeId, NodeId)> = shares.keys().chain(commodity_rate.keys()).copied().collect();
    pairs.sort_unstable();
    pairs.dedup();
    let mut inflow = vec![T::zero(); solution.candidates().len()];
    for (o, c) in pairs {
        let s = shares.get(&(o, c)).copied().unwrap_or(T::zero());
        let r = commodity_rate.get(&(o, c)).copied().unwrap_or(T::zero());
        ck.flow(Family::ObjectCloudlet, format!("o{o}_c{c}"), r - s);
        if let Some(slot) = slot_of(c) {
            inflow[slot] += r;
        }
    }
    let upt_sum = conservation(&mut ck, instance, &flows.unprocessed, Family::UnprocessedConservation, "o", "c", false);
    for (l, link) in instance.links().iter().enumerate() {
        ck.flow(Family::UnprocessedTotal, format!("x{}_y{}", link.src, link.dst), flows.upt[l] - upt_sum[l]);
    }

    // processed commodities
    let mut processed_rate: HashMap<NodeId, T> = HashMap::new();
    for c in &flows.processed {
        if c.sink != olt || slot_of(c.source).is_none() || c.source == olt {
            ck.flag(Family::ProcessedRate.tag(), format!("c{}_l{}", c.source, c.sink), c.rate.abs());
            continue;
        }
        *processed_rate.entry(c.source).or_insert(T::zero()) += c.rate;
    }
    for (slot, &c) in solution.candidates().iter().enumerate() {
        if c == olt {
            continue;
        }
        let z = processed_rate.get(&c).copied().unwrap_or(T::zero());
        ck.flow(Family::ProcessedRate, format!("c{c}"), z - f * inflow[slot]);
    }
    let pt_sum = conservation(&mut ck, instance, &flows.processed, Family::ProcessedConservation, "c", "l", true);
    for (l, link) in instance.links().iter().enumerate() {
        ck.flow(Family::ProcessedTotal, format!("x{}_y{}", link.src, link.dst), flows.pt[l] - pt_sum[l]);
    }

    // placement, cloudlets and workloads
    let one = T::one();
    let cap = one + T::capacity_slack();
    let wl_tol = T::lit(WORKLOAD_TOLERANCE);
    for (slot, &c) in solution.candidates().iter().enumerate() {
        let layer = instance.layer(c);
        let mut any = false;
        let mut load = T::zero();
        for v in 0..v_count {
            let placed = solution.is_placed(slot, v);
            let t = traffic[slot * v_count + v];
            if placed && t < one - ck.flow_tol {
                ck.flag(Family::PlacementLower.tag(), format!("c{c}_v{v}"), one - t);
            }
            if !placed && t > ck.flow_tol {
                ck.flag(Family::PlacementUpper.tag(), format!("c{c}_v{v}"), t);
            }
            if placed {
                any = true;
                load += params.workloads.get(v, layer).unwrap_or(T::nan());
            }
        }
        let open = solution.cloudlet_open[slot];
        if any && !open {
            ck.flag(Family::CloudletLower.tag(), format!("c{c}"), one);
        }
        if open && !any {
            ck.flag(Family::CloudletUpper.tag(), format!("c{c}"), one);
        }
        let tw = solution.workload[slot];
        let gap = (tw - load).abs();
        if gap.is_nan() || gap > wl_tol {
            ck.flag(Family::Workload.tag(), format!("c{c}"), gap);
        }
        if params.capacity_enforced && tw > cap {
            ck.flag(Family::Capacity.tag(), format!("c{c}"), tw - one);
        }
    }

    let mut objective = T::zero();
    for (l, _) in instance.links().iter().enumerate() {
        let rate = flows.upt[l] + flows.pt[l];
        if rate != T::zero() {
            objective += rate * link_cost_per_bit(instance, l, params).unwrap_or(T::nan());
        }
    }
    for (slot, &c) in solution.candidates().iter().enumerate() {
        objective += solution.workload[slot] * params.processing.max_power(instance.layer(c));
    }
    ValidationReport { violations: ck.violations, objective }
}

/// Node balance rows of each commodity; returns per-link sums over commodities.
fn conservation<T: Scalar>(
    ck: &mut Checker<T>,
    instance: &NetworkInstance<T>,
    commodities: &[CommodityFlow<T>],
    family: Family,
    src_tag: &str,
    dst_tag: &str,
    candidates_only: bool,
) -> Vec<T> {
    let mut per_link = vec![T::zero(); instance.links().len()];
    for cm in commodities {
        let id = format!("{src_tag}{}_{dst_tag}{}", cm.source, cm.sink);
        let mut balance: BTreeMap<NodeId, T> = BTreeMap::new();
        balance.insert(cm.source, -cm.rate);
        *balance.entry(cm.sink).or_insert(T::zero()) += cm.rate;
        for &(l, r) in &cm.links {
            if l >= instance.links().len() {
                ck.flag(family.tag(), format!("{id}_link{l}"), r.abs());
                continue;
            }
            let link = instance.link(l);
            if r < -ck.flow_tol {
                ck.flag(family.tag(), format!("{id}_x{}_y{}", link.src, link.dst), -r);
            }
            if candidates_only && !(instance.layer(link.src).is_candidate() && instance.layer(link.dst).is_candidate()) {
                ck.flag(family.tag(), format!("{id}_x{}_y{}", link.src, link.dst), r.abs());
            }
            per_link[l] += r;
            *balance.entry(link.src).or_insert(T::zero()) += r;
            *balance.entry(link.dst).or_insert(T::zero()) -= r;
        }
        for (x, b) in balance {
            ck.flow(family, format!("{id}_x{x}"), b);
        }
    }
    per_link
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::{solve_exact, SearchLimits};
    use crate::power::Scenario;
    use crate::topology::{build_instance, TopologyConfig};

    fn solved() -> (NetworkInstance<f64>, ModelParams<f64>, PlacementSolution<f64>, FlowAssignment<f64>) {
        let inst = build_instance(&TopologyConfig::<f64>::reduced_with(2, 6, 2)).unwrap();
        let params = ModelParams::for_scenario(Scenario::One, 0.5);
        let out = solve_exact(&inst, &params, &SearchLimits::default()).unwrap();
        (inst, params, out.solution, out.flows)
    }

    #[test]
    fn exact_output_is_clean() {
        let (inst, params, sol, flows) = solved();
        let report = validate_solution(&sol, &flows, &inst, &params);
        assert!(report.is_clean(), "{:?}", report.violations);
        let direct = crate::power::total_objective(&sol, &flows, &inst, &params).unwrap().total_w;
        assert!((report.objective - direct).abs() <= 1e-12 * direct);
    }

    #[test]
    fn corrupted_link_flags_only_its_commodity() {
        let (inst, params, sol, mut flows) = solved();
        let cm = &mut flows.unprocessed[0];
        let (l, _) = cm.links[0];
        cm.links[0].1 += 1.0;
        flows.upt[l] += 1.0;
        let (o, c) = (cm.source, cm.sink);
        let report = validate_solution(&sol, &flows, &inst, &params);
        assert_eq!(report.violations.len(), 2, "{:?}", report.violations);
        let link = inst.link(l);
        for v in &report.violations {
            assert_eq!(v.family, "c15");
            assert!(v.row == format!("o{o}_c{c}_x{}", link.src) || v.row == format!("o{o}_c{c}_x{}", link.dst));
        }
    }

    #[test]
    fn dropped_vm_is_reported() {
        let (inst, params, mut sol, flows) = solved();
        let (slot, v) = (0..sol.candidates().len())
            .flat_map(|s| (0..sol.vm_types()).map(move |v| (s, v)))
            .find(|&(s, v)| sol.is_placed(s, v))
            .unwrap();
        sol.set_placed(slot, v, false);
        let report = validate_solution(&sol, &flows, &inst, &params);
        let fams = report.by_family();
        assert_eq!(fams.get("c21"), Some(&1));
        assert!(fams.contains_key("c24"));
    }

    #[test]
    fn csv_has_header_and_rows() {
        let (inst, params, sol, mut flows) = solved();
        flows.upt[0] += 5.0;
        let report = validate_solution(&sol, &flows, &inst, &params);
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("constraint_family,row_id,residual\n"));
        assert_eq!(text.lines().count(), 1 + report.violations.len());
    }
}
