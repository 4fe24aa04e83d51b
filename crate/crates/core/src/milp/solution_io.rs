//! Two-column `variable value` solution files, using the model's names.

use std::collections::BTreeMap;

use super::model::Var;
use crate::error::{Error, Result};
use crate::power::fmt_num;
use crate::scalar::Scalar;
use crate::solution::{Assignment, CommodityFlow, FlowAssignment, PlacementSolution};
use crate::topology::{LinkId, NetworkInstance, NodeId};

/// Nonzero model variables of a solution, in a stable order.
pub fn solution_values<T: Scalar>(
    instance: &NetworkInstance<T>,
    solution: &PlacementSolution<T>,
    flows: &FlowAssignment<T>,
) -> Vec<(Var, T)> {
    let mut out: BTreeMap<Var, T> = BTreeMap::new();
    let mut add = |v: Var, x: T| {
        if x != T::zero() {
            *out.entry(v).or_insert(T::zero()) += x;
        }
    };
    let olt = instance.olt();
    for (slot, &c) in solution.candidates().iter().enumerate() {
        for v in 0..solution.vm_types() {
            if solution.is_placed(slot, v) {
                add(Var::Placed { cloudlet: c, vm: v }, T::one());
            }
        }
        if solution.cloudlet_open[slot] {
            add(Var::Open { cloudlet: c }, T::one());
        }
        add(Var::Workload { cloudlet: c }, solution.workload[slot]);
    }
    for a in &solution.assignment {
        for &(c, s) in &a.shares {
            add(Var::Demand { object: a.object, vm: a.vm_type, cloudlet: c }, s);
        }
    }
    let ends = |l: LinkId| {
        let link = instance.link(l);
        (link.src, link.dst)
    };
    for cm in &flows.unprocessed {
        add(Var::ObjectToCloudlet { object: cm.source, cloudlet: cm.sink }, cm.rate);
        for &(l, r) in &cm.links {
            let (src, dst) = ends(l);
            add(Var::UnprocessedOnLink { object: cm.source, cloudlet: cm.sink, src, dst }, r);
        }
    }
    for cm in &flows.processed {
        add(Var::Processed { cloudlet: cm.source, olt }, cm.rate);
        for &(l, r) in &cm.links {
            let (src, dst) = ends(l);
            add(Var::ProcessedOnLink { cloudlet: cm.source, olt, src, dst }, r);
        }
    }
    for (l, link) in instance.links().iter().enumerate() {
        add(Var::UnprocessedTotal { src: link.src, dst: link.dst }, flows.upt[l]);
        add(Var::ProcessedTotal { src: link.src, dst: link.dst }, flows.pt[l]);
    }
    out.into_iter().collect()
}

/// Renders a solution as `name value` lines.
pub fn export_solution<T: Scalar>(
    instance: &NetworkInstance<T>,
    solution: &PlacementSolution<T>,
    flows: &FlowAssignment<T>,
) -> String {
    let mut out = String::new();
    for (var, x) in solution_values(instance, solution, flows) {
        out.push_str(&format!("{var} {}\n", fmt_num(x)));
    }
    out
}

/// Parses `name value` lines. Blank lines and lines starting with `#` are
/// skipped; a header line `variable value` is tolerated.
pub fn read_values<T: Scalar>(text: &str) -> Result<Vec<(Var, T)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let loc = || format!("line {}", i + 1);
        let mut parts = line.split_whitespace();
        let (Some(name), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::parse(loc(), "expected `variable value`"));
        };
        if i == 0 && name.eq_ignore_ascii_case("variable") {
            continue;
        }
        let var = Var::parse(name).ok_or_else(|| Error::parse(loc(), format!("unknown variable `{name}`")))?;
        let x: f64 = value.parse().map_err(|_| Error::parse(loc(), format!("bad number `{value}`")))?;
        out.push((var, T::lit(x)));
    }
    Ok(out)
}

/// Rebuilds a placement and flows from a solution file. Binaries are rounded
/// at one half; cloudlet flags and workloads are taken as given so that the
/// validator sees exactly what the file states.
pub fn import_solution<T: Scalar>(
    instance: &NetworkInstance<T>,
    text: &str,
) -> Result<(PlacementSolution<T>, FlowAssignment<T>)> {
    let values: Vec<(Var, T)> = read_values(text)?;
    let mut solution = PlacementSolution::empty(instance);
    let mut flows = FlowAssignment::zeros(instance.links().len());
    let half = T::lit(0.5);
    let slot = |c: NodeId| {
        instance.candidate_slot(c).ok_or_else(|| Error::parse(format!("node {c}"), "not a candidate node"))
    };
    let link = |src: NodeId, dst: NodeId| {
        instance.link_between(src, dst).ok_or_else(|| Error::parse(format!("link {src}->{dst}"), "no such link"))
    };
    let mut shares: BTreeMap<(NodeId, usize), Vec<(NodeId, T)>> = BTreeMap::new();
    let mut unprocessed: BTreeMap<(NodeId, NodeId), CommodityFlow<T>> = BTreeMap::new();
    let mut processed: BTreeMap<(NodeId, NodeId), CommodityFlow<T>> = BTreeMap::new();
    let blank = |source, sink| CommodityFlow { source, sink, rate: T::zero(), links: Vec::new() };
    for (var, x) in values {
        match var {
            Var::Placed { cloudlet, vm } => {
                if vm >= instance.vm_types() {
                    return Err(Error::parse(var.name(), "vm type out of range"));
                }
                solution.set_placed(slot(cloudlet)?, vm, x > half);
            }
            Var::Open { cloudlet } => {
                let s = slot(cloudlet)?;
                solution.cloudlet_open[s] = x > half;
            }
            Var::Workload { cloudlet } => {
                let s = slot(cloudlet)?;
                solution.workload[s] = x;
            }
            Var::Demand { object, vm, cloudlet } => {
                slot(cloudlet)?;
                shares.entry((object, vm)).or_default().push((cloudlet, x));
            }
            Var::ObjectToCloudlet { object, cloudlet } => {
                unprocessed.entry((object, cloudlet)).or_insert_with(|| blank(object, cloudlet)).rate += x;
            }
            Var::UnprocessedOnLink { object, cloudlet, src, dst } => {
                let l = link(src, dst)?;
                unprocessed.entry((object, cloudlet)).or_insert_with(|| blank(object, cloudlet)).links.push((l, x));
            }
            Var::Processed { cloudlet, olt } => {
                processed.entry((cloudlet, olt)).or_insert_with(|| blank(cloudlet, olt)).rate += x;
            }
            Var::ProcessedOnLink { cloudlet, olt, src, dst } => {
                let l = link(src, dst)?;
                processed.entry((cloudlet, olt)).or_insert_with(|| blank(cloudlet, olt)).links.push((l, x));
            }
            Var::UnprocessedTotal { src, dst } => flows.upt[link(src, dst)?] += x,
            Var::ProcessedTotal { src, dst } => flows.pt[link(src, dst)?] += x,
        }
    }
    solution.assignment = shares
        .into_iter()
        .map(|((object, vm_type), shares)| Assignment { object, vm_type, shares })
        .collect();
    flows.unprocessed = unprocessed.into_values().collect();
    flows.processed = processed.into_values().collect();
    Ok((solution, flows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::{build_model, solve_exact, validate_solution, SearchLimits};
    use crate::power::{ModelParams, Scenario};
    use crate::topology::{build_instance, TopologyConfig};

    #[test]
    fn exact_solution_round_trips_and_satisfies_the_model() {
        let inst = build_instance(&TopologyConfig::<f64>::reduced_with(2, 6, 2)).unwrap();
        let params = ModelParams::for_scenario(Scenario::Two, 0.3);
        let out = solve_exact(&inst, &params, &SearchLimits::default()).unwrap();
        let text = export_solution(&inst, &out.solution, &out.flows);
        let (sol, flows) = import_solution(&inst, &text).unwrap();
        let report = validate_solution(&sol, &flows, &inst, &params);
        assert!(report.is_clean(), "{:?}", report.violations);
        assert!((report.objective - out.report.total_w).abs() <= 1e-9 * out.report.total_w);

        let model = build_model(&inst, &params).unwrap();
        let mut x = vec![0.0; model.vars.len()];
        for (var, value) in solution_values(&inst, &out.solution, &out.flows) {
            let i = model.index_of(&var).unwrap_or_else(|| panic!("{var} missing from the model"));
            x[i] = value;
        }
        let (objective, residuals) = model.evaluate(&x);
        assert!((objective - out.report.total_w).abs() <= 1e-9 * out.report.total_w);
        for (row, r) in model.rows.iter().zip(residuals) {
            assert!(r <= 1e-6, "{} violated by {r}", row.name());
        }
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(read_values::<f64>("Iv_1_0 1 extra").is_err());
        assert!(read_values::<f64>("nonsense 1").is_err());
        assert!(read_values::<f64>("H_3 x").is_err());
        let ok = read_values::<f64>("variable value\n# comment\n\nH_3 1\n").unwrap();
        assert_eq!(ok, vec![(Var::Open { cloudlet: 3 }, 1.0)]);
    }
}
