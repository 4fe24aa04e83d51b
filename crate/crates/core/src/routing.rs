//! Shortest uplink paths under per-bit link costs.
//!
//! Instances have at most a few hundred nodes, so Dijkstra runs with a linear
//! scan instead of a heap. Ties go to the lowest node id, which keeps routes
//! reproducible.

use crate::scalar::Scalar;
use crate::topology::{LinkId, NetworkInstance, NodeId};

/// Path length as the search orders it: hop count first when minimising hops,
/// energy otherwise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathCost<T> {
    pub hops: usize,
    pub energy: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    /// Minimum energy per bit.
    Energy,
    /// Minimum hop count, then minimum energy.
    Hops,
}

impl<T: Scalar> PathCost<T> {
    fn better_than(&self, other: &PathCost<T>, metric: Metric) -> bool {
        match metric {
            Metric::Energy => self.energy < other.energy,
            Metric::Hops => (self.hops, self.energy) < (other.hops, other.energy),
        }
    }
}

/// Distances from a source (forward tree) or to a sink (reverse tree).
#[derive(Clone, Debug)]
pub struct PathTree<T> {
    pub root: NodeId,
    pub cost: Vec<Option<PathCost<T>>>,
    /// Forward tree: link entering the node. Reverse tree: link leaving it.
    pub via: Vec<Option<LinkId>>,
    reverse: bool,
}

impl<T: Scalar> PathTree<T> {
    pub fn energy(&self, node: NodeId) -> Option<T> {
        self.cost[node].map(|c| c.energy)
    }

    /// Links from the root to `node` (forward) or from `node` to the root
    /// (reverse), in travel order.
    pub fn path<U>(&self, instance: &NetworkInstance<U>, node: NodeId) -> Option<Vec<LinkId>>
    where
        U: Scalar,
    {
        self.cost[node]?;
        let mut links = Vec::new();
        let mut at = node;
        while at != self.root {
            let l = self.via[at]?;
            links.push(l);
            let link = instance.link(l);
            at = if self.reverse { link.dst } else { link.src };
        }
        if !self.reverse {
            links.reverse();
        }
        Some(links)
    }
}

/// Cheapest paths from `source` to every node, using only nodes accepted by
/// `allow` (the source itself is always allowed).
pub fn from_source<T: Scalar>(
    instance: &NetworkInstance<T>,
    costs: &[T],
    source: NodeId,
    metric: Metric,
    allow: impl Fn(NodeId) -> bool,
) -> PathTree<T> {
    search(instance, costs, source, metric, allow, false)
}

/// Cheapest paths from every node to `sink`.
pub fn to_sink<T: Scalar>(
    instance: &NetworkInstance<T>,
    costs: &[T],
    sink: NodeId,
    metric: Metric,
    allow: impl Fn(NodeId) -> bool,
) -> PathTree<T> {
    search(instance, costs, sink, metric, allow, true)
}

fn search<T: Scalar>(
    instance: &NetworkInstance<T>,
    costs: &[T],
    root: NodeId,
    metric: Metric,
    allow: impl Fn(NodeId) -> bool,
    reverse: bool,
) -> PathTree<T> {
    let n = instance.nodes().len();
    let mut cost: Vec<Option<PathCost<T>>> = vec![None; n];
    let mut via = vec![None; n];
    let mut done = vec![false; n];
    cost[root] = Some(PathCost { hops: 0, energy: T::zero() });

    loop {
        let mut next: Option<(NodeId, PathCost<T>)> = None;
        for x in 0..n {
            if done[x] {
                continue;
            }
            if let Some(c) = cost[x] {
                if next.is_none_or(|(_, best)| c.better_than(&best, metric)) {
                    next = Some((x, c));
                }
            }
        }
        let Some((x, here)) = next else { break };
        done[x] = true;

        let edges = if reverse { instance.in_links(x) } else { instance.out_links(x) };
        for &l in edges {
            let link = instance.link(l);
            let y = if reverse { link.src } else { link.dst };
            if done[y] || !allow(y) {
                continue;
            }
            let candidate = PathCost { hops: here.hops + 1, energy: here.energy + costs[l] };
            let improves = cost[y].is_none_or(|c| candidate.better_than(&c, metric));
            if improves {
                cost[y] = Some(candidate);
                via[y] = Some(l);
            }
        }
    }
    PathTree { root, cost, via, reverse }
}

/// Min-hop path from `source` to `sink` restricted to `allow`. Among min-hop
/// paths the cheapest in energy wins; remaining ties take the smallest next
/// node id at each step.
pub fn min_hop_path<T: Scalar>(
    instance: &NetworkInstance<T>,
    costs: &[T],
    source: NodeId,
    sink: NodeId,
    allow: impl Fn(NodeId) -> bool,
) -> Option<Vec<LinkId>> {
    let to = to_sink(instance, costs, sink, Metric::Hops, &allow);
    let mut at = source;
    let mut remaining = to.cost[source]?;
    let mut path = Vec::with_capacity(remaining.hops);
    while at != sink {
        let mut step: Option<(NodeId, LinkId)> = None;
        for &l in instance.out_links(at) {
            let y = instance.link(l).dst;
            let Some(rest) = to.cost[y] else { continue };
            if !allow(y) && y != sink {
                continue;
            }
            let fits = rest.hops + 1 == remaining.hops && rest.energy + costs[l] == remaining.energy;
            if fits && step.is_none_or(|(best, _)| y < best) {
                step = Some((y, l));
            }
        }
        let (y, l) = match step {
            Some(s) => s,
            // rounding made no successor match exactly; follow the tree
            None => {
                let l = to.via[at]?;
                (instance.link(l).dst, l)
            }
        };
        path.push(l);
        remaining = to.cost[y]?;
        at = y;
    }
    Some(path)
}
