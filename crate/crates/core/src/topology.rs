//! Layered IoT-over-PON network instances.
//!
//! Each IoT network holds objects, a relay grid, one coordinator and one
//! gateway inside a square area; every network hangs off its own ONU and all
//! ONUs share a single OLT. Links are directed uplink only.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type NodeId = usize;
pub type LinkId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LayerKind {
    Object,
    Relay,
    Coordinator,
    Gateway,
    Onu,
    Olt,
}

impl LayerKind {
    pub const ALL: [LayerKind; 6] = [
        LayerKind::Object,
        LayerKind::Relay,
        LayerKind::Coordinator,
        LayerKind::Gateway,
        LayerKind::Onu,
        LayerKind::Olt,
    ];

    /// Layers that may host a cloudlet, bottom-up.
    pub const CANDIDATES: [LayerKind; 5] = [
        LayerKind::Relay,
        LayerKind::Coordinator,
        LayerKind::Gateway,
        LayerKind::Onu,
        LayerKind::Olt,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_candidate(self) -> bool {
        self != LayerKind::Object
    }

    pub fn name(self) -> &'static str {
        match self {
            LayerKind::Object => "object",
            LayerKind::Relay => "relay",
            LayerKind::Coordinator => "coordinator",
            LayerKind::Gateway => "gateway",
            LayerKind::Onu => "onu",
            LayerKind::Olt => "olt",
        }
    }

    /// The layer a link out of `self` may terminate in. Relays also link to
    /// each other.
    fn uplink_targets(self) -> &'static [LayerKind] {
        match self {
            LayerKind::Object => &[LayerKind::Relay],
            LayerKind::Relay => &[LayerKind::Relay, LayerKind::Coordinator],
            LayerKind::Coordinator => &[LayerKind::Gateway],
            LayerKind::Gateway => &[LayerKind::Onu],
            LayerKind::Onu => &[LayerKind::Olt],
            LayerKind::Olt => &[],
        }
    }
}

impl fmt::Display for LayerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LayerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LayerKind::ALL
            .into_iter()
            .find(|l| l.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::parse("layer", format!("unknown layer `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Medium {
    Wireless,
    Ethernet,
    Fiber,
}

impl Medium {
    pub fn name(self) -> &'static str {
        match self {
            Medium::Wireless => "wireless",
            Medium::Ethernet => "ethernet",
            Medium::Fiber => "fiber",
        }
    }
}

impl FromStr for Medium {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "wireless" => Ok(Medium::Wireless),
            "ethernet" => Ok(Medium::Ethernet),
            "fiber" | "fibre" => Ok(Medium::Fiber),
            other => Err(Error::parse("medium", format!("unknown medium `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn squared_distance(&self, other: &Point<T>) -> T {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Node<T> {
    pub id: NodeId,
    pub layer: LayerKind,
    /// IoT network index; `None` for the shared OLT.
    pub network: Option<usize>,
    /// Only objects, relays and coordinators sit inside the square area.
    pub position: Option<Point<T>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Link<T> {
    pub src: NodeId,
    pub dst: NodeId,
    pub medium: Medium,
    pub distance_m: T,
}

impl<T: Scalar> Link<T> {
    pub fn squared_distance(&self) -> T {
        self.distance_m * self.distance_m
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RequestAssignment {
    /// Object `i` of each network requests type `i mod vm_types`.
    RoundRobin,
    /// Types drawn uniformly from the seeded generator.
    SeededUniform,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelayLayout {
    /// Square grid, cell centres `spacing / 2 + k * spacing`. Needs a square count.
    Grid,
    /// Uniform random positions from the seeded generator; any count.
    Random,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TopologyConfig<T> {
    pub networks: usize,
    pub objects_per_network: usize,
    pub relays_per_network: usize,
    pub area_side_m: T,
    pub relay_spacing_m: T,
    pub gateway_coordinator_distance_m: T,
    /// Defaults to the centre of the area.
    pub coordinator_position: Option<Point<T>>,
    pub rng_seed: u64,
    pub vm_types: usize,
    pub request_assignment: RequestAssignment,
    pub relay_layout: RelayLayout,
}

impl<T: Scalar> Default for TopologyConfig<T> {
    fn default() -> Self {
        Self {
            networks: 2,
            objects_per_network: 50,
            relays_per_network: 25,
            area_side_m: T::lit(30.0),
            relay_spacing_m: T::lit(6.0),
            gateway_coordinator_distance_m: T::lit(100.0),
            coordinator_position: None,
            rng_seed: 7,
            vm_types: 4,
            request_assignment: RequestAssignment::RoundRobin,
            relay_layout: RelayLayout::Grid,
        }
    }
}

impl<T: Scalar> TopologyConfig<T> {
    /// Full-size evaluation network.
    pub fn paper() -> Self {
        Self::default()
    }

    /// Desk-scale network the exact engine can search exhaustively: a 2x2
    /// relay grid spread over the same area, and enough objects per VM type
    /// that sharing a VM at the OLT only pays off at low reduction.
    pub fn reduced() -> Self {
        Self::reduced_with(4, 24, 4)
    }

    pub fn reduced_with(relays: usize, objects: usize, vm_types: usize) -> Self {
        let area = T::lit(30.0);
        let side = (relays as f64).sqrt().round();
        let (layout, spacing) = if relays > 0 && (side * side) as usize == relays {
            (RelayLayout::Grid, area / T::lit(side))
        } else {
            (RelayLayout::Random, T::lit(6.0))
        };
        Self {
            objects_per_network: objects,
            relays_per_network: relays,
            relay_spacing_m: spacing,
            relay_layout: layout,
            vm_types,
            ..Self::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.networks == 0 {
            return Err(Error::Config("at least one IoT network is required".into()));
        }
        if self.vm_types == 0 {
            return Err(Error::Config("at least one VM type is required".into()));
        }
        if self.objects_per_network > 0 && self.relays_per_network == 0 {
            return Err(Error::Config("objects need at least one relay to reach the PON".into()));
        }
        let positive = |v: T| v.is_finite() && v > T::zero();
        if !positive(self.area_side_m) {
            return Err(Error::Config("area side must be positive".into()));
        }
        if !(self.gateway_coordinator_distance_m.is_finite()
            && self.gateway_coordinator_distance_m >= T::zero())
        {
            return Err(Error::Config("gateway-coordinator distance must be nonnegative".into()));
        }
        if self.relay_layout == RelayLayout::Grid && self.relays_per_network > 0 {
            let side = grid_side(self.relays_per_network).ok_or_else(|| {
                Error::Config(format!(
                    "grid layout needs a perfect-square relay count, got {}",
                    self.relays_per_network
                ))
            })?;
            if !positive(self.relay_spacing_m) {
                return Err(Error::Config("relay spacing must be positive".into()));
            }
            if T::from_count(side) * self.relay_spacing_m > self.area_side_m * (T::one() + T::capacity_slack()) {
                return Err(Error::Config(format!(
                    "{side}x{side} relay grid at {} m spacing does not fit a {} m area",
                    self.relay_spacing_m, self.area_side_m
                )));
            }
        }
        if let Some(p) = self.coordinator_position {
            if !self.in_area(&p) {
                return Err(Error::Config("coordinator position lies outside the area".into()));
            }
        }
        Ok(())
    }

    fn in_area(&self, p: &Point<T>) -> bool {
        let inside = |v: T| v >= T::zero() && v <= self.area_side_m;
        inside(p.x) && inside(p.y)
    }
}

fn grid_side(n: usize) -> Option<usize> {
    let side = (n as f64).sqrt().round() as usize;
    (side * side == n).then_some(side)
}

/// An immutable network instance with its adjacency index.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkInstance<T> {
    nodes: Vec<Node<T>>,
    links: Vec<Link<T>>,
    vm_types: usize,
    vm_request: Vec<Option<usize>>,
    networks: usize,
    olt: NodeId,
    out_links: Vec<Vec<LinkId>>,
    in_links: Vec<Vec<LinkId>>,
    link_by_ends: HashMap<(NodeId, NodeId), LinkId>,
    candidates: Vec<NodeId>,
    candidate_slot: Vec<Option<usize>>,
    objects: Vec<NodeId>,
}

/// Generates the layered instance described by `config`.
pub fn build_instance<T: Scalar>(config: &TopologyConfig<T>) -> Result<NetworkInstance<T>> {
    config.validate()?;

    let mut object_rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mut relay_rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    relay_rng.set_stream(1);
    let mut request_rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    request_rng.set_stream(2);

    let area = config.area_side_m.as_f64();
    let half = config.area_side_m / T::lit(2.0);
    let coordinator_at = config.coordinator_position.unwrap_or(Point::new(half, half));

    let mut nodes: Vec<Node<T>> = Vec::new();
    let mut requests = Vec::new();
    let push = |nodes: &mut Vec<Node<T>>, layer, network, position| {
        let id = nodes.len();
        nodes.push(Node { id, layer, network, position });
        id
    };

    for network in 0..config.networks {
        for i in 0..config.objects_per_network {
            let x = object_rng.gen_range(0.0..area);
            let y = object_rng.gen_range(0.0..area);
            let id = push(&mut nodes, LayerKind::Object, Some(network), Some(Point::new(T::lit(x), T::lit(y))));
            let vm = match config.request_assignment {
                RequestAssignment::RoundRobin => i % config.vm_types,
                RequestAssignment::SeededUniform => request_rng.gen_range(0..config.vm_types),
            };
            requests.push((id, vm));
        }
        for p in relay_positions(config, &mut relay_rng) {
            push(&mut nodes, LayerKind::Relay, Some(network), Some(p));
        }
        push(&mut nodes, LayerKind::Coordinator, Some(network), Some(coordinator_at));
        push(&mut nodes, LayerKind::Gateway, Some(network), None);
        push(&mut nodes, LayerKind::Onu, Some(network), None);
    }
    let olt = push(&mut nodes, LayerKind::Olt, None, None);

    let mut links = Vec::new();
    for network in 0..config.networks {
        let members: Vec<&Node<T>> = nodes.iter().filter(|n| n.network == Some(network)).collect();
        let of = |layer| members.iter().copied().filter(move |n| n.layer == layer);
        let single = |layer| of(layer).next().expect("one node per layer per network");
        let coordinator = single(LayerKind::Coordinator);
        let gateway = single(LayerKind::Gateway);
        let onu = single(LayerKind::Onu);

        for src in members.iter().filter(|n| matches!(n.layer, LayerKind::Object | LayerKind::Relay)) {
            let here = src.position.expect("area nodes are positioned");
            for relay in of(LayerKind::Relay).filter(|r| r.id != src.id) {
                let there = relay.position.expect("relays are positioned");
                links.push(Link {
                    src: src.id,
                    dst: relay.id,
                    medium: Medium::Wireless,
                    distance_m: here.squared_distance(&there).sqrt(),
                });
            }
            if src.layer == LayerKind::Relay {
                links.push(Link {
                    src: src.id,
                    dst: coordinator.id,
                    medium: Medium::Wireless,
                    distance_m: here.squared_distance(&coordinator_at).sqrt(),
                });
            }
        }
        links.push(Link {
            src: coordinator.id,
            dst: gateway.id,
            medium: Medium::Wireless,
            distance_m: config.gateway_coordinator_distance_m,
        });
        links.push(Link { src: gateway.id, dst: onu.id, medium: Medium::Ethernet, distance_m: T::zero() });
        links.push(Link { src: onu.id, dst: olt, medium: Medium::Fiber, distance_m: T::zero() });
    }

    let mut vm_request = vec![None; nodes.len()];
    for (id, vm) in requests {
        vm_request[id] = Some(vm);
    }
    NetworkInstance::from_parts(nodes, links, vm_request, config.vm_types)
}

fn relay_positions<T: Scalar>(config: &TopologyConfig<T>, rng: &mut ChaCha8Rng) -> Vec<Point<T>> {
    let count = config.relays_per_network;
    match config.relay_layout {
        RelayLayout::Grid => {
            let Some(side) = grid_side(count) else { return Vec::new() };
            let spacing = config.relay_spacing_m;
            let coord = |k: usize| spacing / T::lit(2.0) + T::from_count(k) * spacing;
            (0..side)
                .flat_map(|iy| (0..side).map(move |ix| (ix, iy)))
                .map(|(ix, iy)| Point::new(coord(ix), coord(iy)))
                .collect()
        }
        RelayLayout::Random => {
            let area = config.area_side_m.as_f64();
            (0..count)
                .map(|_| {
                    let x = rng.gen_range(0.0..area);
                    let y = rng.gen_range(0.0..area);
                    Point::new(T::lit(x), T::lit(y))
                })
                .collect()
        }
    }
}

/// All non-object nodes, in ascending id order.
pub fn candidate_nodes<T: Scalar>(instance: &NetworkInstance<T>) -> Vec<NodeId> {
    instance.candidates().to_vec()
}

impl<T: Scalar> NetworkInstance<T> {
    /// Assembles and checks an instance. Node ids must equal their index.
    pub fn from_parts(
        nodes: Vec<Node<T>>,
        links: Vec<Link<T>>,
        vm_request: Vec<Option<usize>>,
        vm_types: usize,
    ) -> Result<Self> {
        let invalid = |msg: String| Err(Error::Config(msg));
        if vm_request.len() != nodes.len() {
            return invalid("vm_request must have one entry per node".into());
        }
        for (i, node) in nodes.iter().enumerate() {
            if node.id != i {
                return invalid(format!("node ids must be dense; found id {} at index {i}", node.id));
            }
            let is_object = node.layer == LayerKind::Object;
            match vm_request[i] {
                Some(v) if !is_object => return invalid(format!("non-object node {i} requests vm type {v}")),
                Some(v) if v >= vm_types => {
                    return invalid(format!("object {i} requests vm type {v} of {vm_types}"))
                }
                None if is_object => return invalid(format!("object {i} has no vm request")),
                _ => {}
            }
            if (node.layer == LayerKind::Olt) != node.network.is_none() {
                return invalid(format!("node {i}: only the OLT sits outside every IoT network"));
            }
        }

        let olts: Vec<NodeId> = nodes.iter().filter(|n| n.layer == LayerKind::Olt).map(|n| n.id).collect();
        let [olt] = olts[..] else {
            return invalid(format!("exactly one OLT is required, found {}", olts.len()));
        };
        let networks = nodes.iter().filter_map(|n| n.network).max().map_or(0, |m| m + 1);
        for network in 0..networks {
            for layer in [LayerKind::Coordinator, LayerKind::Gateway, LayerKind::Onu] {
                let count = nodes.iter().filter(|n| n.network == Some(network) && n.layer == layer).count();
                if count != 1 {
                    return invalid(format!("network {network} has {count} {layer} nodes, expected 1"));
                }
            }
        }

        let mut out_links = vec![Vec::new(); nodes.len()];
        let mut in_links = vec![Vec::new(); nodes.len()];
        let mut link_by_ends = HashMap::with_capacity(links.len());
        for (id, link) in links.iter().enumerate() {
            let (Some(src), Some(dst)) = (nodes.get(link.src), nodes.get(link.dst)) else {
                return invalid(format!("link {id} references a missing node"));
            };
            if link.src == link.dst {
                return invalid(format!("link {id} is a self loop"));
            }
            if !src.layer.uplink_targets().contains(&dst.layer) {
                return invalid(format!("link {}->{} connects {} to {}", link.src, link.dst, src.layer, dst.layer));
            }
            if dst.layer != LayerKind::Olt && src.network != dst.network {
                return invalid(format!("link {}->{} crosses IoT networks", link.src, link.dst));
            }
            if !(link.distance_m.is_finite() && link.distance_m >= T::zero()) {
                return invalid(format!("link {}->{} has an invalid distance", link.src, link.dst));
            }
            if link_by_ends.insert((link.src, link.dst), id).is_some() {
                return invalid(format!("duplicate link {}->{}", link.src, link.dst));
            }
            out_links[link.src].push(id);
            in_links[link.dst].push(id);
        }

        let candidates: Vec<NodeId> = nodes.iter().filter(|n| n.layer.is_candidate()).map(|n| n.id).collect();
        let mut candidate_slot = vec![None; nodes.len()];
        for (slot, &c) in candidates.iter().enumerate() {
            candidate_slot[c] = Some(slot);
        }
        let objects = nodes.iter().filter(|n| n.layer == LayerKind::Object).map(|n| n.id).collect();

        let instance = Self {
            nodes,
            links,
            vm_types,
            vm_request,
            networks,
            olt,
            out_links,
            in_links,
            link_by_ends,
            candidates,
            candidate_slot,
            objects,
        };
        instance.check_reaches_olt()?;
        Ok(instance)
    }

    fn check_reaches_olt(&self) -> Result<()> {
        let mut reaches = vec![false; self.nodes.len()];
        reaches[self.olt] = true;
        let mut stack = vec![self.olt];
        while let Some(x) = stack.pop() {
            for &l in &self.in_links[x] {
                let src = self.links[l].src;
                if !reaches[src] {
                    reaches[src] = true;
                    stack.push(src);
                }
            }
        }
        match reaches.iter().position(|r| !r) {
            Some(stranded) => Err(Error::Config(format!("node {stranded} has no uplink path to the OLT"))),
            None => Ok(()),
        }
    }

    pub fn nodes(&self) -> &[Node<T>] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &Node<T> {
        &self.nodes[id]
    }

    pub fn layer(&self, id: NodeId) -> LayerKind {
        self.nodes[id].layer
    }

    pub fn links(&self) -> &[Link<T>] {
        &self.links
    }

    pub fn link(&self, id: LinkId) -> &Link<T> {
        &self.links[id]
    }

    pub fn link_between(&self, src: NodeId, dst: NodeId) -> Option<LinkId> {
        self.link_by_ends.get(&(src, dst)).copied()
    }

    pub fn out_links(&self, node: NodeId) -> &[LinkId] {
        &self.out_links[node]
    }

    pub fn in_links(&self, node: NodeId) -> &[LinkId] {
        &self.in_links[node]
    }

    pub fn vm_types(&self) -> usize {
        self.vm_types
    }

    pub fn networks(&self) -> usize {
        self.networks
    }

    pub fn olt(&self) -> NodeId {
        self.olt
    }

    pub fn objects(&self) -> &[NodeId] {
        &self.objects
    }

    pub fn vm_request(&self, object: NodeId) -> Option<usize> {
        self.vm_request[object]
    }

    pub fn candidates(&self) -> &[NodeId] {
        &self.candidates
    }

    /// Position of `node` within [`candidates`](Self::candidates).
    pub fn candidate_slot(&self, node: NodeId) -> Option<usize> {
        self.candidate_slot[node]
    }

    /// Whether a cloudlet at `candidate` may serve objects of `network`.
    pub fn serves_network(&self, candidate: NodeId, network: Option<usize>) -> bool {
        candidate == self.olt || self.nodes[candidate].network == network
    }

    pub fn nodes_in_layer(&self, layer: LayerKind) -> impl Iterator<Item = &Node<T>> {
        self.nodes.iter().filter(move |n| n.layer == layer)
    }

    /// Writes `nodes.csv` and `edges.csv` into `dir`.
    pub fn write_csv(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut w = csv::Writer::from_path(dir.join("nodes.csv"))?;
        w.write_record(["id", "layer", "network", "x", "y", "vm_request"])?;
        for node in &self.nodes {
            let network = node.network.map_or("-1".to_string(), |n| n.to_string());
            let (x, y) = node
                .position
                .map_or((String::new(), String::new()), |p| (p.x.as_f64().to_string(), p.y.as_f64().to_string()));
            let vm = self.vm_request[node.id].map_or(String::new(), |v| v.to_string());
            w.write_record([node.id.to_string(), node.layer.name().to_string(), network, x, y, vm])?;
        }
        w.flush()?;

        let mut w = csv::Writer::from_path(dir.join("edges.csv"))?;
        w.write_record(["src", "dst", "medium", "distance_m"])?;
        for link in &self.links {
            w.write_record([
                link.src.to_string(),
                link.dst.to_string(),
                link.medium.name().to_string(),
                link.distance_m.as_f64().to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads an instance written by [`write_csv`](Self::write_csv). The VM
    /// type count is the larger of `min_vm_types` and the highest request + 1.
    pub fn read_csv(dir: &Path, min_vm_types: usize) -> Result<Self> {
        let nodes_path = dir.join("nodes.csv");
        let mut nodes = Vec::new();
        let mut requests = Vec::new();
        let mut r = csv::Reader::from_path(&nodes_path)?;
        for (row, record) in r.records().enumerate() {
            let record = record?;
            let at = |col: usize| record.get(col).unwrap_or("").trim();
            let loc = format!("{}:{}", nodes_path.display(), row + 2);
            let id = at(0).parse().map_err(|_| Error::parse(&loc, "bad node id"))?;
            let layer: LayerKind = at(1).parse()?;
            let network: i64 = at(2).parse().map_err(|_| Error::parse(&loc, "bad network"))?;
            let position = match (at(3), at(4)) {
                ("", "") => None,
                (x, y) => Some(Point::new(parse_scalar::<T>(x, &loc)?, parse_scalar::<T>(y, &loc)?)),
            };
            let vm = match at(5) {
                "" => None,
                v => Some(v.parse().map_err(|_| Error::parse(&loc, "bad vm_request"))?),
            };
            let network = usize::try_from(network).ok();
            nodes.push(Node { id, layer, network, position });
            requests.push(vm);
        }

        let edges_path = dir.join("edges.csv");
        let mut links = Vec::new();
        let mut r = csv::Reader::from_path(&edges_path)?;
        for (row, record) in r.records().enumerate() {
            let record = record?;
            let at = |col: usize| record.get(col).unwrap_or("").trim();
            let loc = format!("{}:{}", edges_path.display(), row + 2);
            links.push(Link {
                src: at(0).parse().map_err(|_| Error::parse(&loc, "bad src"))?,
                dst: at(1).parse().map_err(|_| Error::parse(&loc, "bad dst"))?,
                medium: at(2).parse()?,
                distance_m: parse_scalar(at(3), &loc)?,
            });
        }

        let vm_types = requests.iter().flatten().map(|v| v + 1).max().unwrap_or(0).max(min_vm_types).max(1);
        Self::from_parts(nodes, links, requests, vm_types)
    }
}

fn parse_scalar<T: Scalar>(s: &str, loc: &str) -> Result<T> {
    s.parse::<f64>().map(T::lit).map_err(|_| Error::parse(loc, format!("bad number `{s}`")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> TopologyConfig<f64> {
        TopologyConfig {
            networks: 1,
            objects_per_network: 1,
            relays_per_network: 1,
            ..TopologyConfig::default()
        }
    }

    #[test]
    fn full_instance_counts() {
        let inst = build_instance(&TopologyConfig::<f64>::paper()).unwrap();
        assert_eq!(inst.nodes().len(), 157);
        assert_eq!(candidate_nodes(&inst).len(), 57);
        assert_eq!(inst.objects().len(), 100);
        assert_eq!(inst.nodes_in_layer(LayerKind::Olt).count(), 1);
        for layer in [LayerKind::Coordinator, LayerKind::Gateway, LayerKind::Onu] {
            assert_eq!(inst.nodes_in_layer(layer).count(), 2);
        }
    }

    #[test]
    fn relay_grid_matches_six_metre_spacing() {
        let inst = build_instance(&TopologyConfig::<f64>::paper()).unwrap();
        let expected = [3.0, 9.0, 15.0, 21.0, 27.0];
        for relay in inst.nodes_in_layer(LayerKind::Relay) {
            let p = relay.position.unwrap();
            assert!(expected.contains(&p.x) && expected.contains(&p.y), "{p:?}");
        }
        let coord = inst.nodes_in_layer(LayerKind::Coordinator).next().unwrap();
        assert_eq!(coord.position, Some(Point::new(15.0, 15.0)));
    }

    #[test]
    fn minimal_chain_has_unique_path() {
        let inst = build_instance(&chain()).unwrap();
        assert_eq!(inst.nodes().len(), 6);
        assert_eq!(candidate_nodes(&inst).len(), 4 + 1);
        let object = inst.objects()[0];
        assert_eq!(inst.out_links(object).len(), 1);

        let mut at = object;
        let mut layers = vec![inst.layer(at)];
        while !inst.out_links(at).is_empty() {
            assert_eq!(inst.out_links(at).len(), 1);
            at = inst.link(inst.out_links(at)[0]).dst;
            layers.push(inst.layer(at));
        }
        assert_eq!(layers, LayerKind::ALL.to_vec());
    }

    #[test]
    fn minimal_chain_candidates_without_olt_are_four() {
        let inst = build_instance(&chain()).unwrap();
        let below_olt = candidate_nodes(&inst).into_iter().filter(|&c| c != inst.olt()).count();
        assert_eq!(below_olt, 4);
    }

    #[test]
    fn round_robin_balances_types() {
        let inst = build_instance(&TopologyConfig::<f64>::paper()).unwrap();
        for network in 0..2 {
            let mut counts = [0usize; 4];
            for &o in inst.objects() {
                if inst.node(o).network == Some(network) {
                    counts[inst.vm_request(o).unwrap()] += 1;
                }
            }
            assert_eq!(counts, [13, 13, 12, 12]);
        }
    }

    #[test]
    fn zero_relays_drop_the_relay_layer() {
        let cfg = TopologyConfig { objects_per_network: 0, relays_per_network: 0, ..TopologyConfig::<f64>::default() };
        let inst = build_instance(&cfg).unwrap();
        let candidates = candidate_nodes(&inst);
        assert_eq!(candidates.len(), 2 * 3 + 1);
        assert!(candidates.iter().all(|&c| inst.layer(c) != LayerKind::Relay));
    }

    #[test]
    fn rejects_bad_configs() {
        let bad = |cfg: TopologyConfig<f64>| matches!(build_instance(&cfg), Err(Error::Config(_)));
        assert!(bad(TopologyConfig { relays_per_network: 24, ..Default::default() }));
        assert!(bad(TopologyConfig { networks: 0, ..Default::default() }));
        assert!(bad(TopologyConfig { vm_types: 0, ..Default::default() }));
        assert!(bad(TopologyConfig { relays_per_network: 0, ..Default::default() }));
        assert!(bad(TopologyConfig { relay_spacing_m: 7.0, ..Default::default() }));
        assert!(bad(TopologyConfig { area_side_m: -1.0, ..Default::default() }));
    }

    #[test]
    fn random_layout_accepts_any_count() {
        let cfg = TopologyConfig { relays_per_network: 3, relay_layout: RelayLayout::Random, ..TopologyConfig::<f64>::default() };
        let inst = build_instance(&cfg).unwrap();
        assert_eq!(inst.nodes_in_layer(LayerKind::Relay).count(), 6);
    }

    #[test]
    fn seeded_uniform_requests_stay_in_range() {
        let cfg = TopologyConfig {
            request_assignment: RequestAssignment::SeededUniform,
            ..TopologyConfig::<f64>::default()
        };
        let inst = build_instance(&cfg).unwrap();
        assert!(inst.objects().iter().all(|&o| inst.vm_request(o).unwrap() < 4));
        let again = build_instance(&cfg).unwrap();
        assert_eq!(inst, again);
    }

    #[test]
    fn csv_round_trip_reproduces_instance() {
        let inst = build_instance(&TopologyConfig::<f64>::reduced().with_seed(3)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        inst.write_csv(dir.path()).unwrap();
        let back = NetworkInstance::<f64>::read_csv(dir.path(), inst.vm_types()).unwrap();
        assert_eq!(back, inst);
    }

    #[test]
    fn from_parts_rejects_cross_network_links() {
        let inst = build_instance(&TopologyConfig::<f64>::reduced()).unwrap();
        let mut links = inst.links().to_vec();
        let relay_a = inst.nodes().iter().find(|n| n.layer == LayerKind::Relay && n.network == Some(0)).unwrap();
        let relay_b = inst.nodes().iter().find(|n| n.layer == LayerKind::Relay && n.network == Some(1)).unwrap();
        links.push(Link { src: relay_a.id, dst: relay_b.id, medium: Medium::Wireless, distance_m: 1.0 });
        let requests = inst.nodes().iter().map(|n| inst.vm_request(n.id)).collect();
        let err = NetworkInstance::from_parts(inst.nodes().to_vec(), links, requests, 4).unwrap_err();
        assert!(err.to_string().contains("crosses"));
    }
}
