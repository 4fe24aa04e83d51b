//! Energy-aware placement of VMs and cloudlets in IoT networks backed by a
//! passive optical access network.
//!
//! The crate models a layered uplink network (objects, relays, coordinator,
//! gateway, ONU, OLT), prices traffic and processing in watts, and places one
//! or more VM instances per requested type so that the weighted sum of both is
//! minimal. Two engines are provided: an exact structure-exploiting search for
//! desk-scale instances ([`milp::solve_exact`]) and the greedy
//! [`eepiv::run_eepiv`] heuristic. [`milp::build_model`] emits the full mixed
//! integer program for an external solver.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix it to `f64`.

pub mod eepiv;
pub mod error;
pub mod experiments;
pub mod milp;
pub mod power;
pub mod routing;
pub mod scalar;
pub mod settings;
pub mod solution;
pub mod topology;

pub use error::{Error, Result};
pub use power::Scenario;
pub use scalar::Scalar;
pub use topology::{LayerKind, LinkId, Medium, NodeId};

pub type TopologyConfig = topology::TopologyConfig<f64>;
pub type NetworkInstance = topology::NetworkInstance<f64>;
pub type ModelParams = power::ModelParams<f64>;
pub type PowerReport = power::PowerReport<f64>;
pub type PlacementSolution = solution::PlacementSolution<f64>;
pub type FlowAssignment = solution::FlowAssignment<f64>;
pub type ExactOutcome = milp::ExactOutcome<f64>;
pub type EepivOutcome = eepiv::EepivOutcome<f64>;
pub type ValidationReport = milp::ValidationReport<f64>;
pub type MilpModel = milp::MilpModel<f64>;
