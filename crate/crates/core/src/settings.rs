//! TOML configuration for the topology and the model.
//!
//! Every key is optional; missing keys keep the defaults of the chosen scale
//! and scenario. Front ends overwrite fields after loading, so flags win over
//! the file.
//!
//! ```toml
//! [topology]
//! scale = "reduced"
//! relays_per_network = 4
//! seed = 3
//!
//! [model]
//! scenario = 2
//! reduction = 0.1
//! ```

use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::power::{ModelParams, Scenario};
use crate::scalar::Scalar;
use crate::topology::{LayerKind, Point, RelayLayout, RequestAssignment, TopologyConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scale {
    /// The full evaluation network.
    #[default]
    Paper,
    /// The desk-scale network of [`TopologyConfig::reduced`].
    Reduced,
}

impl FromStr for Scale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Scale::Paper),
            "reduced" => Ok(Scale::Reduced),
            other => Err(Error::Config(format!("unknown scale `{other}` (paper or reduced)"))),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TopologySettings {
    pub scale: Scale,
    pub networks: Option<usize>,
    pub objects_per_network: Option<usize>,
    pub relays_per_network: Option<usize>,
    pub area_side_m: Option<f64>,
    pub relay_spacing_m: Option<f64>,
    pub gateway_coordinator_distance_m: Option<f64>,
    pub coordinator: Option<[f64; 2]>,
    pub seed: Option<u64>,
    pub vm_types: Option<usize>,
    pub request_assignment: Option<RequestAssignment>,
    pub relay_layout: Option<RelayLayout>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSettings {
    pub scenario: Option<u8>,
    pub reduction: Option<f64>,
    pub demand_bps: Option<f64>,
    pub capacity_enforced: Option<bool>,
    /// Per-CPU power of every candidate layer. In scenario 3 the OLT gets
    /// twice this unless `olt_cpu_power_w` is given.
    pub cpu_power_w: Option<f64>,
    pub olt_cpu_power_w: Option<f64>,
    /// Normalised workloads, one row per VM type: relay, coordinator,
    /// gateway, ONU, OLT.
    pub workloads: Option<Vec<[f64; 5]>>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnergySettings {
    pub e_ot: Option<f64>,
    pub e_rt: Option<f64>,
    pub e_rr: Option<f64>,
    pub e_ct: Option<f64>,
    pub e_cr: Option<f64>,
    pub e_gr: Option<f64>,
    pub e_gt: Option<f64>,
    pub e_u: Option<f64>,
    pub e_l: Option<f64>,
    pub epsilon: Option<f64>,
    pub scaling_a: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    pub topology: TopologySettings,
    pub model: ModelSettings,
    pub energy: EnergySettings,
}

impl Settings {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::parse("config", e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::parse(path.display().to_string(), e.to_string()))
    }

    pub fn scenario(&self) -> Result<Scenario> {
        Scenario::from_number(self.model.scenario.unwrap_or(1))
    }

    pub fn reduction(&self) -> f64 {
        self.model.reduction.unwrap_or(0.5)
    }

    pub fn topology_config<T: Scalar>(&self) -> TopologyConfig<T> {
        let t = &self.topology;
        let mut cfg = match t.scale {
            Scale::Paper => TopologyConfig::paper(),
            Scale::Reduced => {
                let base = TopologyConfig::<T>::reduced();
                TopologyConfig::reduced_with(
                    t.relays_per_network.unwrap_or(base.relays_per_network),
                    t.objects_per_network.unwrap_or(base.objects_per_network),
                    t.vm_types.unwrap_or(base.vm_types),
                )
            }
        };
        if let Some(v) = t.networks {
            cfg.networks = v;
        }
        if let Some(v) = t.objects_per_network {
            cfg.objects_per_network = v;
        }
        if let Some(v) = t.relays_per_network {
            if v != cfg.relays_per_network {
                cfg.relays_per_network = v;
                let side = (v as f64).sqrt().round() as usize;
                if side * side != v {
                    cfg.relay_layout = RelayLayout::Random;
                }
            }
        }
        if let Some(v) = t.area_side_m {
            cfg.area_side_m = T::lit(v);
        }
        if let Some(v) = t.relay_spacing_m {
            cfg.relay_spacing_m = T::lit(v);
        }
        if let Some(v) = t.gateway_coordinator_distance_m {
            cfg.gateway_coordinator_distance_m = T::lit(v);
        }
        if let Some([x, y]) = t.coordinator {
            cfg.coordinator_position = Some(Point::new(T::lit(x), T::lit(y)));
        }
        if let Some(v) = t.seed {
            cfg.rng_seed = v;
        }
        if let Some(v) = t.vm_types {
            cfg.vm_types = v;
        }
        if let Some(v) = t.request_assignment {
            cfg.request_assignment = v;
        }
        if let Some(v) = t.relay_layout {
            cfg.relay_layout = v;
        }
        cfg
    }

    /// Parameters for `scenario` at `reduction` with the file's overrides.
    pub fn model_params<T: Scalar>(&self, scenario: Scenario, reduction: f64) -> Result<ModelParams<T>> {
        let m = &self.model;
        let mut p = ModelParams::for_scenario(scenario, T::lit(reduction));
        if let Some(v) = m.demand_bps {
            p.demand_bps = T::lit(v);
        }
        if let Some(v) = m.capacity_enforced {
            p.capacity_enforced = v;
        }
        if let Some(w) = m.cpu_power_w {
            for layer in LayerKind::CANDIDATES {
                p.processing.cpu_power_w[layer] = T::lit(w);
            }
            if scenario == Scenario::Three {
                p.processing.cpu_power_w[LayerKind::Olt] = T::lit(2.0 * w);
            }
        }
        if let Some(w) = m.olt_cpu_power_w {
            p.processing.cpu_power_w[LayerKind::Olt] = T::lit(w);
        }
        if let Some(rows) = &m.workloads {
            if rows.is_empty() {
                return Err(Error::Config("workload table must have at least one row".into()));
            }
            p.workloads.rows = rows.iter().map(|r| r.map(T::lit)).collect();
        }
        if let Some(v) = m.beta {
            p.beta = T::lit(v);
        }
        if let Some(v) = m.gamma {
            p.gamma = T::lit(v);
        }
        let e = &self.energy;
        let e_fields = [
            (e.e_ot, &mut p.energy.e_ot),
            (e.e_rt, &mut p.energy.e_rt),
            (e.e_rr, &mut p.energy.e_rr),
            (e.e_ct, &mut p.energy.e_ct),
            (e.e_cr, &mut p.energy.e_cr),
            (e.e_gr, &mut p.energy.e_gr),
            (e.e_gt, &mut p.energy.e_gt),
            (e.e_u, &mut p.energy.e_u),
            (e.e_l, &mut p.energy.e_l),
            (e.epsilon, &mut p.energy.epsilon),
            (e.scaling_a, &mut p.energy.scaling_a),
        ];
        for (value, slot) in e_fields {
            if let Some(v) = value {
                *slot = T::lit(v);
            }
        }
        Ok(p)
    }
}
