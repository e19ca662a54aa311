use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forkjoin::DelayCurve;
use crate::mm1::DEFAULT_EPS_TRUNC;
use crate::sim::{plan_resources, AllocationPolicy, FronthaulTopology, SimSpec, TrafficClass};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TopologySpec {
    Homogeneous {
        n_paths: usize,
        path_capacity_bps: f64,
    },
    Explicit {
        capacities_bps: Vec<f64>,
    },
}

impl TopologySpec {
    pub fn build(&self) -> FronthaulTopology {
        match self {
            TopologySpec::Homogeneous {
                n_paths,
                path_capacity_bps,
            } => FronthaulTopology::homogeneous(*n_paths, *path_capacity_bps),
            TopologySpec::Explicit { capacities_bps } => FronthaulTopology {
                capacities_bps: capacities_bps.clone(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassSpec {
    pub name: String,
    pub packet_size_bits: f64,
    pub arrival_rate: f64,
    pub k: usize,
    /// Defaults to every path the policy grants the class.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_alloc: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Log,
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TauGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl Default for TauGrid {
    fn default() -> Self {
        Self {
            min: 1e-6,
            max: 1e-1,
            points: 200,
            spacing: Spacing::Log,
        }
    }
}

impl TauGrid {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(format!("tau_grid: {m}")));
        if self.points < 2 {
            return bad(format!("need at least 2 points, got {}", self.points));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.max > self.min) {
            return bad(format!(
                "need finite min < max, got [{}, {}]",
                self.min, self.max
            ));
        }
        match self.spacing {
            Spacing::Log if self.min <= 0.0 => bad("log spacing needs min > 0".into()),
            Spacing::Linear if self.min < 0.0 => bad("min must be >= 0".into()),
            _ => Ok(()),
        }
    }

    /// Grid latencies in seconds; the end points are exact.
    pub fn values(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        let mut out: Vec<f64> = (0..self.points)
            .map(|i| {
                let f = i as f64 / last;
                match self.spacing {
                    Spacing::Log => (self.min.ln() + f * (self.max / self.min).ln()).exp(),
                    Spacing::Linear => self.min + f * (self.max - self.min),
                }
            })
            .collect();
        out[0] = self.min;
        out[self.points - 1] = self.max;
        out
    }
}

fn default_packets() -> u64 {
    1_000_000
}

fn default_replications() -> u32 {
    1
}

fn default_eps() -> f64 {
    DEFAULT_EPS_TRUNC
}

fn default_targets() -> Vec<f64> {
    vec![0.99999, 0.999999]
}

/// Everything an experiment needs. The JSON form is the config file format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub topology: TopologySpec,
    pub classes: Vec<ClassSpec>,
    pub policy: AllocationPolicy,
    #[serde(default)]
    pub tau_grid: TauGrid,
    /// Packets simulated per class and replication.
    #[serde(default = "default_packets")]
    pub packets: u64,
    /// Leading packets discarded; 10% of `packets` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warmup: Option<u64>,
    #[serde(default = "default_replications")]
    pub replications: u32,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_eps")]
    pub eps_trunc: f64,
    #[serde(default = "default_targets")]
    pub reliability_targets: Vec<f64>,
    /// Where command output goes; not part of the canonical form.
    #[serde(default, skip_serializing)]
    pub output_dir: Option<PathBuf>,
}

/// Command-line values that replace config fields.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub packets: Option<u64>,
    pub replications: Option<u32>,
    pub tau_min: Option<f64>,
    pub tau_max: Option<f64>,
    pub tau_points: Option<usize>,
    pub eps_trunc: Option<f64>,
}

impl ExperimentConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("experiment config: {e}")))?;
        cfg.resolve()
    }

    /// Reads a config file, or the config embedded in any output file
    /// (curve CSV/JSON or a JSON summary with a `config` field).
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if let Ok(curve) = DelayCurve::parse_any(&text) {
            let value = curve.metadata().config.clone().ok_or_else(|| {
                Error::Config(format!(
                    "{}: curve carries no embedded config",
                    path.display()
                ))
            })?;
            return Self::from_value(value);
        }
        if let Some(line) = text.lines().find_map(|l| l.strip_prefix("# config:")) {
            let value = serde_json::from_str(line.trim())
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            return Self::from_value(value);
        }
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        match value.get("config") {
            Some(inner) if value.get("topology").is_none() => Self::from_value(inner.clone()),
            _ => Self::from_value(value),
        }
    }

    fn from_value(value: serde_json::Value) -> Result<Self> {
        let cfg: Self = serde_json::from_value(value)
            .map_err(|e| Error::Config(format!("experiment config: {e}")))?;
        cfg.resolve()
    }

    pub fn apply(mut self, o: &Overrides) -> Result<Self> {
        if let Some(s) = o.seed {
            self.base_seed = s;
        }
        if let Some(p) = o.packets {
            self.packets = p;
            self.warmup = Some(SimSpec::default_warmup(p));
        }
        if let Some(r) = o.replications {
            self.replications = r;
        }
        if let Some(v) = o.tau_min {
            self.tau_grid.min = v;
        }
        if let Some(v) = o.tau_max {
            self.tau_grid.max = v;
        }
        if let Some(v) = o.tau_points {
            self.tau_grid.points = v;
        }
        if let Some(v) = o.eps_trunc {
            self.eps_trunc = v;
        }
        self.resolve()
    }

    /// Fills defaults and checks every precondition the commands rely on.
    pub fn resolve(mut self) -> Result<Self> {
        if self.classes.is_empty() {
            return Err(Error::Config(
                "at least one traffic class is required".into(),
            ));
        }
        for (i, c) in self.classes.iter().enumerate() {
            if self.classes[..i].iter().any(|o| o.name == c.name) {
                return Err(Error::Config(format!("duplicate class name {:?}", c.name)));
            }
            if !c
                .name
                .chars()
                .all(|ch| ch.is_ascii_alphanumeric() || "-_.".contains(ch))
            {
                return Err(Error::Config(format!(
                    "class name {:?} may only use letters, digits, '-', '_' and '.'",
                    c.name
                )));
            }
        }
        let topology = self.topology.build();
        topology.validate()?;
        for i in 0..self.classes.len() {
            if self.classes[i].n_alloc.is_none() {
                self.classes[i].n_alloc = Some(self.policy.paths_available(&topology, i));
            }
        }
        if self.warmup.is_none() {
            self.warmup = Some(SimSpec::default_warmup(self.packets));
        }
        let warmup = self.warmup.unwrap_or_default();
        if self.packets <= warmup {
            return Err(Error::Config(format!(
                "packets ({}) must exceed warmup ({warmup})",
                self.packets
            )));
        }
        if self.replications == 0 {
            return Err(Error::Config("replications must be >= 1".into()));
        }
        if !(self.eps_trunc > 0.0 && self.eps_trunc < 1.0) {
            return Err(Error::Config(format!(
                "eps_trunc must lie in (0, 1), got {}",
                self.eps_trunc
            )));
        }
        if let Some(r) = self
            .reliability_targets
            .iter()
            .find(|r| !(**r > 0.0 && **r < 1.0))
        {
            return Err(Error::Config(format!(
                "reliability target {r} must lie in (0, 1)"
            )));
        }
        self.tau_grid.validate()?;
        let classes = self.traffic_classes();
        for c in &classes {
            c.validate()?;
        }
        plan_resources(&topology, &classes, &self.policy)?;
        Ok(self)
    }

    pub fn traffic_classes(&self) -> Vec<TrafficClass> {
        self.classes
            .iter()
            .map(|c| TrafficClass {
                name: c.name.clone(),
                packet_size_bits: c.packet_size_bits,
                arrival_rate: c.arrival_rate,
                n_alloc: c.n_alloc.unwrap_or(0),
                k: c.k,
            })
            .collect()
    }

    pub fn sim_spec(&self) -> SimSpec {
        SimSpec {
            topology: self.topology.build(),
            classes: self.traffic_classes(),
            policy: self.policy.clone(),
            packets: self.packets,
            warmup: self
                .warmup
                .unwrap_or_else(|| SimSpec::default_warmup(self.packets)),
        }
    }

    pub fn grid(&self) -> Vec<f64> {
        self.tau_grid.values()
    }

    /// Resolved config as a JSON value with sorted keys; embedded in outputs.
    pub fn canonical(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }

    pub fn canonical_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.canonical()).expect("config serializes");
        s.push('\n');
        s
    }
}
