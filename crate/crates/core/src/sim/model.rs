use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forkjoin::ForkJoinConfig;

/// A service flow: Poisson packets of fixed size, coded `(n_alloc, k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrafficClass {
    pub name: String,
    pub packet_size_bits: f64,
    /// Packets per second.
    pub arrival_rate: f64,
    /// Number of paths (coded blocks) each packet is spread over.
    pub n_alloc: usize,
    /// Blocks needed to rebuild a packet.
    pub k: usize,
}

impl TrafficClass {
    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() {
            return Err(Error::Config("traffic class name must not be empty".into()));
        }
        if !(self.packet_size_bits.is_finite() && self.packet_size_bits > 0.0) {
            return Err(Error::Config(format!(
                "class {}: packet size must be > 0 bits",
                self.name
            )));
        }
        if !(self.arrival_rate.is_finite() && self.arrival_rate > 0.0) {
            return Err(Error::Config(format!(
                "class {}: arrival rate must be > 0 packets/s",
                self.name
            )));
        }
        if self.k == 0 || self.k > self.n_alloc {
            return Err(Error::Config(format!(
                "class {}: need 1 <= k <= n_alloc, got k={} n_alloc={}",
                self.name, self.k, self.n_alloc
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FronthaulTopology {
    /// Capacity of each path in bits per second.
    pub capacities_bps: Vec<f64>,
}

impl FronthaulTopology {
    pub fn homogeneous(n_paths: usize, capacity_bps: f64) -> Self {
        Self {
            capacities_bps: vec![capacity_bps; n_paths],
        }
    }

    pub fn n_paths(&self) -> usize {
        self.capacities_bps.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.capacities_bps.is_empty() {
            return Err(Error::Config("topology needs at least one path".into()));
        }
        if let Some((i, c)) = self
            .capacities_bps
            .iter()
            .enumerate()
            .find(|(_, c)| !(c.is_finite() && **c > 0.0))
        {
            return Err(Error::Config(format!("path {i}: capacity {c} must be > 0")));
        }
        Ok(())
    }
}

/// How paths and bandwidth are split between classes. Per-class vectors
/// follow the order of the class list (e.g. `[bw_u, bw_e]`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum AllocationPolicy {
    /// Every class uses the full capacity of its paths; blocks of all
    /// classes share one FIFO queue per path.
    NonOrthogonal,
    /// Each class owns a fixed fraction of every path's capacity.
    OrthogonalBandwidth { fractions: Vec<f64> },
    /// Each class owns a disjoint set of whole paths, assigned in class order.
    OrthogonalPath { paths: Vec<usize> },
}

impl AllocationPolicy {
    pub fn is_orthogonal(&self) -> bool {
        !matches!(self, AllocationPolicy::NonOrthogonal)
    }

    /// Number of paths a class may spread its blocks over.
    pub fn paths_available(&self, topology: &FronthaulTopology, class_index: usize) -> usize {
        match self {
            AllocationPolicy::OrthogonalPath { paths } => {
                paths.get(class_index).copied().unwrap_or(0)
            }
            _ => topology.n_paths(),
        }
    }
}

/// Where one class's blocks go and how fast they are served.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassPlan {
    /// Physical path of each block.
    pub paths: Vec<usize>,
    /// Simulator queue serving each block.
    pub queues: Vec<usize>,
    /// Bandwidth the class gets on each of its paths (bit/s).
    pub bandwidth_bps: Vec<f64>,
    /// Block service rate `k · bandwidth / B` on each path.
    pub block_service_rate: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResourcePlan {
    pub classes: Vec<ClassPlan>,
    pub n_queues: usize,
}

/// Resolves the policy into per-class queues and checks budgets and stability.
pub fn plan_resources(
    topology: &FronthaulTopology,
    classes: &[TrafficClass],
    policy: &AllocationPolicy,
) -> Result<ResourcePlan> {
    topology.validate()?;
    if classes.is_empty() {
        return Err(Error::Config(
            "at least one traffic class is required".into(),
        ));
    }
    for c in classes {
        c.validate()?;
    }
    let n_paths = topology.n_paths();
    let mut plans = Vec::with_capacity(classes.len());
    let n_queues = match policy {
        AllocationPolicy::NonOrthogonal | AllocationPolicy::OrthogonalBandwidth { .. } => {
            let fractions: Vec<f64> = match policy {
                AllocationPolicy::OrthogonalBandwidth { fractions } => {
                    check_fractions(fractions, classes.len())?;
                    fractions.clone()
                }
                _ => vec![1.0; classes.len()],
            };
            let shared = !policy.is_orthogonal();
            for (ci, c) in classes.iter().enumerate() {
                if c.n_alloc > n_paths {
                    return Err(Error::InvalidPolicy(format!(
                        "class {} spreads over {} paths but the topology has {n_paths}",
                        c.name, c.n_alloc
                    )));
                }
                let paths: Vec<usize> = (0..c.n_alloc).collect();
                let queues = paths
                    .iter()
                    .map(|&p| if shared { p } else { ci * n_paths + p })
                    .collect();
                plans.push(class_plan(c, paths, queues, |p| {
                    fractions[ci] * topology.capacities_bps[p]
                }));
            }
            if shared {
                n_paths
            } else {
                classes.len() * n_paths
            }
        }
        AllocationPolicy::OrthogonalPath { paths: counts } => {
            if counts.len() != classes.len() {
                return Err(Error::InvalidPolicy(format!(
                    "{} path counts given for {} classes",
                    counts.len(),
                    classes.len()
                )));
            }
            if counts.contains(&0) {
                return Err(Error::InvalidPolicy("path counts must be positive".into()));
            }
            let total: usize = counts.iter().sum();
            if total > n_paths {
                return Err(Error::InvalidPolicy(format!(
                    "path counts sum to {total} but the topology has {n_paths} paths"
                )));
            }
            let mut first = 0;
            for (c, &count) in classes.iter().zip(counts) {
                if c.n_alloc > count {
                    return Err(Error::InvalidPolicy(format!(
                        "class {} spreads over {} paths but owns only {count}",
                        c.name, c.n_alloc
                    )));
                }
                let paths: Vec<usize> = (first..first + c.n_alloc).collect();
                plans.push(class_plan(c, paths.clone(), paths, |p| {
                    topology.capacities_bps[p]
                }));
                first += count;
            }
            n_paths
        }
    };
    check_stability(classes, &plans, policy, n_queues)?;
    Ok(ResourcePlan {
        classes: plans,
        n_queues,
    })
}

fn check_fractions(fractions: &[f64], n_classes: usize) -> Result<()> {
    if fractions.len() != n_classes {
        return Err(Error::InvalidPolicy(format!(
            "{} bandwidth fractions given for {n_classes} classes",
            fractions.len()
        )));
    }
    if let Some(f) = fractions.iter().find(|f| !(**f > 0.0 && **f <= 1.0)) {
        return Err(Error::InvalidPolicy(format!(
            "bandwidth fraction {f} outside (0, 1]"
        )));
    }
    let total: f64 = fractions.iter().sum();
    if total > 1.0 + 1e-12 {
        return Err(Error::InvalidPolicy(format!(
            "bandwidth fractions sum to {total} > 1"
        )));
    }
    Ok(())
}

fn class_plan(
    class: &TrafficClass,
    paths: Vec<usize>,
    queues: Vec<usize>,
    bandwidth: impl Fn(usize) -> f64,
) -> ClassPlan {
    let bandwidth_bps: Vec<f64> = paths.iter().map(|&p| bandwidth(p)).collect();
    let block_service_rate = bandwidth_bps
        .iter()
        .map(|bw| class.k as f64 * bw / class.packet_size_bits)
        .collect();
    ClassPlan {
        paths,
        queues,
        bandwidth_bps,
        block_service_rate,
    }
}

fn check_stability(
    classes: &[TrafficClass],
    plans: &[ClassPlan],
    policy: &AllocationPolicy,
    n_queues: usize,
) -> Result<()> {
    if policy.is_orthogonal() {
        for (c, plan) in classes.iter().zip(plans) {
            let slowest = plan
                .block_service_rate
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min);
            if c.arrival_rate >= slowest {
                return Err(Error::Unstable {
                    context: format!("class {}", c.name),
                    arrival_rate: c.arrival_rate,
                    service_rate: slowest,
                });
            }
        }
        return Ok(());
    }
    // Shared queues: total offered work per path must stay below one.
    let mut load = vec![0.0; n_queues];
    let mut users: Vec<Vec<&str>> = vec![Vec::new(); n_queues];
    for (c, plan) in classes.iter().zip(plans) {
        for (&q, &mu) in plan.queues.iter().zip(&plan.block_service_rate) {
            load[q] += c.arrival_rate / mu;
            users[q].push(&c.name);
        }
    }
    for (q, &rho) in load.iter().enumerate() {
        if rho >= 1.0 {
            let arrivals: f64 = classes
                .iter()
                .zip(plans)
                .filter(|(_, p)| p.queues.contains(&q))
                .map(|(c, _)| c.arrival_rate)
                .sum();
            return Err(Error::Unstable {
                context: format!("path {q} shared by classes {}", users[q].join(", ")),
                arrival_rate: arrivals,
                service_rate: arrivals / rho,
            });
        }
    }
    Ok(())
}

/// Analytic model of one class under an orthogonal policy.
pub fn class_fork_join(
    class: &TrafficClass,
    plan: &ClassPlan,
    policy: &AllocationPolicy,
) -> Result<ForkJoinConfig> {
    if !policy.is_orthogonal() {
        return Err(Error::Config(
            "analytic bounds model a single class on private resources; \
             use an orthogonal_bandwidth or orthogonal_path policy"
                .into(),
        ));
    }
    let bw = plan.bandwidth_bps[0];
    if plan.bandwidth_bps.iter().any(|&b| b != bw) {
        return Err(Error::Config(format!(
            "class {}: analytic bounds need identical bandwidth on every path",
            class.name
        )));
    }
    ForkJoinConfig::new(class.n_alloc, class.k, class.packet_size_bits, bw)
}
